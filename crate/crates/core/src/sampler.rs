//! Classical Monte Carlo estimation of `tr(T_R)` by sampling Pauli paths.
//!
//! Each factor `exp(c P)` of the imaginary-time product is rewritten as
//! `e^{|c|} [p_I · I + p_P · sign(c) P]` and one branch is drawn per factor.
//! The product of drawn Paulis has trace `2^N` times its phase when it is the
//! identity and zero otherwise, so every shot takes one of three values
//! `B · {-1, 0, +1}`. Shot outcomes are reduced by exact integer counting,
//! which makes estimates independent of the number of worker threads.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hamiltonian::{
    plan_trotter_multiplicative, split_multiplicative_error, PauliHamiltonian, TrotterPlan,
};
use crate::pauli::{PauliString, PhasedPauli};

/// Number of halvings of the additive error before the multiplicative
/// wrapper gives up.
pub const ROUND_CAP: u32 = 48;

/// Largest shot count a single additive run will attempt.
pub const MAX_SHOTS: f64 = (1u64 << 48) as f64;

/// Shots per RNG stream. Stream `b` serves shots `b·BLOCK .. (b+1)·BLOCK`.
pub const SHOT_BLOCK: u64 = 256;

const SAMPLER_DOMAIN: u64 = 0x7061_756c_697a_5331;

/// `exp(c P) = scale · (p_identity · I + p_pauli · sign · P)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExpSplit {
    pub p_identity: f64,
    pub p_pauli: f64,
    pub sign: i8,
    pub scale: f64,
}

pub fn exp_split(c: f64) -> ExpSplit {
    assert!(c.is_finite(), "exponent must be finite");
    let a = c.abs();
    // cosh(a)/e^a = (1 + e^{-2a})/2 and sinh(a)/e^a = -expm1(-2a)/2,
    // both computed without cancellation.
    let p_pauli = -(-2.0 * a).exp_m1() / 2.0;
    ExpSplit {
        p_identity: 1.0 - p_pauli,
        p_pauli,
        sign: if c < 0.0 { -1 } else { 1 },
        scale: a.exp(),
    }
}

/// Deterministic generator for stream `stream` of call `call` under `seed`.
/// `domain` separates independent consumers of the same seed.
pub fn stream_rng(domain: u64, seed: u64, call: u64, stream: u64) -> ChaCha8Rng {
    let mut key = [0u8; 32];
    key[..8].copy_from_slice(&seed.to_le_bytes());
    key[8..16].copy_from_slice(&call.to_le_bytes());
    key[16..24].copy_from_slice(&domain.to_le_bytes());
    let mut rng = ChaCha8Rng::from_seed(key);
    rng.set_stream(stream);
    rng
}

/// Runs `shots` independent draws split into fixed blocks and returns the sum
/// of their integer outcomes. The block layout, not the thread count,
/// determines which stream each shot uses.
pub(crate) fn sum_blocks<F>(pool: Option<&rayon::ThreadPool>, shots: u64, block: F) -> i64
where
    F: Fn(u64, u64) -> i64 + Sync,
{
    let blocks = shots.div_ceil(SHOT_BLOCK);
    let run = || {
        (0..blocks)
            .into_par_iter()
            .map(|b| {
                let start = b * SHOT_BLOCK;
                let len = SHOT_BLOCK.min(shots - start);
                block(b, len)
            })
            .sum::<i64>()
    };
    match pool {
        Some(p) => p.install(run),
        None => run(),
    }
}

/// Largest mean fire count served from a precomputed binomial table.
const TABLE_MEAN_LIMIT: f64 = 4096.0;

/// How the number of steps at which a term fires is drawn.
#[derive(Debug, Clone)]
enum FireCount {
    /// Normalised binomial CDF `P(K ≤ k)`, truncated once the remaining
    /// mass is below `1e-18`.
    Table(Vec<f64>),
    /// Geometric gaps between firing steps, with `ln(1 - p)`.
    Gaps(f64),
}

fn binomial_cdf(nu: u64, p: f64) -> Option<Vec<f64>> {
    let mean = nu as f64 * p;
    if mean > TABLE_MEAN_LIMIT {
        return None;
    }
    let ln_stay = (-p).ln_1p();
    let ln_odds = p.ln() - ln_stay;
    let mut ln_pmf = nu as f64 * ln_stay;
    let mut acc = 0.0;
    let mut cdf = Vec::new();
    let mut k = 0u64;
    loop {
        let pmf = ln_pmf.exp();
        acc += pmf;
        cdf.push(acc);
        if k == nu || (k as f64 > mean && pmf < 1e-18 * acc) {
            break;
        }
        ln_pmf += ((nu - k) as f64 / (k + 1) as f64).ln() + ln_odds;
        k += 1;
    }
    for c in &mut cdf {
        *c /= acc;
    }
    *cdf.last_mut().expect("non-empty") = 1.0;
    Some(cdf)
}

#[derive(Debug, Clone)]
struct SampledTerm {
    pauli: PauliString,
    /// Single-word masks, meaningful when the register fits in 64 qubits.
    x: u64,
    z: u64,
    p_pauli: f64,
    count: FireCount,
    negative: bool,
}

/// Precomputed data for drawing shots of one Trotter plan.
#[derive(Debug, Clone)]
pub struct PathSampler {
    num_qubits: usize,
    nu: u64,
    terms: Vec<SampledTerm>,
    /// `ln(B / 2^N)`; kept apart from `2^N` so that `B` is exact when no
    /// term contributes.
    ln_scale: f64,
}

impl PathSampler {
    pub fn new(h: &PauliHamiltonian, plan: &TrotterPlan) -> Result<Self> {
        if plan.imag_exponents.len() != h.len() {
            return Err(Error::InvalidArgument("plan does not match the Hamiltonian".into()));
        }
        if plan.beta.im != 0.0 {
            return Err(Error::InvalidArgument(
                "path sampling needs a real inverse temperature".into(),
            ));
        }
        if (plan.nu as u128) * (h.len() as u128 + 1) >= 1u128 << 63 {
            return Err(Error::PlanInfeasible {
                what: "steps times terms",
                magnitude: plan.nu as f64 * h.len() as f64,
            });
        }
        let nu = plan.nu as f64;
        let mut ln_scale = 0.0;
        let mut terms = Vec::new();
        for (t, &c) in h.terms().iter().zip(&plan.imag_exponents) {
            if t.pauli.is_identity() {
                // exp(c I) = e^c I: an exact scalar, no sampling needed.
                ln_scale += c * nu;
                continue;
            }
            let split = exp_split(c);
            ln_scale += c.abs() * nu;
            if split.p_pauli > 0.0 {
                let count = match binomial_cdf(plan.nu, split.p_pauli) {
                    Some(cdf) => FireCount::Table(cdf),
                    None => FireCount::Gaps((-split.p_pauli).ln_1p()),
                };
                terms.push(SampledTerm {
                    x: t.pauli.x_words()[0],
                    z: t.pauli.z_words()[0],
                    pauli: t.pauli.clone(),
                    p_pauli: split.p_pauli,
                    count,
                    negative: split.sign < 0,
                });
            }
        }
        Ok(PathSampler {
            num_qubits: h.num_qubits(),
            nu: plan.nu,
            terms,
            ln_scale,
        })
    }

    /// Magnitude `B` of every non-zero shot: `2^N e^{|β| Ω'} e^{-β h_0}`,
    /// where `Ω'` excludes identity terms and `h_0` is their total.
    pub fn shot_bound(&self) -> f64 {
        2f64.powi(self.num_qubits as i32) * self.ln_scale.exp()
    }

    /// True when no term can fire, so every shot is exactly `+B`.
    pub fn is_deterministic(&self) -> bool {
        self.terms.is_empty()
    }

    fn outcome(phase: u32, identity: bool, negative: bool) -> i8 {
        if !identity {
            return 0;
        }
        let s = match phase & 3 {
            0 => 1,
            2 => -1,
            _ => 0,
        };
        if negative {
            -s
        } else {
            s
        }
    }

    fn accumulate(&self, order: impl Iterator<Item = usize>) -> i8 {
        let mut negative = false;
        if self.num_qubits <= 64 {
            let (mut x, mut z, mut phase) = (0u64, 0u64, 0u32);
            for j in order {
                let t = &self.terms[j];
                negative ^= t.negative;
                let (x2, z2) = (t.x, t.z);
                let (x3, z3) = (x ^ x2, z ^ z2);
                phase = phase
                    .wrapping_add((x & z).count_ones())
                    .wrapping_add((x2 & z2).count_ones())
                    .wrapping_sub((x3 & z3).count_ones())
                    .wrapping_add(2 * (z & x2).count_ones());
                x = x3;
                z = z3;
            }
            Self::outcome(phase, x == 0 && z == 0, negative)
        } else {
            let mut acc = PhasedPauli::identity(self.num_qubits);
            for j in order {
                let t = &self.terms[j];
                negative ^= t.negative;
                acc.mul_assign_right(&t.pauli).expect("sizes checked");
            }
            Self::outcome(acc.phase() as u32, acc.pauli().is_identity(), negative)
        }
    }

    /// One shot drawn factor by factor, in step order and term order.
    /// Returns the shot's sign in `{-1, 0, 1}`.
    pub fn draw_literal<R: Rng + ?Sized>(&self, rng: &mut R) -> i8 {
        let mut fired = Vec::new();
        for _ in 0..self.nu {
            for (j, t) in self.terms.iter().enumerate() {
                if rng.random::<f64>() < t.p_pauli {
                    fired.push(j);
                }
            }
        }
        self.accumulate(fired.into_iter())
    }

    /// Same distribution as [`draw_literal`](Self::draw_literal). For each
    /// term the number of firing steps is drawn from its binomial law and
    /// the steps themselves uniformly without replacement, so the cost
    /// scales with the number of Pauli branches taken instead of with `ν·L`.
    /// `keys` is scratch space reused across shots.
    pub fn draw<R: Rng + ?Sized>(&self, rng: &mut R, keys: &mut Vec<u64>) -> i8 {
        keys.clear();
        let width = self.terms.len() as u64;
        for (j, t) in self.terms.iter().enumerate() {
            let start = keys.len();
            let key = |step: u64| step * width + j as u64;
            match &t.count {
                FireCount::Table(cdf) => {
                    let u: f64 = rng.random();
                    let k = cdf.iter().position(|&c| u < c).unwrap_or(cdf.len() - 1) as u64;
                    // Floyd's sampling of k distinct steps out of ν.
                    for top in self.nu - k..self.nu {
                        let s = rng.random_range(0..=top);
                        let taken = keys[start..].contains(&key(s));
                        keys.push(key(if taken { top } else { s }));
                    }
                }
                FireCount::Gaps(ln_stay) => {
                    let nu = self.nu as f64;
                    let mut pos = 0.0f64;
                    loop {
                        let u: f64 = rng.random();
                        pos += ((1.0 - u).ln() / ln_stay).floor();
                        if pos >= nu {
                            break;
                        }
                        keys.push(key(pos as u64));
                        pos += 1.0;
                    }
                }
            }
        }
        keys.sort_unstable();
        self.accumulate(keys.iter().map(|&k| (k % width) as usize))
    }
}

/// One literal shot: `B · Re(tr(product)/2^N) · (product of signs)`.
/// Its expectation over `rng` is `tr(T_R)`.
pub fn sample_shot<R: Rng + ?Sized>(
    h: &PauliHamiltonian,
    plan: &TrotterPlan,
    rng: &mut R,
) -> Result<f64> {
    let s = PathSampler::new(h, plan)?;
    Ok(s.shot_bound() * s.draw_literal(rng) as f64)
}

/// Hoeffding count for values in `[-B, B]`: `⌈2 B² ln(2/δ) / ε_a²⌉`.
pub fn hoeffding_shots(bound: f64, eps_a: f64, delta: f64) -> Result<u64> {
    check_budget("ε_a", eps_a)?;
    check_delta(delta)?;
    let n = (2.0 * bound * bound * (2.0 / delta).ln() / (eps_a * eps_a)).ceil();
    if !(n <= MAX_SHOTS) {
        return Err(Error::BudgetInfeasible { required: n });
    }
    Ok((n as u64).max(1))
}

fn check_budget(name: &str, v: f64) -> Result<()> {
    if !(v > 0.0) || !v.is_finite() {
        return Err(Error::InvalidArgument(format!("{name} must be positive, got {v}")));
    }
    Ok(())
}

fn check_delta(delta: f64) -> Result<()> {
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidArgument(format!("δ must lie in (0, 1), got {delta}")));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EstimateMode {
    Additive,
    Multiplicative,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Budgets {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps_a: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps_m: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps_ms: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eps_mt: Option<f64>,
    pub delta: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub z_max: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RoundRecord {
    pub round: u32,
    pub eps_a: f64,
    pub delta: f64,
    pub shots: u64,
    pub estimate: f64,
    pub threshold: f64,
    pub accepted: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateReport {
    pub estimate: f64,
    pub mode: EstimateMode,
    pub budgets: Budgets,
    pub shots_used: u64,
    pub rounds: u32,
    /// Magnitude of each non-zero shot.
    pub shot_bound: f64,
    pub plan: TrotterPlan,
    pub seed: u64,
    pub round_log: Vec<RoundRecord>,
    pub notes: Vec<String>,
}

/// Seeded, optionally thread-limited driver for the estimators.
pub struct Sampler {
    seed: u64,
    pool: Option<rayon::ThreadPool>,
}

impl Sampler {
    /// `workers = None` uses the global rayon pool.
    pub fn new(seed: u64, workers: Option<usize>) -> Result<Self> {
        let pool = match workers {
            None => None,
            Some(0) => return Err(Error::InvalidArgument("worker count must be positive".into())),
            Some(k) => Some(
                rayon::ThreadPoolBuilder::new()
                    .num_threads(k)
                    .build()
                    .map_err(|e| Error::InvalidArgument(format!("thread pool: {e}")))?,
            ),
        };
        Ok(Sampler { seed, pool })
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub(crate) fn pool(&self) -> Option<&rayon::ThreadPool> {
        self.pool.as_ref()
    }

    /// Sum of `shots` shot signs from call `call`.
    fn run_shots(&self, sampler: &PathSampler, call: u64, shots: u64) -> i64 {
        let seed = self.seed;
        sum_blocks(self.pool(), shots, |b, len| {
            let mut rng = stream_rng(SAMPLER_DOMAIN, seed, call, b);
            let mut keys = Vec::new();
            (0..len).map(|_| sampler.draw(&mut rng, &mut keys) as i64).sum()
        })
    }

    /// Sample mean of `shots` shots; exposed for unbiasedness checks.
    pub fn mean_of_shots(
        &self,
        h: &PauliHamiltonian,
        plan: &TrotterPlan,
        call: u64,
        shots: u64,
    ) -> Result<ShotStatistics> {
        let s = PathSampler::new(h, plan)?;
        let seed = self.seed;
        let (sum, nonzero) = {
            let run = || {
                (0..shots.div_ceil(SHOT_BLOCK))
                    .into_par_iter()
                    .map(|b| {
                        let len = SHOT_BLOCK.min(shots - b * SHOT_BLOCK);
                        let mut rng = stream_rng(SAMPLER_DOMAIN, seed, call, b);
                        let mut keys = Vec::new();
                        let mut acc = (0i64, 0u64);
                        for _ in 0..len {
                            let v = s.draw(&mut rng, &mut keys);
                            acc.0 += v as i64;
                            acc.1 += (v != 0) as u64;
                        }
                        acc
                    })
                    .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1))
            };
            match self.pool() {
                Some(p) => p.install(run),
                None => run(),
            }
        };
        let b = s.shot_bound();
        let n = shots as f64;
        let mean = b * sum as f64 / n;
        // Shots are B·s with s² = 1 exactly when s ≠ 0.
        let second = b * b * nonzero as f64 / n;
        let var = (second - mean * mean).max(0.0) * n / (n - 1.0).max(1.0);
        Ok(ShotStatistics {
            mean,
            std_error: (var / n).sqrt(),
            shots,
            bound: b,
        })
    }

    fn additive_round(
        &self,
        sampler: &PathSampler,
        eps_a: f64,
        delta: f64,
        call: u64,
    ) -> Result<(f64, u64)> {
        let bound = sampler.shot_bound();
        if !bound.is_finite() {
            return Err(Error::BudgetInfeasible { required: f64::INFINITY });
        }
        if sampler.is_deterministic() {
            return Ok((bound, 0));
        }
        let n = hoeffding_shots(bound, eps_a, delta)?;
        let sum = self.run_shots(sampler, call, n);
        Ok((bound * sum as f64 / n as f64, n))
    }

    /// Mean of Hoeffding-many shots: `|mean - tr(T_R)| ≤ ε_a` with
    /// probability at least `1 - δ`.
    pub fn estimate_additive(
        &self,
        h: &PauliHamiltonian,
        plan: &TrotterPlan,
        eps_a: f64,
        delta: f64,
    ) -> Result<EstimateReport> {
        let s = PathSampler::new(h, plan)?;
        let (estimate, shots) = self.additive_round(&s, eps_a, delta, 0)?;
        Ok(EstimateReport {
            estimate,
            mode: EstimateMode::Additive,
            budgets: Budgets {
                eps_a: Some(eps_a),
                delta,
                ..Budgets::default()
            },
            shots_used: shots,
            rounds: 1,
            shot_bound: s.shot_bound(),
            plan: plan.clone(),
            seed: self.seed,
            round_log: Vec::new(),
            notes: identity_notes(h),
        })
    }

    /// Successive halving of the additive error until the estimate is large
    /// enough to certify relative error `ε_mS`. Round `r` uses
    /// `ε_a = ε_mS Z_max / 2^r` and `δ_r = δ / 2^{r+1}` and accepts when
    /// `Ẑ ≥ ε_a (1 + 1/ε_mS)`.
    pub fn estimate_multiplicative(
        &self,
        h: &PauliHamiltonian,
        plan: &TrotterPlan,
        eps_ms: f64,
        delta: f64,
        z_max: f64,
    ) -> Result<EstimateReport> {
        check_budget("ε_mS", eps_ms)?;
        check_delta(delta)?;
        check_budget("Z_max", z_max)?;
        let s = PathSampler::new(h, plan)?;
        if s.is_deterministic() {
            // Zero variance: B itself is Z_T, so no round is needed.
            let estimate = s.shot_bound();
            let mut notes = identity_notes(h);
            notes.push("no term fires: every shot equals the bound, estimate is exact".into());
            return Ok(EstimateReport {
                estimate,
                mode: EstimateMode::Multiplicative,
                budgets: Budgets {
                    eps_ms: Some(eps_ms),
                    delta,
                    z_max: Some(z_max),
                    ..Budgets::default()
                },
                shots_used: 0,
                rounds: 1,
                shot_bound: s.shot_bound(),
                plan: plan.clone(),
                seed: self.seed,
                round_log: Vec::new(),
                notes,
            });
        }
        let mut log = Vec::new();
        let mut shots_used = 0u64;
        for r in 0..=ROUND_CAP {
            let scale = 0.5f64.powi(r as i32);
            let eps_a = eps_ms * z_max * scale;
            let delta_r = delta * scale / 2.0;
            let (estimate, shots) = self.additive_round(&s, eps_a, delta_r, r as u64)?;
            shots_used += shots;
            let threshold = eps_a * (1.0 + 1.0 / eps_ms);
            let accepted = estimate >= threshold;
            log.push(RoundRecord {
                round: r,
                eps_a,
                delta: delta_r,
                shots,
                estimate,
                threshold,
                accepted,
            });
            if accepted {
                return Ok(EstimateReport {
                    estimate,
                    mode: EstimateMode::Multiplicative,
                    budgets: Budgets {
                        eps_ms: Some(eps_ms),
                        delta,
                        z_max: Some(z_max),
                        ..Budgets::default()
                    },
                    shots_used,
                    rounds: r + 1,
                    shot_bound: s.shot_bound(),
                    plan: plan.clone(),
                    seed: self.seed,
                    round_log: log,
                    notes: identity_notes(h),
                });
            }
        }
        Err(Error::RoundCapExceeded { rounds: ROUND_CAP + 1 })
    }

    /// End-to-end multiplicative estimate of `Z` for real β: splits `ε_m`
    /// symmetrically, plans `ν` for `ε_mT` and runs the wrapper with `ε_mS`.
    pub fn estimate_partition(
        &self,
        h: &PauliHamiltonian,
        beta: f64,
        eps_m: f64,
        delta: f64,
        z_max: f64,
    ) -> Result<EstimateReport> {
        let eps = split_multiplicative_error(eps_m)?;
        self.estimate_partition_split(h, beta, eps, eps, delta, z_max)
            .map(|mut r| {
                r.budgets.eps_m = Some(eps_m);
                r
            })
    }

    /// As [`estimate_partition`](Self::estimate_partition) with explicit
    /// sampling and Trotter budgets.
    pub fn estimate_partition_split(
        &self,
        h: &PauliHamiltonian,
        beta: f64,
        eps_ms: f64,
        eps_mt: f64,
        delta: f64,
        z_max: f64,
    ) -> Result<EstimateReport> {
        let plan = plan_trotter_multiplicative(h, beta, eps_mt)?;
        let mut report = self.estimate_multiplicative(h, &plan, eps_ms, delta, z_max)?;
        report.budgets.eps_mt = Some(eps_mt);
        Ok(report)
    }
}

fn identity_notes(h: &PauliHamiltonian) -> Vec<String> {
    let offset = h.identity_offset();
    if h.terms().iter().any(|t| t.pauli.is_identity()) {
        vec![format!("identity terms folded as an exact scalar (total coefficient {offset})")]
    } else {
        Vec::new()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ShotStatistics {
    pub mean: f64,
    pub std_error: f64,
    pub shots: u64,
    pub bound: f64,
}

/// An upper bound on `Z_T` valid for any plan: `2^N e^{|β| Ω'} e^{-β h_0}`.
pub fn trivial_z_max(h: &PauliHamiltonian, beta: f64) -> f64 {
    let omega_nonid: f64 = h
        .terms()
        .iter()
        .filter(|t| !t.pauli.is_identity())
        .map(|t| t.coeff.abs())
        .sum();
    2f64.powi(h.num_qubits() as i32) * (beta.abs() * omega_nonid - beta * h.identity_offset()).exp()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hamiltonian::{InverseTemperature, TrotterMode};

    fn h(n: usize, pairs: &[(f64, &str)]) -> PauliHamiltonian {
        PauliHamiltonian::from_pairs(n, pairs).unwrap()
    }

    fn plan(h: &PauliHamiltonian, beta: f64, nu: u64) -> TrotterPlan {
        TrotterPlan::with_steps(h, InverseTemperature::real(beta), nu, TrotterMode::MultiplicativeReal, 0.1)
    }

    #[test]
    fn split_examples() {
        let s = exp_split(0.0);
        assert_eq!((s.p_identity, s.p_pauli, s.sign, s.scale), (1.0, 0.0, 1, 1.0));
        let s = exp_split(2f64.ln());
        assert!((s.p_identity - 0.625).abs() < 1e-15);
        assert!((s.p_pauli - 0.375).abs() < 1e-15);
        assert_eq!(s.sign, 1);
        assert!((s.scale - 2.0).abs() < 1e-15);
        let m = exp_split(-(2f64.ln()));
        assert_eq!(m.sign, -1);
        assert_eq!((m.p_identity, m.p_pauli), (s.p_identity, s.p_pauli));
    }

    #[test]
    fn split_is_stable_for_tiny_and_huge_exponents() {
        let s = exp_split(1e-300);
        assert!(s.p_pauli > 0.0 && s.p_pauli <= 1e-300);
        let s = exp_split(700.0);
        assert_eq!(s.p_identity, 0.5);
        assert!(s.scale.is_finite());
    }

    #[test]
    fn single_x_shot_values() {
        let ham = h(1, &[(0.7, "X")]);
        let p = plan(&ham, 1.0, 1);
        let s = PathSampler::new(&ham, &p).unwrap();
        assert!((s.shot_bound() - 2.0 * 0.7f64.exp()).abs() < 1e-12);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..200 {
            let v = sample_shot(&ham, &p, &mut rng).unwrap();
            assert!(v == 0.0 || (v - s.shot_bound()).abs() < 1e-12);
        }
    }

    #[test]
    fn zero_hamiltonian_shots_are_exact() {
        let ham = PauliHamiltonian::zero(3);
        let p = plan(&ham, 1.3, 1);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        for _ in 0..10 {
            assert_eq!(sample_shot(&ham, &p, &mut rng).unwrap(), 8.0);
        }
        let r = Sampler::new(5, None).unwrap().estimate_additive(&ham, &p, 0.3, 0.2).unwrap();
        assert_eq!(r.estimate, 8.0);
    }

    #[test]
    fn hoeffding_count_example() {
        let b = 2.0 * 0.5f64.exp();
        assert_eq!(hoeffding_shots(b, 0.5, 0.1).unwrap(), 261);
        assert!(matches!(hoeffding_shots(1e30, 1e-10, 0.1), Err(Error::BudgetInfeasible { .. })));
        assert!(hoeffding_shots(1.0, 0.0, 0.1).is_err());
        assert!(hoeffding_shots(1.0, 0.1, 1.0).is_err());
    }

    #[test]
    fn complex_plan_is_rejected() {
        let ham = h(1, &[(1.0, "Z")]);
        let p = TrotterPlan::with_steps(
            &ham,
            InverseTemperature::new(1.0, 0.5).unwrap(),
            1,
            TrotterMode::AdditiveComplex,
            0.1,
        );
        assert!(PathSampler::new(&ham, &p).is_err());
    }

    #[test]
    fn zero_hamiltonian_multiplicative_returns_exact_dimension() {
        let ham = PauliHamiltonian::zero(2);
        let p = plan(&ham, 1.0, 1);
        let r = Sampler::new(1, None)
            .unwrap()
            .estimate_multiplicative(&ham, &p, 0.2, 0.1, 8.0)
            .unwrap();
        assert_eq!(r.estimate, 4.0);
        assert_eq!((r.rounds, r.shots_used), (1, 0));
    }

    #[test]
    fn beta_zero_gives_dimension() {
        let ham = h(2, &[(0.3, "XY"), (-1.1, "ZZ")]);
        let r = Sampler::new(9, None)
            .unwrap()
            .estimate_partition(&ham, 0.0, 0.1, 0.1, 8.0)
            .unwrap();
        assert_eq!(r.estimate, 4.0);
    }

    #[test]
    fn identity_terms_fold_into_the_bound() {
        let ham = h(1, &[(0.4, "I"), (0.5, "Z")]);
        let p = plan(&ham, 1.0, 3);
        let s = PathSampler::new(&ham, &p).unwrap();
        let expect = 2.0 * (0.5f64 - 0.4).exp();
        assert!((s.shot_bound() - expect).abs() < 1e-12);
        assert!((trivial_z_max(&ham, 1.0) - expect).abs() < 1e-12);
    }

    #[test]
    fn round_cap_is_reported() {
        // Z_max absurdly large relative to Z: thresholds never drop low enough.
        let ham = h(1, &[(0.5, "Z")]);
        let p = plan(&ham, 1.0, 1);
        let err = Sampler::new(1, None)
            .unwrap()
            .estimate_multiplicative(&ham, &p, 0.5, 0.1, 1e300)
            .unwrap_err();
        assert_eq!(err, Error::RoundCapExceeded { rounds: ROUND_CAP + 1 });
    }
}
