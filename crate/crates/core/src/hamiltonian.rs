//! Pauli-decomposed Hamiltonians, their scalar diagnostics and the
//! Trotter-step planners.

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pauli::PauliString;

/// Largest step count a planner will hand out.
pub const MAX_TROTTER_STEPS: f64 = (1u64 << 40) as f64;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Term {
    pub coeff: f64,
    pub pauli: PauliString,
}

/// `H = Σ_j h_j P_j` on a fixed number of qubits. Term order is the Trotter
/// order and is never changed.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawHamiltonian")]
pub struct PauliHamiltonian {
    num_qubits: usize,
    terms: Vec<Term>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawHamiltonian {
    num_qubits: usize,
    terms: Vec<RawTerm>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTerm {
    coeff: f64,
    pauli: String,
}

impl TryFrom<RawHamiltonian> for PauliHamiltonian {
    type Error = Error;

    fn try_from(raw: RawHamiltonian) -> Result<Self> {
        let terms = raw
            .terms
            .into_iter()
            .map(|t| {
                Ok(Term {
                    coeff: t.coeff,
                    pauli: t.pauli.parse()?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        PauliHamiltonian::new(raw.num_qubits, terms)
    }
}

impl PauliHamiltonian {
    pub fn new(num_qubits: usize, terms: Vec<Term>) -> Result<Self> {
        if num_qubits == 0 {
            return Err(Error::Schema("num_qubits must be at least 1".into()));
        }
        for (j, t) in terms.iter().enumerate() {
            if t.pauli.num_qubits() != num_qubits {
                return Err(Error::Schema(format!(
                    "term {j}: pauli {} has {} letters, expected {num_qubits}",
                    t.pauli,
                    t.pauli.num_qubits()
                )));
            }
            if !t.coeff.is_finite() {
                return Err(Error::Schema(format!("term {j}: non-finite coefficient")));
            }
        }
        Ok(PauliHamiltonian { num_qubits, terms })
    }

    /// The zero Hamiltonian (no terms).
    pub fn zero(num_qubits: usize) -> Self {
        PauliHamiltonian {
            num_qubits: num_qubits.max(1),
            terms: Vec::new(),
        }
    }

    /// Builds from `(coeff, "IXYZ...")` pairs. Convenient in tests and generators.
    pub fn from_pairs(num_qubits: usize, pairs: &[(f64, &str)]) -> Result<Self> {
        let terms = pairs
            .iter()
            .map(|&(coeff, s)| {
                Ok(Term {
                    coeff,
                    pauli: s.parse()?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        PauliHamiltonian::new(num_qubits, terms)
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// `Ω = Σ |h_j|`.
    pub fn omega(&self) -> f64 {
        // fold from +0.0: an empty f64 sum is -0.0
        self.terms.iter().map(|t| t.coeff.abs()).fold(0.0, |a, b| a + b)
    }

    /// Sum of the coefficients on all-identity strings.
    pub fn identity_offset(&self) -> f64 {
        self.terms
            .iter()
            .filter(|t| t.pauli.is_identity())
            .map(|t| t.coeff)
            .fold(0.0, |a, b| a + b)
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("hamiltonian serialization cannot fail")
    }
}

pub fn parse_hamiltonian(path: impl AsRef<Path>) -> Result<PauliHamiltonian> {
    let text = std::fs::read_to_string(path.as_ref())
        .map_err(|e| Error::Schema(format!("{}: {e}", path.as_ref().display())))?;
    PauliHamiltonian::from_json_str(&text)
}

pub fn write_hamiltonian(h: &PauliHamiltonian, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path.as_ref(), h.to_json_string())
        .map_err(|e| Error::InvalidArgument(format!("{}: {e}", path.as_ref().display())))
}

/// Complex inverse temperature `β = re + i·im`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InverseTemperature {
    pub re: f64,
    pub im: f64,
}

impl InverseTemperature {
    pub fn new(re: f64, im: f64) -> Result<Self> {
        if !re.is_finite() || !im.is_finite() {
            return Err(Error::InvalidArgument("inverse temperature must be finite".into()));
        }
        Ok(InverseTemperature { re, im })
    }

    pub fn real(re: f64) -> Self {
        InverseTemperature { re, im: 0.0 }
    }

    pub fn abs(&self) -> f64 {
        self.re.hypot(self.im)
    }

    pub fn is_real(&self) -> bool {
        self.im == 0.0
    }
}

impl FromStr for InverseTemperature {
    type Err = Error;

    /// Accepts `"re"` or `"re,im"`.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidArgument(format!("cannot parse inverse temperature {s:?}"));
        let mut parts = s.split(',').map(str::trim);
        let re = parts.next().ok_or_else(bad)?.parse::<f64>().map_err(|_| bad())?;
        let im = match parts.next() {
            Some(p) => p.parse::<f64>().map_err(|_| bad())?,
            None => 0.0,
        };
        if parts.next().is_some() {
            return Err(bad());
        }
        InverseTemperature::new(re, im)
    }
}

impl fmt::Display for InverseTemperature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.im == 0.0 {
            write!(f, "{}", self.re)
        } else {
            write!(f, "{},{}", self.re, self.im)
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct HamiltonianDiagnostics {
    pub num_qubits: usize,
    pub num_terms: usize,
    pub omega: f64,
    pub xi: f64,
    /// `N_k` for every term, 1-based `k` stored at index `k-1`; the first
    /// entry is always 0.
    pub non_commuting: Vec<usize>,
    pub frak_h: f64,
}

/// Ω, ξ, the per-term non-commuting counts `N_k` and `𝔥 = Σ_{k≥2} |h_k| N_k`.
///
/// `N_k` counts earlier terms `z < k` that fail to commute with term `k`.
pub fn diagnostics(h: &PauliHamiltonian) -> HamiltonianDiagnostics {
    let terms = h.terms();
    let non_commuting: Vec<usize> = terms
        .iter()
        .enumerate()
        .map(|(k, tk)| {
            terms[..k]
                .iter()
                .filter(|tz| !tz.pauli.commutes(&tk.pauli).expect("validated sizes"))
                .count()
        })
        .collect();
    let frak_h = terms
        .iter()
        .zip(&non_commuting)
        .map(|(t, &n)| t.coeff.abs() * n as f64)
        .fold(0.0, |a, b| a + b);
    HamiltonianDiagnostics {
        num_qubits: h.num_qubits(),
        num_terms: terms.len(),
        omega: h.omega(),
        xi: terms.iter().map(|t| t.coeff.abs()).fold(0.0, f64::max),
        non_commuting,
        frak_h,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TrotterMode {
    AdditiveComplex,
    MultiplicativeReal,
}

/// First-order product formula `[∏_j exp(c_j P_j) · ∏_j exp(i a_j P_j)]`
/// repeated `nu` times, with `c_j = -b_R h_j / ν` and `a_j = -b_I h_j / ν`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrotterPlan {
    pub mode: TrotterMode,
    pub beta: InverseTemperature,
    pub nu: u64,
    /// Imaginary-time exponents `c_j = -b_R h_j / ν`.
    pub imag_exponents: Vec<f64>,
    /// Real-time angles `a_j = -b_I h_j / ν`; the factor is `exp(i a_j P_j)`.
    pub real_angles: Vec<f64>,
    pub omega: f64,
    pub frak_h: f64,
    pub error_budget: f64,
    /// True when `nu` comes from an unverified heuristic constant.
    pub heuristic: bool,
}

impl TrotterPlan {
    pub fn with_steps(
        h: &PauliHamiltonian,
        beta: InverseTemperature,
        nu: u64,
        mode: TrotterMode,
        error_budget: f64,
    ) -> Self {
        assert!(nu >= 1, "a product formula needs at least one step");
        let d = diagnostics(h);
        let steps = nu as f64;
        TrotterPlan {
            mode,
            beta,
            nu,
            imag_exponents: h.terms().iter().map(|t| -beta.re * t.coeff / steps).collect(),
            real_angles: h.terms().iter().map(|t| -beta.im * t.coeff / steps).collect(),
            omega: d.omega,
            frak_h: d.frak_h,
            error_budget,
            heuristic: false,
        }
    }
}

fn steps_from_bound(bound: f64, what: &'static str) -> Result<u64> {
    if bound.is_nan() || bound > MAX_TROTTER_STEPS {
        return Err(Error::PlanInfeasible {
            what,
            magnitude: bound,
        });
    }
    Ok((bound.ceil() as u64).max(1))
}

/// Step count guaranteeing `|Z - Z_T| ≤ ε_mT Z` for real β:
/// `ν = max(1, ⌈β² Ω 𝔥 / ln(1 + ε_mT)⌉)`.
pub fn plan_trotter_multiplicative(
    h: &PauliHamiltonian,
    beta: f64,
    eps_mt: f64,
) -> Result<TrotterPlan> {
    if !(eps_mt > 0.0) || !eps_mt.is_finite() {
        return Err(Error::InvalidArgument(format!("ε_mT must be positive, got {eps_mt}")));
    }
    if !beta.is_finite() {
        return Err(Error::InvalidArgument("β must be finite".into()));
    }
    let d = diagnostics(h);
    let bound = beta * beta * d.omega * d.frak_h / eps_mt.ln_1p();
    let nu = steps_from_bound(bound, "multiplicative Trotter step count")?;
    Ok(TrotterPlan::with_steps(
        h,
        InverseTemperature::real(beta),
        nu,
        TrotterMode::MultiplicativeReal,
        eps_mt,
    ))
}

/// Additive-error step count for complex β with the implied constant fixed
/// to 1: `ν = max(1, ⌈2^N |β|² Ω² exp(b_R Ω) / ε_aT⌉)`. The result is marked
/// heuristic; see `oracle::plan_trotter_additive_validated` for the checked
/// variant.
pub fn plan_trotter_additive(
    h: &PauliHamiltonian,
    beta: InverseTemperature,
    eps_at: f64,
) -> Result<TrotterPlan> {
    if !(eps_at > 0.0) || !eps_at.is_finite() {
        return Err(Error::InvalidArgument(format!("ε_aT must be positive, got {eps_at}")));
    }
    let omega = h.omega();
    let nu = if omega == 0.0 || beta.abs() == 0.0 {
        1
    } else {
        // Evaluated in log space so that 2^N·exp(b_R Ω) overflow is reported.
        let ln_bound = h.num_qubits() as f64 * std::f64::consts::LN_2
            + 2.0 * beta.abs().ln()
            + 2.0 * omega.ln()
            + beta.re * omega
            - eps_at.ln();
        steps_from_bound(ln_bound.exp(), "additive Trotter step count")?
    };
    let mut plan = TrotterPlan::with_steps(h, beta, nu, TrotterMode::AdditiveComplex, eps_at);
    plan.heuristic = true;
    Ok(plan)
}

/// Splits a total multiplicative budget symmetrically:
/// `ε_m = ε_mS + ε_mT + ε_mS ε_mT` with `ε_mS = ε_mT = √(1+ε_m) - 1`.
pub fn split_multiplicative_error(eps_m: f64) -> Result<f64> {
    if !(eps_m > 0.0) || !eps_m.is_finite() {
        return Err(Error::InvalidArgument(format!("ε_m must be positive, got {eps_m}")));
    }
    Ok((1.0 + eps_m).sqrt() - 1.0)
}

/// Planning heuristic for the multiplicative sampler's expected cost,
/// `2^{2N} e^{2βΩ} / (ε_mS² Z²) · log2(1/δ) · log2(Z_max/Z)` with `Z_hint`
/// standing in for `Z`. Constants are not meaningful, only scaling.
pub fn expected_runtime_estimate(
    h: &PauliHamiltonian,
    beta: f64,
    eps_ms: f64,
    delta: f64,
    z_max: f64,
    z_hint: f64,
) -> Result<f64> {
    for (name, v) in [("ε_mS", eps_ms), ("δ", delta), ("Z_max", z_max), ("Z_hint", z_hint)] {
        if !(v > 0.0) || !v.is_finite() {
            return Err(Error::InvalidArgument(format!("{name} must be positive, got {v}")));
        }
    }
    let n = h.num_qubits() as f64;
    let prefactor = (2.0 * n * std::f64::consts::LN_2 + 2.0 * beta * h.omega()).exp()
        / (eps_ms * eps_ms * z_hint * z_hint);
    Ok(prefactor * (1.0 / delta).log2() * (z_max / z_hint).log2())
}
