//! Statevector simulation of one-clean-qubit trace estimation and the gadget
//! compiler that turns each Trotter factor into gates.
//!
//! The clean qubit is qubit 0 of the simulated register; the `N` qubits of
//! `V` follow it. A maximally mixed register is modelled by drawing a
//! uniformly random computational basis state per shot.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use crate::circuit::{Circuit, Gate, Matrix2};
use crate::error::{Error, Result};
use crate::hamiltonian::{plan_trotter_additive, InverseTemperature, PauliHamiltonian, TrotterPlan};
use crate::oracle::{check_capacity, circuit_unitary, pauli_exp, DenseOperator};
use crate::pauli::{Letter, PauliString};
use crate::sampler::{exp_split, stream_rng, ExpSplit, Sampler, MAX_SHOTS, SHOT_BLOCK};

/// Largest simulated register, clean qubit included.
pub const STATEVECTOR_CAPACITY: usize = 14;

const DQC1_DOMAIN: u64 = 0x7061_756c_697a_4431;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Part {
    Re,
    Im,
}

impl fmt::Display for Part {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Part::Re => "Re",
            Part::Im => "Im",
        })
    }
}

impl FromStr for Part {
    type Err = Error;

    fn from_str(s: &str) -> Result<Part> {
        match s.to_ascii_lowercase().as_str() {
            "re" => Ok(Part::Re),
            "im" => Ok(Part::Im),
            _ => Err(Error::InvalidArgument(format!("part must be Re or Im, got {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TraceMode {
    /// Exact clean-qubit expectation for each sampled basis state.
    #[default]
    Expectation,
    /// A single ±1 measurement outcome per shot.
    Measurement,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    num_qubits: usize,
    amps: Vec<Complex64>,
}

fn check_statevector_capacity(num_qubits: usize) -> Result<()> {
    if num_qubits > STATEVECTOR_CAPACITY {
        return Err(Error::Capacity {
            qubits: num_qubits,
            limit: STATEVECTOR_CAPACITY,
        });
    }
    Ok(())
}

impl StateVector {
    /// Computational basis state `|index⟩`, qubit 0 most significant.
    pub fn basis(num_qubits: usize, index: usize) -> Result<Self> {
        check_statevector_capacity(num_qubits)?;
        let dim = 1usize << num_qubits;
        if index >= dim {
            return Err(Error::InvalidArgument(format!("basis index {index} out of range")));
        }
        let mut amps = vec![Complex64::new(0.0, 0.0); dim];
        amps[index] = Complex64::new(1.0, 0.0);
        Ok(StateVector { num_qubits, amps })
    }

    pub fn zero(num_qubits: usize) -> Result<Self> {
        Self::basis(num_qubits, 0)
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    fn bit(&self, qubit: usize) -> usize {
        1 << (self.num_qubits - 1 - qubit)
    }

    fn apply_matrix(&mut self, m: &Matrix2, target: usize, control_mask: usize) {
        let tb = self.bit(target);
        for i in 0..self.amps.len() {
            if i & tb != 0 || i & control_mask != control_mask {
                continue;
            }
            let j = i | tb;
            let (a, b) = (self.amps[i], self.amps[j]);
            self.amps[i] = m[0][0] * a + m[0][1] * b;
            self.amps[j] = m[1][0] * a + m[1][1] * b;
        }
    }

    fn check_gate(&self, gate: &Gate, offset: usize) -> Result<()> {
        for q in gate.qubits() {
            if q + offset >= self.num_qubits {
                return Err(Error::InvalidArgument(format!(
                    "gate {} on qubit {q} exceeds a {}-qubit state",
                    gate.kind(),
                    self.num_qubits - offset
                )));
            }
        }
        Ok(())
    }

    pub fn apply_gate(&mut self, gate: &Gate) -> Result<()> {
        self.check_gate(gate, 0)?;
        let mask = gate.control().map_or(0, |c| self.bit(c));
        self.apply_matrix(&gate.target_matrix(), gate.target(), mask);
        Ok(())
    }

    pub fn apply_circuit(&mut self, circuit: &Circuit) -> Result<()> {
        circuit.gates().iter().try_for_each(|g| self.apply_gate(g))
    }

    /// Applies `gate`, shifted up by `offset` qubits, conditioned on `control`.
    pub fn apply_controlled(&mut self, control: usize, gate: &Gate, offset: usize) -> Result<()> {
        self.check_gate(gate, offset)?;
        if gate.qubits().iter().any(|&q| q + offset == control) {
            return Err(Error::InvalidArgument("control overlaps the gate".into()));
        }
        let mut mask = self.bit(control);
        if let Some(c) = gate.control() {
            mask |= self.bit(c + offset);
        }
        self.apply_matrix(&gate.target_matrix(), gate.target() + offset, mask);
        Ok(())
    }

    /// `⟨Z⟩` of one qubit.
    pub fn z_expectation(&self, qubit: usize) -> f64 {
        let b = self.bit(qubit);
        self.amps
            .iter()
            .enumerate()
            .map(|(i, a)| if i & b == 0 { a.norm_sqr() } else { -a.norm_sqr() })
            .sum()
    }
}

fn conjugation_layer(p: &PauliString) -> Vec<Gate> {
    p.support()
        .into_iter()
        .filter_map(|q| match p.letter(q) {
            Letter::X => Some(Gate::H(q)),
            Letter::Y => Some(Gate::Rx(q, std::f64::consts::FRAC_PI_2)),
            _ => None,
        })
        .collect()
}

/// `Γ`, CNOT ladder, `central` on the last support qubit, ladder reversed,
/// `Γ†`. With `central = Z` this is the Pauli string itself; with
/// `central = RZ(2θ)` it is `exp(-iθP)`.
fn sandwich(p: &PauliString, central: Option<Gate>) -> Result<Circuit> {
    let support = p.support();
    let last = *support
        .last()
        .ok_or_else(|| Error::InvalidArgument("identity string: exp(cI) is the scalar e^c".into()))?;
    let gamma = conjugation_layer(p);
    let ladder: Vec<Gate> = support
        .windows(2)
        .map(|w| Gate::Cx { control: w[0], target: w[1] })
        .collect();
    let mut gates = gamma.clone();
    gates.extend(ladder.iter().cloned());
    if let Some(g) = central {
        debug_assert_eq!(g.target(), last);
        gates.push(g);
    }
    gates.extend(ladder.iter().rev().cloned());
    gates.extend(gamma.iter().rev().map(Gate::adjoint));
    Circuit::new(p.num_qubits(), gates)
}

/// `X Z X Z = -I` on one qubit: a sign built from listed gates, so that it
/// becomes a relative phase once the block is controlled.
fn minus_identity(qubit: usize) -> [Gate; 4] {
    [Gate::X(qubit), Gate::Z(qubit), Gate::X(qubit), Gate::Z(qubit)]
}

/// The two branches realising `exp(cP)` in the aggregate:
/// `exp(cP) = scale · (p_identity · I_branch + p_pauli · pauli_branch)`.
/// The Pauli branch already contains the sign of `c`.
#[derive(Debug, Clone, PartialEq)]
pub struct ImaginaryGadget {
    pub split: ExpSplit,
    pub identity_branch: Circuit,
    pub pauli_branch: Circuit,
}

impl ImaginaryGadget {
    pub fn branch(&self, pauli: bool) -> &Circuit {
        if pauli {
            &self.pauli_branch
        } else {
            &self.identity_branch
        }
    }
}

pub fn build_imaginary_gadget(c: f64, p: &PauliString) -> Result<ImaginaryGadget> {
    if !c.is_finite() {
        return Err(Error::InvalidArgument("exponent must be finite".into()));
    }
    let split = exp_split(c);
    let identity_branch = sandwich(p, None)?;
    let last = *p.support().last().expect("non-identity");
    let mut pauli_branch = sandwich(p, Some(Gate::Z(last)))?;
    if split.sign < 0 {
        for g in minus_identity(last) {
            pauli_branch.push(g)?;
        }
    }
    Ok(ImaginaryGadget {
        split,
        identity_branch,
        pauli_branch,
    })
}

/// Circuit for `exp(-iθP)`; the central rotation is `RZ(2θ)`.
pub fn build_real_gadget(theta: f64, p: &PauliString) -> Result<Circuit> {
    if !theta.is_finite() {
        return Err(Error::InvalidArgument("angle must be finite".into()));
    }
    let last = p.support().last().copied();
    sandwich(p, last.map(|q| Gate::Rz(q, 2.0 * theta)))
}

/// `(⟨X⟩ or ⟨Y⟩ of the clean qubit)` after `H` and controlled-`V` on `|x⟩`.
/// Equals `Re⟨x|V|x⟩` for `Re` and `Im⟨x|V|x⟩` for `Im`.
fn clean_qubit_expectation(v: &Circuit, x: usize, part: Part) -> Result<f64> {
    let n = v.num_qubits();
    let mut state = StateVector::basis(n + 1, x)?;
    state.apply_gate(&Gate::H(0))?;
    for g in v.gates() {
        state.apply_controlled(0, g, 1)?;
    }
    // Rotate the measured axis onto Z.
    if part == Part::Im {
        state.apply_gate(&Gate::Sdg(0))?;
    }
    state.apply_gate(&Gate::H(0))?;
    Ok(state.z_expectation(0))
}

fn trace_shot<R: Rng + ?Sized>(v: &Circuit, part: Part, mode: TraceMode, rng: &mut R) -> Result<f64> {
    let x = rng.random_range(0..1usize << v.num_qubits());
    let e = clean_qubit_expectation(v, x, part)?;
    Ok(match mode {
        TraceMode::Expectation => e,
        TraceMode::Measurement => {
            if rng.random::<f64>() < (1.0 + e) / 2.0 {
                1.0
            } else {
                -1.0
            }
        }
    })
}

/// Sums per-block `f64` results in block order so that the total does not
/// depend on scheduling.
fn ordered_block_sum<F>(sampler: &Sampler, shots: u64, block: F) -> Result<f64>
where
    F: Fn(u64, u64) -> Result<f64> + Sync,
{
    let blocks = shots.div_ceil(SHOT_BLOCK);
    let run = || {
        (0..blocks)
            .into_par_iter()
            .map(|b| block(b, SHOT_BLOCK.min(shots - b * SHOT_BLOCK)))
            .collect::<Result<Vec<f64>>>()
    };
    let parts = match sampler.pool() {
        Some(p) => p.install(run),
        None => run(),
    }?;
    Ok(parts.into_iter().sum())
}

/// Estimate of `Re` or `Im` of `tr(V)/2^N` from `shots` runs of the
/// one-clean-qubit circuit.
pub fn dqc1_trace(
    v: &Circuit,
    part: Part,
    shots: u64,
    mode: TraceMode,
    sampler: &Sampler,
) -> Result<f64> {
    check_statevector_capacity(v.num_qubits() + 1)?;
    if shots == 0 {
        return Err(Error::InvalidArgument("shot count must be positive".into()));
    }
    let seed = sampler.seed();
    let call = match part {
        Part::Re => 0,
        Part::Im => 1,
    };
    let total = ordered_block_sum(sampler, shots, |b, len| {
        let mut rng = stream_rng(DQC1_DOMAIN, seed, call, b);
        let mut acc = 0.0;
        for _ in 0..len {
            acc += trace_shot(v, part, mode, &mut rng)?;
        }
        Ok(acc)
    })?;
    Ok(total / shots as f64)
}

/// Exact `Re` or `Im` of `tr(V)/2^N` by running every basis state once.
pub fn dqc1_trace_exhaustive(v: &Circuit, part: Part) -> Result<f64> {
    check_statevector_capacity(v.num_qubits() + 1)?;
    let dim = 1usize << v.num_qubits();
    let mut acc = 0.0;
    for x in 0..dim {
        acc += clean_qubit_expectation(v, x, part)?;
    }
    Ok(acc / dim as f64)
}

/// Compiled per-step program for the complex-β estimator.
#[derive(Debug, Clone)]
struct StepProgram {
    num_qubits: usize,
    nu: u64,
    imaginary: Vec<ImaginaryGadget>,
    real: Vec<Circuit>,
    /// `ln(B / 2^N)` excluding identity terms.
    ln_scale: f64,
    /// `e^{-β h_0}` from identity terms.
    scalar: Complex64,
}

impl StepProgram {
    fn new(h: &PauliHamiltonian, plan: &TrotterPlan) -> Result<Self> {
        let nu = plan.nu as f64;
        let mut imaginary = Vec::new();
        let mut real = Vec::new();
        let mut ln_scale = 0.0;
        let mut scalar_exp = Complex64::new(0.0, 0.0);
        for (j, t) in h.terms().iter().enumerate() {
            let c = plan.imag_exponents[j];
            let a = plan.real_angles[j];
            if t.pauli.is_identity() {
                scalar_exp += Complex64::new(c, a) * nu;
                continue;
            }
            if c != 0.0 {
                let g = build_imaginary_gadget(c, &t.pauli)?;
                ln_scale += g.split.scale.ln() * nu;
                imaginary.push(g);
            }
            if a != 0.0 {
                real.push(build_real_gadget(-a, &t.pauli)?);
            }
        }
        Ok(StepProgram {
            num_qubits: h.num_qubits(),
            nu: plan.nu,
            imaginary,
            real,
            ln_scale,
            scalar: scalar_exp.exp(),
        })
    }

    fn bound(&self) -> f64 {
        2f64.powi(self.num_qubits as i32) * self.ln_scale.exp()
    }

    /// `V` for one sampled imaginary-time path.
    fn sample_circuit<R: Rng + ?Sized>(&self, rng: &mut R) -> Circuit {
        let mut gates = Vec::new();
        for _ in 0..self.nu {
            for g in &self.imaginary {
                let pauli = rng.random::<f64>() < g.split.p_pauli;
                gates.extend(g.branch(pauli).gates().iter().cloned());
            }
            for r in &self.real {
                gates.extend(r.gates().iter().cloned());
            }
        }
        Circuit::new(self.num_qubits, gates).expect("gadgets are valid")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexEstimateReport {
    pub estimate: Complex64,
    pub beta: InverseTemperature,
    pub eps_a: f64,
    pub eps_at: f64,
    pub eps_as: f64,
    pub delta: f64,
    pub mode: TraceMode,
    /// Shots spent on each of the real and imaginary parts.
    pub shots_per_part: u64,
    pub shots_used: u64,
    /// Bound on `|shot|` for each part, identity scalar included.
    pub shot_bound: f64,
    /// `e^{-β h_0}` from identity terms.
    pub identity_scalar: Complex64,
    pub plan: TrotterPlan,
    pub seed: u64,
    pub notes: Vec<String>,
}

/// Additive-error estimate of `Z = tr(exp(-βH))` for complex β by simulating
/// the one-clean-qubit algorithm. The budget is split evenly between Trotter
/// and sampling error; each of the real and imaginary parts gets
/// `⌈4 B² ln(4/δ) / ε_aS²⌉` shots.
pub fn dqc1_partition_complex(
    h: &PauliHamiltonian,
    beta: InverseTemperature,
    eps_a: f64,
    delta: f64,
    mode: TraceMode,
    sampler: &Sampler,
) -> Result<ComplexEstimateReport> {
    let plan = plan_trotter_additive(h, beta, eps_a / 2.0)?;
    dqc1_partition_with_plan(h, &plan, eps_a, delta, mode, sampler)
}

/// As [`dqc1_partition_complex`] with a caller-supplied plan; `ε_a / 2` is
/// still reserved for sampling.
pub fn dqc1_partition_with_plan(
    h: &PauliHamiltonian,
    plan: &TrotterPlan,
    eps_a: f64,
    delta: f64,
    mode: TraceMode,
    sampler: &Sampler,
) -> Result<ComplexEstimateReport> {
    check_statevector_capacity(h.num_qubits() + 1)?;
    if !(eps_a > 0.0) || !eps_a.is_finite() {
        return Err(Error::InvalidArgument(format!("ε_a must be positive, got {eps_a}")));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::InvalidArgument(format!("δ must lie in (0, 1), got {delta}")));
    }
    if plan.imag_exponents.len() != h.len() {
        return Err(Error::InvalidArgument("plan does not match the Hamiltonian".into()));
    }
    let eps_as = eps_a / 2.0;
    let program = StepProgram::new(h, plan)?;
    let inner_bound = program.bound();
    let shot_bound = inner_bound * program.scalar.norm();
    let n = (4.0 * shot_bound * shot_bound * (4.0 / delta).ln() / (eps_as * eps_as)).ceil();
    if !(n <= MAX_SHOTS) {
        return Err(Error::BudgetInfeasible { required: n });
    }
    let shots = (n as u64).max(1);
    let seed = sampler.seed();

    let run_part = |part: Part, call: u64| {
        ordered_block_sum(sampler, shots, |b, len| {
            let mut rng = stream_rng(DQC1_DOMAIN, seed, call, b);
            let mut acc = 0.0;
            for _ in 0..len {
                let v = program.sample_circuit(&mut rng);
                acc += trace_shot(&v, part, mode, &mut rng)?;
            }
            Ok(acc)
        })
        .map(|s| inner_bound * s / shots as f64)
    };
    let re = run_part(Part::Re, 2)?;
    let im = run_part(Part::Im, 3)?;
    let estimate = program.scalar * Complex64::new(re, im);

    let mut notes = Vec::new();
    if plan.heuristic {
        notes.push("Trotter step count uses the unit-constant heuristic".to_string());
    }
    if program.scalar != Complex64::new(1.0, 0.0) {
        notes.push("identity terms folded as an exact scalar".to_string());
    }
    Ok(ComplexEstimateReport {
        estimate,
        beta: plan.beta,
        eps_a,
        eps_at: eps_a - eps_as,
        eps_as,
        delta,
        mode,
        shots_per_part: shots,
        shots_used: 2 * shots,
        shot_bound,
        identity_scalar: program.scalar,
        plan: plan.clone(),
        seed,
        notes,
    })
}

/// Matrix of `|0⟩⟨0| ⊗ I + |1⟩⟨1| ⊗ V` built column by column with the
/// statevector kernel, clean qubit first.
pub fn controlled_matrix(v: &Circuit) -> Result<DenseOperator> {
    let n = v.num_qubits() + 1;
    check_statevector_capacity(n)?;
    let dim = 1usize << n;
    let mut m = nalgebra::DMatrix::zeros(dim, dim);
    for col in 0..dim {
        let mut state = StateVector::basis(n, col)?;
        for g in v.gates() {
            state.apply_controlled(0, g, 1)?;
        }
        for (row, a) in state.amplitudes().iter().enumerate() {
            m[(row, col)] = *a;
        }
    }
    Ok(DenseOperator::new(m))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GadgetCheckReport {
    pub max_qubits: usize,
    pub strings: usize,
    pub samples_per_string: usize,
    /// Max-norm error of `exp(-iθP)` gadgets.
    pub max_real_error: f64,
    /// Max-norm error of branch-weighted `exp(cP)` gadgets.
    pub max_imaginary_error: f64,
    /// Max-norm error of the branch-weighted gadget when every branch is
    /// controlled by a clean qubit, against `|0⟩⟨0| ⊗ I + |1⟩⟨1| ⊗ exp(cP)`.
    pub max_controlled_error: f64,
}

/// Compiles gadgets for every non-identity string on up to `max_qubits`
/// qubits with `samples` random `c ∈ [-3, 3]` and `θ ∈ [-π, π)` each and
/// compares them with dense exponentials. The controlled comparison covers
/// strings on up to three qubits.
pub fn gadget_soundness<R: Rng + ?Sized>(
    max_qubits: usize,
    samples: usize,
    rng: &mut R,
) -> Result<GadgetCheckReport> {
    check_capacity(max_qubits)?;
    let pi = std::f64::consts::PI;
    let mut report = GadgetCheckReport {
        max_qubits,
        strings: 0,
        samples_per_string: samples,
        max_real_error: 0.0,
        max_imaginary_error: 0.0,
        max_controlled_error: 0.0,
    };
    for n in 1..=max_qubits {
        for index in 1..1u64 << (2 * n) {
            let p = PauliString::from_index(n, index);
            report.strings += 1;
            for _ in 0..samples {
                let theta = rng.random_range(-pi..pi);
                let c = rng.random_range(-3.0..=3.0);
                let real = circuit_unitary(&build_real_gadget(theta, &p)?)?;
                let exact_real = pauli_exp(&p, Complex64::new(0.0, -theta));
                report.max_real_error = report.max_real_error.max(real.max_abs_diff(&exact_real));

                let g = build_imaginary_gadget(c, &p)?;
                let w = |a: f64| Complex64::new(a * g.split.scale, 0.0);
                let weighted = circuit_unitary(&g.identity_branch)?
                    .scale(w(g.split.p_identity))
                    .add(&circuit_unitary(&g.pauli_branch)?.scale(w(g.split.p_pauli)));
                let exact = pauli_exp(&p, Complex64::new(c, 0.0));
                report.max_imaginary_error = report.max_imaginary_error.max(weighted.max_abs_diff(&exact));

                if n <= 3 {
                    let w0 = Complex64::new(g.split.p_identity, 0.0);
                    let w1 = Complex64::new(g.split.p_pauli, 0.0);
                    let controlled = controlled_matrix(&g.identity_branch)?
                        .scale(w0)
                        .add(&controlled_matrix(&g.pauli_branch)?.scale(w1));
                    let dim = 1usize << n;
                    let target = exact.scale(Complex64::new((-c.abs()).exp(), 0.0));
                    let mut block = nalgebra::DMatrix::identity(2 * dim, 2 * dim);
                    block
                        .view_mut((dim, dim), (dim, dim))
                        .copy_from(target.matrix());
                    let err = controlled.max_abs_diff(&DenseOperator::new(block));
                    report.max_controlled_error = report.max_controlled_error.max(err);
                }
            }
        }
    }
    Ok(report)
}
