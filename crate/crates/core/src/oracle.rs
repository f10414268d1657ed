//! Dense-matrix ground truth.
//!
//! Everything here works on explicit `2^N × 2^N` matrices and is meant for
//! small registers: exact partition functions by Hermitian eigendecomposition,
//! exact Trotter products, spectral norms, and empirical checks of the
//! Trotter error bounds.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, Gate, Matrix2};
use crate::error::{Error, Result};
use crate::hamiltonian::{
    plan_trotter_additive, plan_trotter_multiplicative, InverseTemperature, PauliHamiltonian,
    TrotterPlan,
};
use crate::pauli::{Letter, PauliString, PhasedPauli};

/// Largest register the dense routines accept.
pub const DENSE_CAPACITY: usize = 12;

const EIGEN_EPS: f64 = 1e-14;
const EIGEN_MAX_ITER: usize = 10_000;

fn zero() -> Complex64 {
    Complex64::new(0.0, 0.0)
}

fn one() -> Complex64 {
    Complex64::new(1.0, 0.0)
}

pub fn check_capacity(num_qubits: usize) -> Result<()> {
    if num_qubits > DENSE_CAPACITY {
        return Err(Error::Capacity {
            qubits: num_qubits,
            limit: DENSE_CAPACITY,
        });
    }
    Ok(())
}

/// A square complex matrix of dimension `2^N`.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseOperator(DMatrix<Complex64>);

impl DenseOperator {
    pub fn new(m: DMatrix<Complex64>) -> Self {
        assert!(m.is_square() && m.nrows().is_power_of_two(), "dimension must be a power of two");
        DenseOperator(m)
    }

    pub fn identity(num_qubits: usize) -> Self {
        let d = 1usize << num_qubits;
        DenseOperator(DMatrix::identity(d, d))
    }

    pub fn from_diagonal(diag: &[Complex64]) -> Self {
        DenseOperator::new(DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(diag)))
    }

    pub fn matrix(&self) -> &DMatrix<Complex64> {
        &self.0
    }

    pub fn into_matrix(self) -> DMatrix<Complex64> {
        self.0
    }

    pub fn dim(&self) -> usize {
        self.0.nrows()
    }

    pub fn num_qubits(&self) -> usize {
        self.dim().trailing_zeros() as usize
    }

    pub fn trace(&self) -> Complex64 {
        self.0.trace()
    }

    pub fn adjoint(&self) -> DenseOperator {
        DenseOperator(self.0.adjoint())
    }

    pub fn mul(&self, rhs: &DenseOperator) -> DenseOperator {
        DenseOperator(&self.0 * &rhs.0)
    }

    pub fn scale(&self, s: Complex64) -> DenseOperator {
        DenseOperator(&self.0 * s)
    }

    pub fn add(&self, rhs: &DenseOperator) -> DenseOperator {
        DenseOperator(&self.0 + &rhs.0)
    }

    pub fn pow(&self, mut exponent: u64) -> DenseOperator {
        let mut result = DenseOperator::identity(self.num_qubits());
        let mut base = self.clone();
        while exponent > 0 {
            if exponent & 1 == 1 {
                result = result.mul(&base);
            }
            exponent >>= 1;
            if exponent > 0 {
                base = base.mul(&base);
            }
        }
        result
    }

    /// Largest entrywise modulus of `self - rhs`.
    pub fn max_abs_diff(&self, rhs: &DenseOperator) -> f64 {
        self.0
            .iter()
            .zip(rhs.0.iter())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }

    pub fn hermiticity_defect(&self) -> f64 {
        self.max_abs_diff(&self.adjoint())
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.0[(row, col)]
    }
}

fn letter_entry(letter: Letter, row: usize, col: usize) -> Complex64 {
    match (letter, row, col) {
        (Letter::I, r, c) if r == c => one(),
        (Letter::X, r, c) if r != c => one(),
        (Letter::Y, 0, 1) => Complex64::new(0.0, -1.0),
        (Letter::Y, 1, 0) => Complex64::new(0.0, 1.0),
        (Letter::Z, 0, 0) => one(),
        (Letter::Z, 1, 1) => -one(),
        _ => zero(),
    }
}

/// Non-zero entries of a Pauli string, one per row: `entries[row] = (col, value)`.
///
/// Each entry is the product of the single-qubit letter matrix elements, with
/// qubit 0 as the most significant index bit.
fn pauli_entries(p: &PauliString) -> Vec<(usize, Complex64)> {
    let n = p.num_qubits();
    let letters: Vec<Letter> = p.letters().collect();
    let flip = letters
        .iter()
        .enumerate()
        .filter(|(_, l)| matches!(l, Letter::X | Letter::Y))
        .fold(0usize, |acc, (q, _)| acc | 1 << (n - 1 - q));
    (0..1usize << n)
        .map(|row| {
            let col = row ^ flip;
            let value = letters.iter().enumerate().fold(one(), |acc, (q, &l)| {
                let shift = n - 1 - q;
                acc * letter_entry(l, (row >> shift) & 1, (col >> shift) & 1)
            });
            (col, value)
        })
        .collect()
}

/// Dense matrix of a Pauli string.
pub fn pauli_dense(p: &PauliString) -> DenseOperator {
    let d = 1usize << p.num_qubits();
    let mut m = DMatrix::zeros(d, d);
    for (row, (col, v)) in pauli_entries(p).into_iter().enumerate() {
        m[(row, col)] = v;
    }
    DenseOperator(m)
}

pub fn phased_pauli_dense(p: &PhasedPauli) -> DenseOperator {
    pauli_dense(p.pauli()).scale(p.phase_value())
}

/// `Σ_j h_j P_j` as a dense Hermitian matrix.
pub fn dense(h: &PauliHamiltonian) -> Result<DenseOperator> {
    check_capacity(h.num_qubits())?;
    let d = 1usize << h.num_qubits();
    let mut m = DMatrix::zeros(d, d);
    for t in h.terms() {
        for (row, (col, v)) in pauli_entries(&t.pauli).into_iter().enumerate() {
            m[(row, col)] += v * t.coeff;
        }
    }
    Ok(DenseOperator(m))
}

fn hermitian_eigen(m: &DenseOperator) -> Result<SymmetricEigen<Complex64, nalgebra::Dyn>> {
    SymmetricEigen::try_new(m.0.clone(), EIGEN_EPS, EIGEN_MAX_ITER).ok_or(Error::NonConvergence)
}

/// Eigenvalues of `dense(H)`, ascending.
pub fn eigenvalues(h: &PauliHamiltonian) -> Result<Vec<f64>> {
    let eig = hermitian_eigen(&dense(h)?)?;
    let mut ev: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    ev.sort_by(|a, b| a.total_cmp(b));
    Ok(ev)
}

/// `Z = tr exp(-βH) = Σ_i exp(-β λ_i)`, valid for complex β.
pub fn exact_partition(h: &PauliHamiltonian, beta: InverseTemperature) -> Result<Complex64> {
    let b = Complex64::new(beta.re, beta.im);
    Ok(eigenvalues(h)?.into_iter().map(|l| (-b * l).exp()).sum())
}

/// Real-β partition function.
pub fn exact_partition_real(h: &PauliHamiltonian, beta: f64) -> Result<f64> {
    Ok(exact_partition(h, InverseTemperature::real(beta))?.re)
}

/// `exp(s·H)` through the eigendecomposition of `dense(H)`.
pub fn hamiltonian_exp(h: &PauliHamiltonian, s: Complex64) -> Result<DenseOperator> {
    let eig = hermitian_eigen(&dense(h)?)?;
    let diag: Vec<Complex64> = eig.eigenvalues.iter().map(|&l| (s * l).exp()).collect();
    let v = &eig.eigenvectors;
    let d = DMatrix::from_diagonal(&nalgebra::DVector::from_vec(diag));
    Ok(DenseOperator(v * d * v.adjoint()))
}

/// `exp(c·P)` for a Pauli string, from `cosh(c) I + sinh(c) P`.
pub fn pauli_exp(p: &PauliString, c: Complex64) -> DenseOperator {
    let id = DenseOperator::identity(p.num_qubits());
    id.scale(c.cosh()).add(&pauli_dense(p).scale(c.sinh()))
}

/// Right-multiplies `m` in place by `cosh(c) I + sinh(c) P` without forming `P`.
fn right_mul_pauli_exp(m: &mut DMatrix<Complex64>, p: &PauliString, c: Complex64) {
    let (ch, sh) = (c.cosh(), c.sinh());
    let entries = pauli_entries(p);
    // (M P)[i][col] = M[i][row] P[row][col] where P[row][col] is the entry of row.
    let mut col_source = vec![(0usize, zero()); entries.len()];
    for (row, &(col, v)) in entries.iter().enumerate() {
        col_source[col] = (row, v);
    }
    let original = m.clone();
    for (col, &(row, v)) in col_source.iter().enumerate() {
        let scaled = v * sh;
        for i in 0..m.nrows() {
            m[(i, col)] = original[(i, col)] * ch + original[(i, row)] * scaled;
        }
    }
}

/// One imaginary-time step `∏_j exp(c_j P_j)` and one real-time step
/// `∏_j exp(i a_j P_j)`.
fn trotter_steps(h: &PauliHamiltonian, plan: &TrotterPlan) -> (DenseOperator, DenseOperator) {
    let d = 1usize << h.num_qubits();
    let mut imag = DMatrix::identity(d, d);
    let mut real = DMatrix::identity(d, d);
    for (j, t) in h.terms().iter().enumerate() {
        right_mul_pauli_exp(&mut imag, &t.pauli, Complex64::new(plan.imag_exponents[j], 0.0));
        right_mul_pauli_exp(&mut real, &t.pauli, Complex64::new(0.0, plan.real_angles[j]));
    }
    (DenseOperator(imag), DenseOperator(real))
}

#[derive(Debug, Clone)]
pub struct TrotterProduct {
    pub operator: DenseOperator,
    pub trace: Complex64,
}

fn check_plan(h: &PauliHamiltonian, plan: &TrotterPlan) -> Result<()> {
    check_capacity(h.num_qubits())?;
    if plan.imag_exponents.len() != h.len() || plan.real_angles.len() != h.len() {
        return Err(Error::InvalidArgument("plan does not match the Hamiltonian".into()));
    }
    Ok(())
}

/// `T_R T_I` with `T_R = [∏ exp(c_j P_j)]^ν`, `T_I = [∏ exp(i a_j P_j)]^ν`,
/// and its trace `Z_T`.
pub fn exact_trotter(h: &PauliHamiltonian, plan: &TrotterPlan) -> Result<TrotterProduct> {
    check_plan(h, plan)?;
    let (imag, real) = trotter_steps(h, plan);
    let operator = imag.pow(plan.nu).mul(&real.pow(plan.nu));
    let trace = operator.trace();
    Ok(TrotterProduct { operator, trace })
}

/// `[∏ exp(c_j P_j) · ∏ exp(i a_j P_j)]^ν`: the step-interleaved product the
/// DQC1 simulation implements.
pub fn exact_interleaved_trotter(h: &PauliHamiltonian, plan: &TrotterPlan) -> Result<TrotterProduct> {
    check_plan(h, plan)?;
    let (imag, real) = trotter_steps(h, plan);
    let operator = imag.mul(&real).pow(plan.nu);
    let trace = operator.trace();
    Ok(TrotterProduct { operator, trace })
}

/// Largest singular value (full SVD).
pub fn spectral_norm(m: &DenseOperator) -> Result<f64> {
    let sv = m
        .0
        .clone()
        .try_svd(false, false, EIGEN_EPS, EIGEN_MAX_ITER)
        .ok_or(Error::NonConvergence)?
        .singular_values;
    Ok(sv.iter().copied().fold(0.0, f64::max))
}

/// Largest singular value by power iteration on `M† M`. Independent of
/// [`spectral_norm`]; used to cross-check it.
pub fn spectral_norm_power(m: &DenseOperator, rel_tol: f64, max_iter: usize) -> Result<f64> {
    let gram = m.0.adjoint() * &m.0;
    let d = gram.nrows();
    // Deterministic start vector with no special alignment.
    let mut v = nalgebra::DVector::from_fn(d, |i, _| {
        Complex64::new(1.0 + (i as f64 * 0.618_033_988_75).fract(), 0.3 * (i as f64).sin())
    });
    v /= Complex64::new(v.norm(), 0.0);
    let mut lambda = 0.0;
    for _ in 0..max_iter {
        let w = &gram * &v;
        let norm = w.norm();
        if norm == 0.0 {
            return Ok(0.0);
        }
        let next = norm;
        v = w / Complex64::new(norm, 0.0);
        if (next - lambda).abs() <= rel_tol * next {
            return Ok(next.sqrt());
        }
        lambda = next;
    }
    Err(Error::NonConvergence)
}

/// Full unitary of a single gate embedded in an `n`-qubit register, built by
/// Kronecker products (qubit 0 leftmost).
pub fn gate_unitary(gate: &Gate, num_qubits: usize) -> DenseOperator {
    let m2 = |m: Matrix2| DMatrix::from_row_slice(2, 2, &[m[0][0], m[0][1], m[1][0], m[1][1]]);
    let id2 = DMatrix::<Complex64>::identity(2, 2);
    let kron_all = |factors: Vec<DMatrix<Complex64>>| {
        factors
            .into_iter()
            .fold(DMatrix::from_element(1, 1, one()), |acc, f| acc.kronecker(&f))
    };
    let target = gate.target();
    let u = m2(gate.target_matrix());
    match gate.control() {
        None => DenseOperator(kron_all(
            (0..num_qubits).map(|q| if q == target { u.clone() } else { id2.clone() }).collect(),
        )),
        Some(control) => {
            let p0 = m2([[one(), zero()], [zero(), zero()]]);
            let p1 = m2([[zero(), zero()], [zero(), one()]]);
            let off = kron_all(
                (0..num_qubits).map(|q| if q == control { p0.clone() } else { id2.clone() }).collect(),
            );
            let on = kron_all(
                (0..num_qubits)
                    .map(|q| match q {
                        q if q == control => p1.clone(),
                        q if q == target => u.clone(),
                        _ => id2.clone(),
                    })
                    .collect(),
            );
            DenseOperator(off + on)
        }
    }
}

/// Dense unitary of a circuit: product of its gate unitaries in application
/// order.
pub fn circuit_unitary(c: &Circuit) -> Result<DenseOperator> {
    check_capacity(c.num_qubits())?;
    Ok(c.gates().iter().fold(DenseOperator::identity(c.num_qubits()), |acc, g| {
        gate_unitary(g, c.num_qubits()).mul(&acc)
    }))
}

/// Doubles the unit-constant additive plan until the dense check
/// `|Z - tr(T_R T_I)| ≤ ε_aT` passes. Returns the plan and the factor applied
/// to the heuristic step count.
pub fn plan_trotter_additive_validated(
    h: &PauliHamiltonian,
    beta: InverseTemperature,
    eps_at: f64,
) -> Result<(TrotterPlan, u64)> {
    let base = plan_trotter_additive(h, beta, eps_at)?;
    let z = exact_partition(h, beta)?;
    let mut factor = 1u64;
    loop {
        let mut plan = TrotterPlan::with_steps(h, beta, base.nu * factor, base.mode, eps_at);
        let zt = exact_trotter(h, &plan)?.trace;
        if (z - zt).norm() <= eps_at {
            plan.heuristic = false;
            return Ok((plan, factor));
        }
        if factor >= 1 << 20 {
            return Err(Error::PlanInfeasible {
                what: "validated additive Trotter step count",
                magnitude: (base.nu * factor) as f64,
            });
        }
        factor *= 2;
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AdditiveCheck {
    pub nu: u64,
    pub eps_at: f64,
    pub z_trotter: Complex64,
    pub error: f64,
    /// `error · ν / (2^N |β|² Ω² e^{b_R Ω})`: the constant the unit-constant
    /// plan would have needed.
    pub implied_constant: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MultiplicativeCheck {
    pub nu: u64,
    pub eps_mt: f64,
    pub z_trotter: f64,
    pub relative_error: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TraceBoundCheck {
    pub nu: u64,
    /// `‖W_ν‖` with `W_ν = exp(+(β/ν) H) T_1`.
    pub w_norm: f64,
    /// `‖W_ν‖^ν - 1`.
    pub implied_eps: f64,
    pub z_trotter: f64,
    pub z: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoundsReport {
    pub beta: InverseTemperature,
    pub z_exact: Complex64,
    pub additive: AdditiveCheck,
    pub multiplicative: MultiplicativeCheck,
    pub trace_bound: TraceBoundCheck,
}

impl BoundsReport {
    pub fn all_hold(&self) -> bool {
        self.additive.holds && self.multiplicative.holds && self.trace_bound.holds
    }
}

/// Dense checks of the step-count bounds: (a) additive error at the
/// unit-constant complex-β plan, (b) relative error at the multiplicative
/// plan for `b_R`, and (c) `Z_T ≤ Z ‖W_ν‖^ν` at that same plan.
pub fn validate_bounds(
    h: &PauliHamiltonian,
    beta: InverseTemperature,
    eps_at: f64,
    eps_mt: f64,
) -> Result<BoundsReport> {
    check_capacity(h.num_qubits())?;
    let z_exact = exact_partition(h, beta)?;

    let add_plan = plan_trotter_additive(h, beta, eps_at)?;
    let z_add = exact_trotter(h, &add_plan)?.trace;
    let add_error = (z_exact - z_add).norm();
    let omega = h.omega();
    let scale = (h.num_qubits() as f64 * std::f64::consts::LN_2).exp()
        * beta.abs().powi(2)
        * omega
        * omega
        * (beta.re * omega).exp();
    let additive = AdditiveCheck {
        nu: add_plan.nu,
        eps_at,
        z_trotter: z_add,
        error: add_error,
        implied_constant: if scale > 0.0 { add_error * add_plan.nu as f64 / scale } else { 0.0 },
        holds: add_error <= eps_at,
    };

    let b = beta.re;
    let z_real = exact_partition_real(h, b)?;
    let mul_plan = plan_trotter_multiplicative(h, b, eps_mt)?;
    let (step, _) = trotter_steps(h, &mul_plan);
    let z_mul = step.pow(mul_plan.nu).trace().re;
    let rel = (z_real - z_mul).abs() / z_real;
    let multiplicative = MultiplicativeCheck {
        nu: mul_plan.nu,
        eps_mt,
        z_trotter: z_mul,
        relative_error: rel,
        holds: rel <= eps_mt,
    };

    let nu = mul_plan.nu as f64;
    let w = hamiltonian_exp(h, Complex64::new(b / nu, 0.0))?.mul(&step);
    let w_norm = spectral_norm(&w)?;
    let w_pow = w_norm.powf(nu);
    let trace_bound = TraceBoundCheck {
        nu: mul_plan.nu,
        w_norm,
        implied_eps: w_pow - 1.0,
        z_trotter: z_mul,
        z: z_real,
        holds: z_mul <= z_real * w_pow * (1.0 + 1e-12),
    };

    Ok(BoundsReport {
        beta,
        z_exact,
        additive,
        multiplicative,
        trace_bound,
    })
}
