//! Reduction from estimating `Re/Im tr(σU)` for a circuit `U` to estimating
//! `Re tr(σH)` for a Hermitian combination `H = Σ c_i U_i` of circuits.
//!
//! `Re tr(σU) = Re tr(σ (U + U†)/2)` and `Im tr(σU) = Re tr(σ · i(U† - U)/2)`.
//! The transform is purely syntactic: it only needs the adjoint circuit.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::circuit::Circuit;
use crate::dqc1::Part;
use crate::error::{Error, Result};
use crate::oracle::{circuit_unitary, pauli_dense, DenseOperator};
use crate::pauli::PauliString;

/// Dense verification limit.
pub const REDUCTION_CAPACITY: usize = 10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct UDecompositionInstance {
    pub circuit: Circuit,
    pub sigma: PauliString,
    pub delta: f64,
    pub part: Part,
}

impl UDecompositionInstance {
    pub fn new(circuit: Circuit, sigma: PauliString, delta: f64, part: Part) -> Result<Self> {
        if sigma.num_qubits() != circuit.num_qubits() {
            return Err(Error::QubitMismatch {
                left: circuit.num_qubits(),
                right: sigma.num_qubits(),
            });
        }
        if !(delta > 0.0) || !delta.is_finite() {
            return Err(Error::InvalidArgument(format!("δ must be positive, got {delta}")));
        }
        Ok(UDecompositionInstance {
            circuit,
            sigma,
            delta,
            part,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct WeightedCircuit {
    pub coeff: Complex64,
    pub circuit: Circuit,
}

#[derive(Serialize, Deserialize)]
struct RawWeightedCircuit {
    coeff_re: f64,
    coeff_im: f64,
    circuit: Circuit,
}

impl Serialize for WeightedCircuit {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        RawWeightedCircuit {
            coeff_re: self.coeff.re,
            coeff_im: self.coeff.im,
            circuit: self.circuit.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for WeightedCircuit {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = RawWeightedCircuit::deserialize(d)?;
        Ok(WeightedCircuit {
            coeff: Complex64::new(raw.coeff_re, raw.coeff_im),
            circuit: raw.circuit,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HDecompositionInstance {
    pub terms: Vec<WeightedCircuit>,
    pub sigma: PauliString,
    pub delta: f64,
    pub part: Part,
}

impl HDecompositionInstance {
    pub fn from_json_str(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("instance serialization cannot fail")
    }

    /// `Σ c_i dense(U_i)`.
    pub fn dense(&self) -> Result<DenseOperator> {
        let n = self.sigma.num_qubits();
        check(n)?;
        let mut acc: Option<DenseOperator> = None;
        for t in &self.terms {
            let m = circuit_unitary(&t.circuit)?.scale(t.coeff);
            acc = Some(match acc {
                None => m,
                Some(a) => a.add(&m),
            });
        }
        Ok(acc.unwrap_or_else(|| DenseOperator::identity(n).scale(Complex64::new(0.0, 0.0))))
    }
}

fn check(n: usize) -> Result<()> {
    if n > REDUCTION_CAPACITY {
        return Err(Error::Capacity {
            qubits: n,
            limit: REDUCTION_CAPACITY,
        });
    }
    Ok(())
}

/// `Re → {(1/2, U), (1/2, U†)}`, `Im → {(-i/2, U), (i/2, U†)}`; the output
/// always asks for the real part.
pub fn reduce(u: &UDecompositionInstance) -> HDecompositionInstance {
    let (a, b) = match u.part {
        Part::Re => (Complex64::new(0.5, 0.0), Complex64::new(0.5, 0.0)),
        Part::Im => (Complex64::new(0.0, -0.5), Complex64::new(0.0, 0.5)),
    };
    HDecompositionInstance {
        terms: vec![
            WeightedCircuit {
                coeff: a,
                circuit: u.circuit.clone(),
            },
            WeightedCircuit {
                coeff: b,
                circuit: u.circuit.dagger(),
            },
        ],
        sigma: u.sigma.clone(),
        delta: u.delta,
        part: Part::Re,
    }
}

/// `tr(σU) / 2^N`.
pub fn pauli_coefficient(u: &Circuit, sigma: &PauliString) -> Result<Complex64> {
    if sigma.num_qubits() != u.num_qubits() {
        return Err(Error::QubitMismatch {
            left: u.num_qubits(),
            right: sigma.num_qubits(),
        });
    }
    check(u.num_qubits())?;
    let m = pauli_dense(sigma).mul(&circuit_unitary(u)?);
    Ok(m.trace() / (1u64 << u.num_qubits()) as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReductionReport {
    pub trace_sigma_u: Complex64,
    /// `Re tr(σ (U + U†)/2)`.
    pub re_side: f64,
    /// `Re tr(σ i(U† - U)/2)`.
    pub im_side: f64,
    /// `Re tr(σ H)` for the instance `reduce` emits.
    pub reduced_value: f64,
    /// The quantity the original instance asks for.
    pub target_value: f64,
    /// Largest of the three absolute discrepancies.
    pub max_discrepancy: f64,
    /// `max |H - H†|` over entries of the reduced operator.
    pub hermiticity_defect: f64,
}

/// Dense check of both identities and of the emitted instance.
pub fn verify_reduction(u: &UDecompositionInstance) -> Result<ReductionReport> {
    let n = u.circuit.num_qubits();
    check(n)?;
    let sigma = pauli_dense(&u.sigma);
    let m = circuit_unitary(&u.circuit)?;
    let md = m.adjoint();
    let tr = sigma.mul(&m).trace();
    let half = Complex64::new(0.5, 0.0);
    let re_side = sigma.mul(&m.add(&md).scale(half)).trace().re;
    let anti = md.add(&m.scale(Complex64::new(-1.0, 0.0)));
    let im_side = sigma.mul(&anti.scale(Complex64::new(0.0, 0.5))).trace().re;

    let reduced = reduce(u).dense()?;
    let reduced_value = sigma.mul(&reduced).trace().re;
    let target_value = match u.part {
        Part::Re => tr.re,
        Part::Im => tr.im,
    };
    let max_discrepancy = (re_side - tr.re)
        .abs()
        .max((im_side - tr.im).abs())
        .max((reduced_value - target_value).abs());
    Ok(ReductionReport {
        trace_sigma_u: tr,
        re_side,
        im_side,
        reduced_value,
        target_value,
        max_discrepancy,
        hermiticity_defect: reduced.hermiticity_defect(),
    })
}
