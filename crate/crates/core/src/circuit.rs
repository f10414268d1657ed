//! Gate-level circuits over a small gate set closed under adjoint.
//!
//! Conventions: `RX(θ) = exp(-iθX/2)`, `RZ(φ) = diag(e^{-iφ/2}, e^{iφ/2})`,
//! and `CRZ(φ)` applies `RZ(φ)` to the target when the control is `|1⟩`.

use std::path::Path;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Matrix2 = [[Complex64; 2]; 2];

#[derive(Debug, Clone, PartialEq)]
pub enum Gate {
    H(usize),
    S(usize),
    Sdg(usize),
    X(usize),
    Y(usize),
    Z(usize),
    Rx(usize, f64),
    Rz(usize, f64),
    Cx { control: usize, target: usize },
    Crz { control: usize, target: usize, angle: f64 },
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

impl Gate {
    pub fn target(&self) -> usize {
        match *self {
            Gate::H(q) | Gate::S(q) | Gate::Sdg(q) | Gate::X(q) | Gate::Y(q) | Gate::Z(q) => q,
            Gate::Rx(q, _) | Gate::Rz(q, _) => q,
            Gate::Cx { target, .. } | Gate::Crz { target, .. } => target,
        }
    }

    pub fn control(&self) -> Option<usize> {
        match *self {
            Gate::Cx { control, .. } | Gate::Crz { control, .. } => Some(control),
            _ => None,
        }
    }

    pub fn qubits(&self) -> Vec<usize> {
        match self.control() {
            Some(ctrl) => vec![ctrl, self.target()],
            None => vec![self.target()],
        }
    }

    pub fn angle(&self) -> Option<f64> {
        match *self {
            Gate::Rx(_, a) | Gate::Rz(_, a) | Gate::Crz { angle: a, .. } => Some(a),
            _ => None,
        }
    }

    /// The 2×2 unitary applied to the target (conditioned on the control for
    /// controlled gates).
    pub fn target_matrix(&self) -> Matrix2 {
        let zero = c(0.0, 0.0);
        let one = c(1.0, 0.0);
        let h = std::f64::consts::FRAC_1_SQRT_2;
        match *self {
            Gate::H(_) => [[c(h, 0.0), c(h, 0.0)], [c(h, 0.0), c(-h, 0.0)]],
            Gate::S(_) => [[one, zero], [zero, c(0.0, 1.0)]],
            Gate::Sdg(_) => [[one, zero], [zero, c(0.0, -1.0)]],
            Gate::X(_) | Gate::Cx { .. } => [[zero, one], [one, zero]],
            Gate::Y(_) => [[zero, c(0.0, -1.0)], [c(0.0, 1.0), zero]],
            Gate::Z(_) => [[one, zero], [zero, c(-1.0, 0.0)]],
            Gate::Rx(_, theta) => {
                let (s, co) = (theta / 2.0).sin_cos();
                [[c(co, 0.0), c(0.0, -s)], [c(0.0, -s), c(co, 0.0)]]
            }
            Gate::Rz(_, phi) | Gate::Crz { angle: phi, .. } => {
                let half = phi / 2.0;
                [[Complex64::from_polar(1.0, -half), zero], [zero, Complex64::from_polar(1.0, half)]]
            }
        }
    }

    pub fn adjoint(&self) -> Gate {
        match *self {
            Gate::S(q) => Gate::Sdg(q),
            Gate::Sdg(q) => Gate::S(q),
            Gate::Rx(q, a) => Gate::Rx(q, -a),
            Gate::Rz(q, a) => Gate::Rz(q, -a),
            Gate::Crz { control, target, angle } => Gate::Crz { control, target, angle: -angle },
            ref g => g.clone(),
        }
    }

    fn validate(&self, num_qubits: usize) -> Result<()> {
        for q in self.qubits() {
            if q >= num_qubits {
                return Err(Error::Schema(format!(
                    "gate {} touches qubit {q} but the circuit has {num_qubits}",
                    self.kind()
                )));
            }
        }
        if self.control() == Some(self.target()) {
            return Err(Error::Schema(format!("{}: control equals target", self.kind())));
        }
        if let Some(a) = self.angle() {
            if !a.is_finite() {
                return Err(Error::Schema(format!("{}: non-finite angle", self.kind())));
            }
        }
        Ok(())
    }

    pub fn kind(&self) -> &'static str {
        match self {
            Gate::H(_) => "H",
            Gate::S(_) => "S",
            Gate::Sdg(_) => "SDG",
            Gate::X(_) => "X",
            Gate::Y(_) => "Y",
            Gate::Z(_) => "Z",
            Gate::Rx(..) => "RX",
            Gate::Rz(..) => "RZ",
            Gate::Cx { .. } => "CX",
            Gate::Crz { .. } => "CRZ",
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct RawGate {
    kind: String,
    qubits: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    angle: Option<f64>,
}

impl TryFrom<RawGate> for Gate {
    type Error = Error;

    fn try_from(raw: RawGate) -> Result<Gate> {
        let arity = |n: usize| -> Result<()> {
            if raw.qubits.len() != n {
                return Err(Error::Schema(format!(
                    "gate {} expects {n} qubit(s), got {}",
                    raw.kind,
                    raw.qubits.len()
                )));
            }
            Ok(())
        };
        let angle = || {
            raw.angle
                .ok_or_else(|| Error::Schema(format!("gate {} requires an angle", raw.kind)))
        };
        let q = &raw.qubits;
        let gate = match raw.kind.to_ascii_uppercase().as_str() {
            "H" => { arity(1)?; Gate::H(q[0]) }
            "S" => { arity(1)?; Gate::S(q[0]) }
            "SDG" => { arity(1)?; Gate::Sdg(q[0]) }
            "X" => { arity(1)?; Gate::X(q[0]) }
            "Y" => { arity(1)?; Gate::Y(q[0]) }
            "Z" => { arity(1)?; Gate::Z(q[0]) }
            "RX" => { arity(1)?; Gate::Rx(q[0], angle()?) }
            "RZ" => { arity(1)?; Gate::Rz(q[0], angle()?) }
            "CX" => { arity(2)?; Gate::Cx { control: q[0], target: q[1] } }
            "CRZ" => { arity(2)?; Gate::Crz { control: q[0], target: q[1], angle: angle()? } }
            other => return Err(Error::Schema(format!("unknown gate kind {other:?}"))),
        };
        Ok(gate)
    }
}

impl From<&Gate> for RawGate {
    fn from(g: &Gate) -> RawGate {
        RawGate {
            kind: g.kind().to_string(),
            qubits: g.qubits(),
            angle: g.angle(),
        }
    }
}

impl Serialize for Gate {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        RawGate::from(self).serialize(s)
    }
}

impl<'de> Deserialize<'de> for Gate {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        Gate::try_from(RawGate::deserialize(d)?).map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawCircuit")]
pub struct Circuit {
    num_qubits: usize,
    gates: Vec<Gate>,
}

#[derive(Deserialize)]
struct RawCircuit {
    num_qubits: usize,
    gates: Vec<Gate>,
}

impl TryFrom<RawCircuit> for Circuit {
    type Error = Error;

    fn try_from(raw: RawCircuit) -> Result<Circuit> {
        Circuit::new(raw.num_qubits, raw.gates)
    }
}

impl Circuit {
    pub fn new(num_qubits: usize, gates: Vec<Gate>) -> Result<Self> {
        if num_qubits == 0 {
            return Err(Error::Schema("circuit needs at least one qubit".into()));
        }
        for g in &gates {
            g.validate(num_qubits)?;
        }
        Ok(Circuit { num_qubits, gates })
    }

    pub fn empty(num_qubits: usize) -> Self {
        Circuit::new(num_qubits, Vec::new()).expect("non-empty register")
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn push(&mut self, gate: Gate) -> Result<()> {
        gate.validate(self.num_qubits)?;
        self.gates.push(gate);
        Ok(())
    }

    pub fn extend_from(&mut self, other: &Circuit) -> Result<()> {
        if other.num_qubits != self.num_qubits {
            return Err(Error::QubitMismatch {
                left: self.num_qubits,
                right: other.num_qubits,
            });
        }
        self.gates.extend(other.gates.iter().cloned());
        Ok(())
    }

    /// The adjoint circuit: gate order reversed, each gate replaced by its
    /// adjoint.
    pub fn dagger(&self) -> Circuit {
        Circuit {
            num_qubits: self.num_qubits,
            gates: self.gates.iter().rev().map(Gate::adjoint).collect(),
        }
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        Ok(serde_json::from_str(s)?)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("circuit serialization cannot fail")
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        let text = std::fs::read_to_string(path.as_ref())
            .map_err(|e| Error::Schema(format!("{}: {e}", path.as_ref().display())))?;
        Circuit::from_json_str(&text)
    }
}
