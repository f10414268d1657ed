//! Partition-function estimation for Hamiltonians written as real linear
//! combinations of Pauli strings.

pub mod circuit;
pub mod dqc1;
pub mod error;
pub mod hamiltonian;
pub mod models;
pub mod oracle;
pub mod pauli;
pub mod reduction;
pub mod sampler;

pub use error::{Error, Result};
pub use hamiltonian::{InverseTemperature, PauliHamiltonian, Term, TrotterMode, TrotterPlan};
pub use pauli::{Letter, PauliString, PhasedPauli};
