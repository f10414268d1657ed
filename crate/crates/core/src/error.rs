use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("illegal Pauli letter {letter:?} at position {position}")]
    IllegalLetter { letter: char, position: usize },

    #[error("empty Pauli string")]
    EmptyPauli,

    #[error("qubit count mismatch: {left} vs {right}")]
    QubitMismatch { left: usize, right: usize },

    #[error("invalid input: {0}")]
    Schema(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("plan infeasible: {what} (required magnitude {magnitude:e})")]
    PlanInfeasible { what: &'static str, magnitude: f64 },

    #[error("budget infeasible: {required:e} shots required")]
    BudgetInfeasible { required: f64 },

    #[error("partition function too small relative to Z_max after {rounds} rounds")]
    RoundCapExceeded { rounds: u32 },

    #[error("capacity exceeded: {qubits} qubits requested, limit is {limit}")]
    Capacity { qubits: usize, limit: usize },

    #[error("eigensolver did not converge")]
    NonConvergence,
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Schema(e.to_string())
    }
}
