use thiserror::Error;

/// Errors produced by the simulator.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("non-physical state: {0}")]
    NonPhysical(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("unknown qubit label {label} (register has {n_qubits} qubits)")]
    UnknownQubit { label: usize, n_qubits: usize },

    #[error("invalid register: {0}")]
    Register(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("{what} exceeds the cap of {cap} ({got} requested)")]
    TooLarge { what: &'static str, cap: usize, got: usize },

    #[error("invalid superoperator: {0}")]
    InvalidMap(String),

    #[error("no density-matrix fixed point found: {0}")]
    NoFixedPoint(String),

    #[error("fixed-point selection failed: {0}")]
    Selection(String),

    #[error("Cesaro average did not converge after {iterations} iterations (last change {last_change:e})")]
    NoConvergence { iterations: usize, last_change: f64 },

    #[error("output is ambiguous: the consistency condition leaves {multiplicity} free parameter(s)")]
    Ambiguous { multiplicity: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("internal consistency check failed: {0}")]
    Consistency(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
