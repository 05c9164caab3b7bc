use thiserror::Error;

/// Errors raised by the solvers, oracles and experiment drivers.
#[derive(Debug, Error)]
pub enum FqnmError {
    #[error("non-finite value {value} where a finite real was required")]
    NonFinite { value: f64 },

    #[error("value {value} does not fit in a 64-bit integer state")]
    OutOfRange { value: f64 },

    #[error("quantisation resolution must be positive, got {0}")]
    InvalidResolution(f64),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("CFL number {nu} exceeds the admissible limit {limit}")]
    CflViolation { nu: f64, limit: f64 },

    #[error("flux split rejected: {0}")]
    InvalidSplit(String),

    #[error("integer overflow while updating cell {cell}")]
    Overflow { cell: usize },

    #[error("non-finite state at step {step}, cell {cell}")]
    NonFiniteState { step: usize, cell: usize },

    #[error("inadmissible Euler state in cell {cell}: {detail}")]
    Inadmissible { cell: usize, detail: String },

    #[error("star-pressure iteration did not converge after {iterations} iterations")]
    NoConvergence { iterations: usize },

    #[error("Riemann data generate vacuum")]
    Vacuum,

    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },

    #[error("invariant violated: {0}")]
    Invariant(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("csv output: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = FqnmError> = std::result::Result<T, E>;
