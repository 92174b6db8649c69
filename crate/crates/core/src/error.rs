use thiserror::Error;

/// Errors shared by every module of the toolkit.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("precision mismatch: {0}")]
    PrecisionMismatch(String),
    /// Every coefficient vanished at the working precision.
    #[error("indeterminate: series is zero modulo p^{precision}")]
    Indeterminate { precision: u32 },
    #[error("precision exhausted for p = {p} at level {level}, precision {precision}")]
    PrecisionExhausted { p: u64, level: u32, precision: u32 },
    #[error("invalid prime {0}: {1}")]
    InvalidPrime(u64, &'static str),
    #[error("validation failed: {0}")]
    Validation(String),
    #[error("inconsistent input: {0}")]
    InconsistentInput(String),
    #[error("not a lattice: {0}")]
    NotALattice(String),
    #[error("level out of range: {0}")]
    Range(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("inconsistent presentation: {0}")]
    InconsistentPresentation(String),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
}

pub type Result<T> = std::result::Result<T, Error>;
