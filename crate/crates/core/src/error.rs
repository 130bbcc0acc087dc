use thiserror::Error;

/// Errors raised by the library and the analyzer.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected length {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid signature ({p},{q}): p + q must be at least 1")]
    InvalidSignature { p: usize, q: usize },

    #[error("unsupported dimension {m}: {reason}")]
    UnsupportedDimension { m: usize, reason: &'static str },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("symmetry validation failed: worst identity `{identity}` has residual {residual:e} (tolerance {tol:e})")]
    Validation {
        identity: &'static str,
        residual: f64,
        tol: f64,
    },

    #[error("projection did not converge after {iterations} sweeps (last residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("{cone} cone is empty for signature ({p},{q})")]
    InfeasibleCone {
        cone: &'static str,
        p: usize,
        q: usize,
    },

    #[error("sampler exhausted {attempts} attempts without filling the {cone} sample")]
    SamplerExhausted { cone: &'static str, attempts: usize },

    #[error("vector is null or zero: {0}")]
    Domain(String),

    #[error("integer overflow in exact elimination")]
    ExactOverflow,

    #[error("schema error at line {line}: {message}")]
    Schema { line: usize, message: String },

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
