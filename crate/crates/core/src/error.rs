use thiserror::Error;

/// Errors raised by the numerical kernels.
#[derive(Debug, Error)]
pub enum Error {
    #[error("deformation parameters differ: {0} vs {1}")]
    ThetaMismatch(f64, f64),
    #[error("direction index must be 1 or 2, got {0}")]
    InvalidDirection(usize),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("operator is not hermitian (max |M - M^H| = {0:e})")]
    NotHermitian(f64),
    #[error("not invertible: {0}")]
    NotInvertible(String),
    #[error("ensemble is empty")]
    EmptyEnsemble,
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    #[error("too few samples: need {needed}, got {got}")]
    TooFewSamples { needed: usize, got: usize },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}
