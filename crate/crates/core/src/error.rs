use thiserror::Error;

/// Errors raised by the operator-calculus routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("unsupported operation: {0}")]
    Capability(String),

    #[error("resolution too coarse: {0}")]
    Resolution(String),

    #[error("oscillatory integral did not converge: cauchy gap {gap:e} > tolerance {tol:e}")]
    Divergence { gap: f64, tol: f64 },

    #[error("invalid parameter: {0}")]
    Invalid(String),

    #[error("malformed grid file: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn dim_err<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Dimension(msg.into()))
}
