use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("dimension n = {n} exceeds the limit {max}")]
    DimensionTooLarge { n: usize, max: usize },
    #[error("coordinate {i} out of range for n = {n}")]
    CoordinateOutOfRange { i: usize, n: usize },
    #[error("invalid band [{low}, {high}] for n = {n}")]
    InvalidBand { low: usize, high: usize, n: usize },
    #[error("invalid exponent: {0}")]
    InvalidExponent(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("unsupported target: {0}")]
    UnsupportedTarget(String),
    #[error("point {0} lies outside the domain")]
    OutsideDomain(String),
    #[error("point {0} lies on the domain boundary")]
    OnBoundary(String),
    #[error("degenerate input: {0}")]
    Degenerate(String),
    #[error("format error: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
