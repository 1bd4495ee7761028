use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("domain mismatch: {0}")]
    DomainMismatch(String),
    #[error("invalid measure: {0}")]
    InvalidMeasure(String),
    #[error("non-finite value: {0}")]
    NonFinite(f64),
    #[error("exponent must be at least 1, got {0}")]
    InvalidExponent(f64),
    #[error("operation requires a scalar (n = 1) value, got n = {0}")]
    NotScalar(usize),
    #[error("continuity precondition violated: {0}")]
    Continuity(String),
    #[error("support exceeds basis interval [0, {limit}]: ends at {end}")]
    SupportExceeded { end: f64, limit: f64 },
    #[error("truncation too large: {size} > {max}")]
    TruncationTooLarge { size: usize, max: usize },
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
