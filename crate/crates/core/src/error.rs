use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum CoreError {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("invalid bounds in dimension {dim}: lower {lower} must be < upper {upper}")]
    InvalidBounds { dim: usize, lower: f64, upper: f64 },
    #[error("bounds must have at least one dimension")]
    EmptyBounds,
    #[error("encoded component {index} = {value} outside [0, {max}]")]
    EncodedOutOfRange { index: usize, value: i64, max: i64 },
    #[error("record buffer is empty")]
    EmptyBuffer,
    #[error("generation {0} has no records")]
    EmptyGeneration(usize),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}
