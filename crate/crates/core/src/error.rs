use thiserror::Error;

/// Errors produced by the library layer.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("empty input")]
    Empty,

    #[error("component {index} is negative ({value})")]
    NegativeComponent { index: usize, value: f64 },

    #[error("components sum to {sum}, which is not within 1e-6 of 1")]
    NotNormalized { sum: f64 },

    #[error("component {index} is not finite")]
    NonFinite { index: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("row {row} of the matrix sums to {sum}, not 1")]
    NotStochastic { row: usize, sum: f64 },

    #[error("search space of {required} candidates exceeds the size cap {cap}")]
    SizeCapExceeded { required: f64, cap: u64 },

    #[error("packing instance has no items or no bins")]
    EmptyInstance,

    #[error("packing result still has {0} overflowed items")]
    OverflowPresent(usize),

    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("degenerate input: {0}")]
    DegenerateInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
