use thiserror::Error;

use crate::io::FormatError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("invalid histogram spec: {0}")]
    InvalidSpec(String),

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("sample {index} ({value}) lies outside [{lower}, {upper}]")]
    OutOfRange {
        index: usize,
        value: f64,
        lower: f64,
        upper: f64,
    },

    #[error("non-finite value {value} at position {index}")]
    NonFinite { index: usize, value: f64 },

    #[error("PMF supports differ")]
    SupportMismatch,

    #[error("bin {bin} has zero q-mass under nonzero p-mass (use smoothing > 0)")]
    ZeroReferenceMass { bin: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("series is constant")]
    ConstantSeries,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error(transparent)]
    Format(#[from] FormatError),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
