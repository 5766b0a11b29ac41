use thiserror::Error;

/// Errors raised by spaces, operators and the iteration engines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("points belong to different spaces")]
    SpaceMismatch,

    #[error("non-finite value at index {index}")]
    NonFinite { index: usize },

    #[error("invalid space: {0}")]
    InvalidSpace(String),

    #[error("infeasible set: {0}")]
    Infeasible(String),

    #[error("point coincides with anchor {index} (distance {distance:e})")]
    Singularity { index: usize, distance: f64 },

    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
