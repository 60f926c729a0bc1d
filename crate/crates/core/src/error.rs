//! Error type shared by every module of the crate.

use thiserror::Error;

/// Errors produced by tensor construction, contraction, series assembly,
/// the moment-problem checker, Monte Carlo estimation, and file parsing.
#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    #[error("multi-index has length {got}, tensor order is {expected}")]
    IndexLength { expected: usize, got: usize },

    #[error("index component {component} out of range 1..={dimension}")]
    IndexOutOfRange { component: u32, dimension: u32 },

    #[error("operation requires a matrix (order 2), tensor has order {order}")]
    NotAMatrix { order: usize },

    #[error("graph degree {degree} does not match tensor order {order}")]
    DegreeMismatch { degree: usize, order: usize },

    #[error("tensor dimension {tensor} does not match expected dimension {expected}")]
    DimensionMismatch { tensor: u32, expected: u32 },

    #[error("polynomial expansion exceeded the term cap ({terms} terms, cap {cap})")]
    TermCapExceeded { terms: usize, cap: usize },

    #[error("moment sequence is empty")]
    EmptySequence,

    #[error("moment sequence must start with a positive zeroth moment, got {leading}")]
    NonPositiveLeadingMoment { leading: String },

    #[error("moment-problem check requires exact rational values")]
    ExactValuesRequired,

    #[error("evaluation point must have nonzero imaginary part")]
    RealEvaluationPoint,

    #[error("sample count must be at least 2, got {samples}")]
    TooFewSamples { samples: u64 },

    #[error("log branch tracking failed: argument jumped by {jump:.4} rad between neighboring evaluation points")]
    BranchTracking { jump: f64 },

    #[error("line {line}: {message}")]
    TensorParse { line: usize, message: String },

    #[error("{0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;
