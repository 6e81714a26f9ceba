use thiserror::Error;

/// Errors produced by the optimisation core.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("series too short: {len} observations, need at least {need}")]
    ShortSeries { len: usize, need: usize },

    #[error("direction {direction} has {have} archived environments, need at least {need}")]
    InsufficientHistory {
        direction: usize,
        have: usize,
        need: usize,
    },

    #[error("no archived solution for direction {direction}")]
    EmptyHistory { direction: usize },

    #[error("decision variable {index} = {value} outside [{lower}, {upper}]")]
    OutOfBounds {
        index: usize,
        value: f64,
        lower: f64,
        upper: f64,
    },

    #[error("approximation set is empty")]
    EmptyApproximation,

    #[error("unknown problem: {0}")]
    UnknownProblem(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, Error>;
