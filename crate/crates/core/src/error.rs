use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid smoothing radius {delta} (must satisfy 0 <= delta < {inradius})")]
    InvalidSmoothingRadius { delta: f64, inradius: f64 },

    #[error("empirical distribution needs at least one sample")]
    EmptySample,

    #[error("non-finite value in input")]
    NonFinite,

    #[error("risk level {0} outside (0, 1]")]
    InvalidRiskLevel(f64),

    #[error("confidence parameter {0} outside (0, 2]")]
    InvalidConfidence(f64),

    #[error("batch size {0} is below the minimum of 2")]
    InvalidBatchSize(usize),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("variation budget {budget} must be positive and below the horizon {horizon}")]
    BudgetExceedsHorizon { budget: f64, horizon: usize },

    #[error("point outside the admissible domain: {0}")]
    Domain(String),

    #[error("environment error: {0}")]
    Environment(String),
}
