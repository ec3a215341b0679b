use thiserror::Error;

/// Errors raised across the workbench.
#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown robot version `{0}`")]
    UnknownVersion(String),
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("joint vector has length {got}, expected {expected}")]
    JointCountMismatch { expected: usize, got: usize },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("gait parameters inconsistent with robot model: {0}")]
    InconsistentGait(String),
    #[error("CPG mapping inconsistent with robot model: {0}")]
    InconsistentMapping(String),
    #[error("time step must be positive, got {0}")]
    NonPositiveStep(f64),
    #[error("backward pass requested without a recorded forward pass")]
    NoForwardPass,
    #[error("replay buffer holds {have} transitions, need at least {need}")]
    ColdBuffer { have: usize, need: usize },
    #[error("hybrid control requires a robot with a spinal joint")]
    SpinelessHybrid,
    #[error("horizon must be at least 1")]
    ZeroHorizon,
    #[error("cannot aggregate an empty metric list")]
    EmptyAggregate,
    #[error("missing checkpoint for `{version}`: {path}")]
    MissingCheckpoint { version: String, path: String },
    #[error("config line {line}: {msg}")]
    Config { line: usize, msg: String },
    #[error("checkpoint: {0}")]
    Checkpoint(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
