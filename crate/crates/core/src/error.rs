use thiserror::Error;

/// Errors shared across the solvers and checkers.
#[derive(Debug, Error)]
pub enum W2Error {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    #[error("invalid measure: {0}")]
    InvalidMeasure(String),

    #[error("grid geometry mismatch: {0}")]
    GeometryMismatch(String),

    #[error("instance too large: {size} exceeds cap {cap}")]
    InstanceTooLarge { size: usize, cap: usize },

    #[error("terminal count {0} outside supported range 2..=6")]
    KTooLarge(usize),

    #[error("heat step dt={dt} violates stability bound {bound}")]
    UnstableStep { dt: f64, bound: f64 },

    #[error("edge has near-zero displacement, angle undefined")]
    ZeroDisplacement,

    #[error("interior linear system is singular")]
    SingularInnerSolve,

    #[error("linear program is infeasible (phase-1 objective {0})")]
    Infeasible(f64),

    #[error("linear program is unbounded")]
    Unbounded,

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),

    #[error("{0}")]
    Other(String),
}

pub type Result<T> = std::result::Result<T, W2Error>;
