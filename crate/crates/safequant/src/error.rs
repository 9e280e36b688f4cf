use thiserror::Error;

/// Errors surfaced by grid construction, scenario replay, campaigns, and IO.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected} {kind} coordinates, got {got}")]
    DimensionMismatch {
        kind: &'static str,
        expected: usize,
        got: usize,
    },

    #[error("state outside the operational state space: {0}")]
    OutOfSpace(String),

    #[error("covering set is empty")]
    EmptyCovering,

    #[error("grid needs {needed} cells, exceeding the capacity limit of {limit}")]
    CapacityExceeded { needed: u128, limit: usize },

    #[error("cell already holds a centroid")]
    CellOccupied,

    #[error("invalid specification: {0}")]
    InvalidSpec(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("all compared sets are empty")]
    AllSetsEmpty,

    #[error("sets live on different grids: {0}")]
    GridMismatch(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
