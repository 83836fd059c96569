use thiserror::Error;

#[derive(Error, Debug)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid path: {0}")]
    InvalidPath(String),
    #[error("degenerate class weights")]
    DegenerateWeights,
    #[error("unstable adjacency matrix (spectral radius {0:.6} >= 1)")]
    UnstableAdjacency(f64),
    #[error("infeasible scenario: {0}")]
    InfeasibleScenario(String),
    #[error("empty dataset")]
    EmptyDataset,
    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
