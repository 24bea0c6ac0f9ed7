use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum TiltError {
    #[error("{path}: line {line}: {msg}")]
    Parse {
        path: PathBuf,
        line: u64,
        msg: String,
    },

    #[error("{0}: no data rows")]
    NoDataRows(PathBuf),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("invalid dataset: {0}")]
    InvalidDataset(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("no missing-outcome rows (n0 = 0)")]
    NoMissingRows,

    #[error("no observed-outcome rows (n1 = 0)")]
    NoObservedRows,

    #[error("degenerate classifier: {0}")]
    DegenerateClassifier(String),

    #[error("non-finite objective at iteration {iteration}")]
    NonFinite { iteration: usize },

    #[error("no linear oracle: the misspecified design has no exact exponential tilt")]
    NoLinearOracle,

    #[error("serialization error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, TiltError>;
