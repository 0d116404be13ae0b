use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by the sensitivity pipeline and its harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("state became non-finite at step {step}")]
    NonFiniteState { step: usize },

    #[error("horizon {horizon} is not an integer multiple of dt = {dt}")]
    GridMismatch { horizon: f64, dt: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("unknown window `{0}` (expected square, sine, sine2, sine4 or bump)")]
    UnknownWindow(String),

    #[error("pivot block {block} is not positive definite")]
    NotPositiveDefinite { block: usize },

    #[error("least squares shadowing solve failed: {0}")]
    SolverFailure(#[source] Box<Error>),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("malformed trajectory csv: {0}")]
    TrajectoryFormat(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
