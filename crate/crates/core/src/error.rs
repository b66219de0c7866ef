use std::path::PathBuf;

use thiserror::Error;

/// Errors produced by node-set construction, fitting and evaluation.
#[derive(Debug, Error)]
pub enum Error {
    /// No node lies strictly inside the kernel support around `point`.
    #[error("no node within support radius {radius} of point {point:?}")]
    EmptySupport { point: Vec<f64>, radius: f64 },

    /// Several points of a batch were uncovered. Indices refer to the batch.
    #[error("{} evaluation point(s) have empty kernel support (first at index {})", .indices.len(), .indices[0])]
    UncoveredPoints { indices: Vec<usize>, points: Vec<Vec<f64>> },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("not enough points: need at least {needed}, got {got}")]
    TooFewPoints { needed: usize, got: usize },

    #[error("duplicate nodes at indices {0} and {1}")]
    DuplicateNodes(usize, usize),

    #[error("malformed input in {path}: {message}")]
    Malformed { path: PathBuf, message: String },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn malformed(path: impl Into<PathBuf>, message: impl Into<String>) -> Self {
        Error::Malformed {
            path: path.into(),
            message: message.into(),
        }
    }
}
