use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by estimators, scoring, simulation and file handling.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("correlation matrix is near-singular: smallest eigenvalue {min_eigenvalue:e} is below the floor {floor:e}")]
    NearSingular { min_eigenvalue: f64, floor: f64 },

    #[error("matrix is not positive definite: {0}")]
    NotPositiveDefinite(String),

    #[error("empirical correlation matrix has rank zero; fall back to diagonal scores (t or shrink-t)")]
    ZeroRank,

    #[error("{}: {message}", path.display())]
    Parse { path: PathBuf, message: String },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn parse(path: impl Into<PathBuf>, message: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            message: message.into(),
        }
    }

    /// True for failures of the numerical pipeline, as opposed to bad input data.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NearSingular { .. } | Error::NotPositiveDefinite(_) | Error::ZeroRank
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
