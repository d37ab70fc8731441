use std::path::PathBuf;

use thiserror::Error;

/// Errors raised by the model, estimator, strategies and backtester.
#[derive(Debug, Error)]
pub enum Error {
    /// A value lies outside the domain of the function (nonpositive price, NaN, ...).
    #[error("domain error: {0}")]
    Domain(String),

    /// A caller broke a documented precondition (wrong length, misaligned input, ...).
    #[error("contract violation: {0}")]
    Contract(String),

    #[error("not enough data: need {needed} trading days, have {available}")]
    InsufficientData { needed: usize, available: usize },

    /// Signal-to-noise ratio requested for a series whose noise is identically zero.
    #[error("degenerate signal-to-noise ratio: noise RMS is zero")]
    DegenerateRatio,

    #[error("{path}: row {row}: {message}")]
    Load {
        path: PathBuf,
        row: usize,
        message: String,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn load(path: impl Into<PathBuf>, row: usize, message: impl Into<String>) -> Self {
        Error::Load {
            path: path.into(),
            row,
            message: message.into(),
        }
    }
}
