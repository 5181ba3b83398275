use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid kernel: {0}")]
    InvalidKernel(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("resource budget exceeded: {0}")]
    Budget(String),

    #[error("green particle left the safety window at time {time} (half-width {half_width})")]
    WindowBreach { time: f64, half_width: i64 },

    #[error("infeasible constants: {0}")]
    Infeasible(String),

    #[error("event log does not cover [{from}, {to})")]
    IncompleteLog { from: f64, to: f64 },

    #[error("out of range: {0}")]
    OutOfRange(String),

    #[error("malformed input: {0}")]
    Parse(String),

    #[error("i/o error at {path}: {source}")]
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

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
