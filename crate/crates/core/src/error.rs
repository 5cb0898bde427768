use std::path::PathBuf;

/// Errors produced by simulation, model construction and training.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A structural parameter (qubit count, layer count, grid) is unusable.
    #[error("configuration error: {0}")]
    Config(String),

    #[error("index {index} out of range for {len} qubits")]
    Index { index: usize, len: usize },

    /// Inputs are individually well-formed but inconsistent with each other.
    #[error("validation error: {0}")]
    Validation(String),

    #[error("relative energy error undefined: {0}")]
    UndefinedMeasure(String),

    #[error("i/o error at {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed config: {0}")]
    Json(#[from] serde_json::Error),

    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub(crate) fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }

    /// True for errors caused by user input rather than runtime failure.
    pub fn is_config_error(&self) -> bool {
        matches!(self, Error::Config(_) | Error::Json(_))
    }
}
