use std::path::PathBuf;

/// Errors produced by the library.
///
/// `Io`, `Parse`, `Invalid` and `Config` describe bad inputs; `NonFinite`
/// reports a numerical failure at runtime (training diverged). Callers that
/// need to distinguish "the user gave us garbage" from "the computation blew
/// up" can use [`Error::is_usage`].
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("{0}")]
    Invalid(String),

    #[error("config {pointer}: {message}")]
    Config { pointer: String, message: String },

    #[error("non-finite loss at epoch {epoch}, batch {batch}; the learning rate is likely too high")]
    NonFinite { epoch: usize, batch: usize },
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    pub fn parse(path: impl Into<PathBuf>, line: usize, message: impl Into<String>) -> Self {
        Error::Parse { path: path.into(), line, message: message.into() }
    }

    pub fn invalid(message: impl Into<String>) -> Self {
        Error::Invalid(message.into())
    }

    pub fn config(pointer: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config { pointer: pointer.into(), message: message.into() }
    }

    /// True when the error stems from invalid input rather than a runtime
    /// failure. The CLI maps usage errors to exit code 2 and the rest to 1.
    pub fn is_usage(&self) -> bool {
        !matches!(self, Error::NonFinite { .. })
    }
}

pub type Result<T> = std::result::Result<T, Error>;
