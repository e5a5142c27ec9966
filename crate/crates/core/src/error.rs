use std::io;

use thiserror::Error;

/// Errors produced by the library and the command-line front end.
#[derive(Debug, Error)]
pub enum Error {
    /// A model, alphabet or option was constructed with inconsistent values.
    #[error("configuration error: {0}")]
    Config(String),

    /// Input data referenced something the model does not know about.
    #[error("input error: {0}")]
    Input(String),

    /// A text file could not be parsed.
    #[error("{path}:{line}: {message}")]
    Parse {
        path: String,
        line: usize,
        message: String,
    },

    /// Estimation could not proceed (empty or unusable data, zero totals).
    #[error("training error: {0}")]
    Training(String),

    /// A model is degenerate for the requested translation.
    #[error("degenerate model: {0}")]
    Degenerate(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}

impl Error {
    /// Process exit code: 1 for input problems, 2 for numerical or training failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Training(_) | Error::Degenerate(_) => 2,
            _ => 1,
        }
    }

    pub(crate) fn parse(path: &str, line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            path: path.to_string(),
            line,
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
