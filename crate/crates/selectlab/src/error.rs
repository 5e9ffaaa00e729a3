//! Crate-wide error type.

use std::fmt;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors reported by the library.
#[derive(Debug)]
pub enum Error {
    /// A model, optimizer, or experiment was configured inconsistently
    /// (dimension mismatches, non-positive learning rates, ...).
    Config(String),
    /// Input data violated a documented precondition (labels out of range,
    /// negative weights, empty classes, ...).
    Input(String),
    /// An API was driven incorrectly, e.g. a backward pass with a cache
    /// that does not match the model.
    Usage(String),
    /// A dataset or config file could not be parsed. `line` is 1-based.
    Parse {
        path: String,
        line: usize,
        message: String,
    },
    Io(std::io::Error),
}

impl Error {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub(crate) fn input(msg: impl Into<String>) -> Self {
        Error::Input(msg.into())
    }

    pub(crate) fn usage(msg: impl Into<String>) -> Self {
        Error::Usage(msg.into())
    }

    pub(crate) fn parse(path: impl Into<String>, line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            line,
            message: message.into(),
        }
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Config(msg) => write!(f, "configuration error: {msg}"),
            Error::Input(msg) => write!(f, "input error: {msg}"),
            Error::Usage(msg) => write!(f, "usage error: {msg}"),
            Error::Parse {
                path,
                line,
                message,
            } => write!(f, "parse error in {path} at line {line}: {message}"),
            Error::Io(err) => write!(f, "io error: {err}"),
        }
    }
}

impl std::error::Error for Error {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        match self {
            Error::Io(err) => Some(err),
            _ => None,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(err: std::io::Error) -> Self {
        Error::Io(err)
    }
}
