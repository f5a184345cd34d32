use thiserror::Error;

/// Errors shared by every layer of the library.
///
/// The variants line up with the harness exit codes: configuration problems,
/// malformed or invalid instances, capacity refusals of the exhaustive
/// routines, and contract violations on individual calls.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{0}")]
    Config(String),

    #[error("element {element} outside ground set of size {n}")]
    Domain { element: usize, n: usize },

    #[error("{0}")]
    Contract(String),

    #[error("{what} refuses n = {n} (limit {limit})")]
    Capacity {
        what: &'static str,
        n: usize,
        limit: usize,
    },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("invalid {field}: {message}")]
    Validation { field: String, message: String },

    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub(crate) fn validation(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Validation {
            field: field.into(),
            message: message.into(),
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
