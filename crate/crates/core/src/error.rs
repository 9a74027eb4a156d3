use thiserror::Error;

use crate::polyhedra::Polyhedron;

/// Errors raised by the analysis pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("{0} does not accept strict constraints")]
    StrictUnsupported(&'static str),

    #[error("operation requires a non-empty polyhedron")]
    EmptyPolyhedron,

    #[error("parse error at {line}:{column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("update is not deterministic: {0}")]
    Nondeterministic(String),

    #[error("tuple is not a valid {kind} for the transition polyhedron")]
    InvalidTuple { kind: &'static str },

    #[error("tuple is not irredundant: component {component} can be dropped")]
    NotIrredundant { component: usize },

    #[error("integer hull gave up after {cuts} cuts")]
    CutLimitExceeded {
        cuts: usize,
        partial: Box<Polyhedron>,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("i/o error: {0}")]
    Io(String),

    #[error("certificate check failed: {0}")]
    Certificate(String),

    #[error("internal error: {0}")]
    Internal(String),
}

impl Error {
    pub(crate) fn parse(line: usize, column: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            line,
            column,
            message: message.into(),
        }
    }

    /// True for errors that indicate a bug or an unsound intermediate result
    /// rather than bad input.
    pub fn is_internal(&self) -> bool {
        matches!(self, Error::Certificate(_) | Error::Internal(_))
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
