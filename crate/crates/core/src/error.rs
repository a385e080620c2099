use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{msg} at line {line}")]
    Parse { line: usize, msg: String },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("empty subset")]
    EmptySubset,

    #[error("class {class} has {count} samples, at least {required} required")]
    ClassTooSmall {
        class: u8,
        count: usize,
        required: usize,
    },

    #[error("ground truth lacks class {0}")]
    MissingClass(u8),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("no operating point reaches sensitivity {0}")]
    NoOperatingPoint(f64),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            msg: msg.into(),
        }
    }
}
