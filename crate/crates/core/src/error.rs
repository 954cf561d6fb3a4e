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

    #[error("{path}: {message}")]
    Format { path: PathBuf, message: String },

    #[error("{path}: row {row}: {message}")]
    Row {
        path: PathBuf,
        row: usize,
        message: String,
    },

    #[error("{path}: duplicate image_id {id:?}")]
    DuplicateId { path: PathBuf, id: String },

    #[error("{path}: dimension mismatch: sidecar declares {width}x{height} ({expected} values) but file holds {found}")]
    DimensionMismatch {
        path: PathBuf,
        width: usize,
        height: usize,
        expected: usize,
        found: usize,
    },

    #[error("{path}: non-finite value at index {index}")]
    NonFinite { path: PathBuf, index: usize },

    #[error("{path}: unsupported attribution format: {reason}")]
    UnsupportedFormat { path: PathBuf, reason: String },

    #[error("invalid {what}: {message}")]
    Invalid { what: &'static str, message: String },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn invalid(what: &'static str, message: impl Into<String>) -> Self {
        Error::Invalid {
            what,
            message: message.into(),
        }
    }
}
