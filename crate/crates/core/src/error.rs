use std::io;

use thiserror::Error;

/// Errors produced by the peeled-map pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("I/O error: {0}")]
    Io(#[from] io::Error),

    /// A file was readable but its contents are not in the expected format.
    #[error("malformed {kind} data: {reason}")]
    Format { kind: &'static str, reason: String },

    #[error("mesh has no valid faces")]
    EmptyMesh,

    #[error("point cloud is empty")]
    EmptyCloud,

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("stack carries no RGB layers")]
    MissingRgb,

    /// A value violates a documented precondition.
    #[error("invalid {what}: {reason}")]
    Invalid { what: &'static str, reason: String },
}

impl Error {
    pub(crate) fn format(kind: &'static str, reason: impl Into<String>) -> Self {
        Error::Format {
            kind,
            reason: reason.into(),
        }
    }

    pub(crate) fn invalid(what: &'static str, reason: impl Into<String>) -> Self {
        Error::Invalid {
            what,
            reason: reason.into(),
        }
    }

    /// True for failures that stem from reading or writing files, including
    /// files whose bytes could not be decoded.
    pub fn is_io(&self) -> bool {
        matches!(self, Error::Io(_) | Error::Format { .. })
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
