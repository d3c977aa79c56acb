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

    /// A malformed record in an input file. `line` is 1-based and counts the
    /// header row for CSV inputs.
    #[error("{path}:{line}: {message}")]
    Parse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("duplicate domain `{domain}` (first seen on line {first_line}, again on line {line})")]
    DuplicateDomain {
        domain: String,
        first_line: usize,
        line: usize,
    },

    #[error("invalid domain `{0}`: must be lowercase, contain a dot and no whitespace")]
    InvalidDomain(String),

    #[error("unknown unit tag `{0}`")]
    UnknownUnit(String),

    #[error("unknown domain `{0}`")]
    UnknownDomain(String),

    #[error("domain `{0}` is excluded from the batch")]
    ExcludedDomain(String),

    #[error("invalid configuration: {}", .0.join("; "))]
    InvalidConfig(Vec<String>),

    #[error("invalid window {start}..{end}: start must precede end")]
    InvalidWindow { start: String, end: String },

    #[error("configuration error: {0}")]
    Configuration(String),

    #[error("invalid submission: {0}")]
    InvalidSubmission(String),

    #[error("requested k = {k} but only {available} candidates are available")]
    NotEnoughCandidates { k: usize, available: usize },

    #[error("{0}")]
    Invalid(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(path: impl Into<PathBuf>, line: usize, message: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            line,
            message: message.into(),
        }
    }
}
