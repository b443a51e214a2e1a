use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{field} = {value} is out of range (allowed: {bound})")]
    OutOfRange {
        field: String,
        value: String,
        bound: String,
    },

    #[error("failed to parse {path}: {message}")]
    Parse { path: PathBuf, message: String },

    /// Recruitment could not reach the requested sample size.
    #[error("process exhausted: {0}")]
    ProcessExhausted(String),

    #[error("node index {index} out of range for {len} nodes")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("sample is empty")]
    EmptySample,

    #[error("record {0} has a nonpositive reported degree")]
    NonPositiveDegree(usize),

    #[error("size mismatch: network has {network} nodes, population has {population}")]
    SizeMismatch { network: usize, population: usize },

    #[error("{failed} of {total} checks failed")]
    ChecksFailed { failed: usize, total: usize },

    #[error("missing slice: {0}")]
    MissingSlice(String),

    #[error("{path}:{line}: {message}")]
    Malformed {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn out_of_range(
        field: &str,
        value: impl std::fmt::Display,
        bound: impl Into<String>,
    ) -> Self {
        Error::OutOfRange {
            field: field.to_string(),
            value: value.to_string(),
            bound: bound.into(),
        }
    }

    /// Process exit code used by the command-line tool.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::OutOfRange { .. } | Error::Parse { .. } => 2,
            Error::Io { .. } | Error::Malformed { .. } => 4,
            _ => 3,
        }
    }
}
