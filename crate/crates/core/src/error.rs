use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A numeric argument fell outside its valid domain.
    #[error("{0}")]
    Domain(String),

    /// The caller combined arguments in a way the operation does not accept.
    #[error("usage error: {0}")]
    Usage(String),

    #[error("configuration error: {0}")]
    Config(String),

    /// Input data failed schema or referential checks. Every offending record is listed.
    #[error("validation failed:\n  {}", .0.join("\n  "))]
    Validation(Vec<String>),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: malformed JSON: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },

    #[error("image codec error: {0}")]
    Codec(String),

    /// Some work items failed; the rest completed.
    #[error("{} item(s) failed:\n  {}", .0.len(), .0.join("\n  "))]
    Partial(Vec<String>),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit status for this error: 1 validation/usage, 2 I/O, 3 partial failure.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Io { .. } | Error::Codec(_) => 2,
            Error::Partial(_) => 3,
            _ => 1,
        }
    }
}
