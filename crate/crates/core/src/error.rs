use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{}:{line}: {message}", path.display())]
    Load { path: PathBuf, line: usize, message: String },

    #[error("duplicate token {token:?} (line {line})")]
    DuplicateToken { token: String, line: usize },

    #[error("token {0:?} is not in the dictionary")]
    UnknownToken(String),

    #[error("word {0:?} has no lexicon tag")]
    Untagged(String),

    #[error("embedding of {0:?} is the zero vector")]
    ZeroColumn(String),

    #[error("{0}")]
    Domain(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("brute force refused: {count} candidate multisets exceed the limit of {limit}")]
    TooLarge { count: u128, limit: u128 },

    #[error("unknown solver {0:?}")]
    UnknownSolver(String),

    #[error("cannot access {}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }
}
