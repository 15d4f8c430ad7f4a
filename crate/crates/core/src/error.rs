use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Errors raised by models, sources, the codec and the experiment harness.
#[derive(Debug, Error)]
pub enum Error {
    #[error("alphabet size must be at least 2, got {0}")]
    InvalidAlphabet(usize),

    #[error("letter {letter} out of range for alphabet of size {size}")]
    LetterOutOfRange { letter: usize, size: usize },

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("parameter out of domain: {0}")]
    Domain(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("model capacity exceeded: {consumed} letters seen, capacity {capacity}")]
    Capacity { consumed: u64, capacity: u64 },

    #[error("letter {letter} has zero coding mass at position {position}")]
    Unencodable { letter: usize, position: usize },

    #[error("malformed stream: {0}")]
    Format(String),

    #[error("truncated stream: {0}")]
    Truncated(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
