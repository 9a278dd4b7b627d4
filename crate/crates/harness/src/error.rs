use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] dnasim_core::Error),
    #[error("segment {index}: {source}")]
    Segment {
        index: usize,
        #[source]
        source: dnasim_core::Error,
    },
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("comparison needs both mrs and random selection modes")]
    MissingModes,
}

pub type Result<T> = std::result::Result<T, HarnessError>;
