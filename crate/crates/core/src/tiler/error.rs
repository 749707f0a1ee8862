use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum TilerError {
    #[error("no slice images found in {0}")]
    NoImages(PathBuf),
    #[error("{path}: expected {expected:?} px, found {found:?}")]
    MixedDimensions { path: PathBuf, expected: (u32, u32), found: (u32, u32) },
    #[error("{path}: {reason}")]
    UnreadableImage { path: PathBuf, reason: String },
    #[error("invalid ingest configuration: {0}")]
    InvalidConfig(String),
    #[error("memory budget exceeded: {requested} bytes requested with {resident} resident, budget {budget}")]
    MemoryBudgetExceeded { requested: usize, resident: usize, budget: usize },
    #[error("not found: {0}")]
    NotFound(String),
    #[error("malformed path: {0}")]
    MalformedPath(String),
    #[error("manifest: {0}")]
    Manifest(#[from] serde_json::Error),
    #[error("png encoding: {0}")]
    Encode(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = TilerError> = std::result::Result<T, E>;
