use thiserror::Error;

use crate::geometry::GeometryError;

#[derive(Debug, Error)]
pub enum CollabError {
    #[error("unknown dataset {0:?}")]
    UnknownDataset(String),
    #[error("unknown atlas {0:?}")]
    UnknownAtlas(String),
    #[error("unknown session {0:?}")]
    UnknownSession(String),
    #[error("session full: all {0} colors in use")]
    SessionFull(usize),
    #[error("group {0} is full")]
    GroupFull(u32),
    #[error("unknown group {0}")]
    UnknownGroup(u32),
    #[error("{0:?} has not joined this session")]
    NotJoined(String),
    #[error("stale sequence number {seq} from {sender} (last accepted {last})")]
    StaleSequence { sender: String, seq: u64, last: u64 },
    #[error("unknown message type {0:?}")]
    UnknownType(String),
    #[error("invalid payload: {0}")]
    InvalidPayload(String),
    #[error("invalid contour: {0}")]
    InvalidContour(#[from] GeometryError),
    #[error("slice {slice} out of range (dataset has {slice_count})")]
    SliceOutOfRange { slice: u32, slice_count: u32 },
    #[error("stars must be 1..=5, got {0}")]
    InvalidStars(i64),
    #[error("participants cannot grade their own contours")]
    SelfGrading,
    #[error("no contours by {author:?} for structure {structure:?}")]
    UnknownTarget { author: String, structure: String },
    #[error("session has no atlas")]
    NoAtlas,
    #[error("atlas has no {structure:?} contour on slice {slice}")]
    NoAtlasEntry { slice: u32, structure: String },
    #[error("{0:?} is not a teacher")]
    NotTeacher(String),
    #[error("unknown structure {0:?}")]
    UnknownStructure(String),
    #[error("invalid identifier {0:?}")]
    InvalidId(String),
    #[error("storage failure: {0}")]
    Storage(String),
}

impl CollabError {
    /// Stable machine-readable code, used in `Error` envelopes and HTTP bodies.
    pub fn code(&self) -> &'static str {
        match self {
            Self::UnknownDataset(_) => "UnknownDataset",
            Self::UnknownAtlas(_) => "UnknownAtlas",
            Self::UnknownSession(_) => "UnknownSession",
            Self::SessionFull(_) => "SessionFull",
            Self::GroupFull(_) => "GroupFull",
            Self::UnknownGroup(_) => "UnknownGroup",
            Self::NotJoined(_) => "NotJoined",
            Self::StaleSequence { .. } => "StaleSequence",
            Self::UnknownType(_) => "UnknownType",
            Self::InvalidPayload(_) => "InvalidPayload",
            Self::InvalidContour(_) => "InvalidContour",
            Self::SliceOutOfRange { .. } => "SliceOutOfRange",
            Self::InvalidStars(_) => "InvalidStars",
            Self::SelfGrading => "SelfGrading",
            Self::UnknownTarget { .. } => "UnknownTarget",
            Self::NoAtlas => "NoAtlas",
            Self::NoAtlasEntry { .. } => "NoAtlasEntry",
            Self::NotTeacher(_) => "NotTeacher",
            Self::UnknownStructure(_) => "UnknownStructure",
            Self::InvalidId(_) => "InvalidId",
            Self::Storage(_) => "StorageFailure",
        }
    }
}

impl From<std::io::Error> for CollabError {
    fn from(e: std::io::Error) -> Self {
        Self::Storage(e.to_string())
    }
}

impl From<serde_json::Error> for CollabError {
    fn from(e: serde_json::Error) -> Self {
        Self::Storage(e.to_string())
    }
}

pub type Result<T, E = CollabError> = std::result::Result<T, E>;
