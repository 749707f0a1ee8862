use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeometryError {
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    #[error("loop is not simple: edges {0} and {1} intersect")]
    NonSimpleLoop(usize, usize),
    #[error("invalid contour: {0}")]
    InvalidContour(String),
    #[error("loop has no vertices")]
    EmptyLoop,
    #[error("cannot cap a loop that has holes")]
    CapUnsupported,
    #[error("need contours on at least two distinct slices, got {0}")]
    InsufficientContours(usize),
    #[error("contours carry different structure labels: {0:?} and {1:?}")]
    MixedStructureLabels(String, String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("malformed OBJ at line {line}: {reason}")]
    MalformedObj { line: usize, reason: String },
}

pub type Result<T, E = GeometryError> = std::result::Result<T, E>;
