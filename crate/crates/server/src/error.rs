use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::Json;
use serde_json::json;
use slicelab_core::collab::CollabError;
use slicelab_core::tiler::TilerError;

/// Error answered over HTTP as `{"error": code, "message": text}`.
#[derive(Debug, thiserror::Error)]
pub enum ApiError {
    #[error(transparent)]
    Collab(#[from] CollabError),
    #[error(transparent)]
    Tiler(#[from] TilerError),
    #[error("{0}")]
    BadRequest(String),
    #[error("{0}")]
    NotFound(String),
}

pub fn collab_status(e: &CollabError) -> StatusCode {
    use CollabError::*;
    match e {
        UnknownDataset(_) | UnknownAtlas(_) | UnknownSession(_) | UnknownGroup(_) | UnknownTarget { .. }
        | UnknownStructure(_) | NoAtlas | NoAtlasEntry { .. } => StatusCode::NOT_FOUND,
        SessionFull(_) | GroupFull(_) | StaleSequence { .. } => StatusCode::CONFLICT,
        NotJoined(_) | NotTeacher(_) | SelfGrading => StatusCode::FORBIDDEN,
        UnknownType(_) | InvalidPayload(_) | InvalidContour(_) | SliceOutOfRange { .. } | InvalidStars(_)
        | InvalidId(_) => StatusCode::BAD_REQUEST,
        Storage(_) => StatusCode::INTERNAL_SERVER_ERROR,
    }
}

impl ApiError {
    pub fn status(&self) -> StatusCode {
        match self {
            Self::Collab(e) => collab_status(e),
            Self::Tiler(TilerError::NotFound(_)) | Self::NotFound(_) => StatusCode::NOT_FOUND,
            Self::Tiler(TilerError::MalformedPath(_)) | Self::BadRequest(_) => StatusCode::BAD_REQUEST,
            Self::Tiler(_) => StatusCode::INTERNAL_SERVER_ERROR,
        }
    }

    pub fn code(&self) -> &'static str {
        match self {
            Self::Collab(e) => e.code(),
            Self::Tiler(TilerError::NotFound(_)) | Self::NotFound(_) => "NotFound",
            Self::Tiler(TilerError::MalformedPath(_)) => "MalformedPath",
            Self::BadRequest(_) => "BadRequest",
            Self::Tiler(_) => "StorageFailure",
        }
    }
}

impl IntoResponse for ApiError {
    fn into_response(self) -> Response {
        let status = self.status();
        if status.is_server_error() {
            tracing::error!(error = %self, "request failed");
        }
        (status, Json(json!({ "error": self.code(), "message": self.to_string() }))).into_response()
    }
}
