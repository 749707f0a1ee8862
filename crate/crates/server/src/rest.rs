//! Session REST endpoints.

use axum::body::Bytes;
use axum::extract::{Path, State};
use axum::http::{header, HeaderValue, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::Json;
use serde::de::DeserializeOwned;
use serde::Deserialize;
use serde_json::{json, Value};
use slicelab_core::collab::{CreateSession, Hub, JoinRequest};
use slicelab_core::geometry::Contour;

use crate::error::ApiError;

fn parse<T: DeserializeOwned>(body: &[u8]) -> Result<T, ApiError> {
    serde_json::from_slice(body).map_err(|e| ApiError::BadRequest(format!("request body: {e}")))
}

pub async fn create_session(State(hub): State<Hub>, body: Bytes) -> Result<Response, ApiError> {
    let req: CreateSession = parse(&body)?;
    let id = hub.create_session(&req)?;
    Ok((StatusCode::CREATED, Json(json!({ "session_id": id }))).into_response())
}

#[derive(Deserialize)]
struct JoinBody {
    participant_id: String,
    #[serde(flatten)]
    request: JoinRequest,
}

pub async fn join(State(hub): State<Hub>, Path(id): Path<String>, body: Bytes) -> Result<Response, ApiError> {
    let b: JoinBody = parse(&body)?;
    let p = hub.join(&id, &b.participant_id, &b.request)?;
    Ok((StatusCode::CREATED, Json(p)).into_response())
}

pub async fn snapshot(State(hub): State<Hub>, Path(id): Path<String>) -> Result<Json<Value>, ApiError> {
    Ok(Json(hub.snapshot(&id)?))
}

pub async fn persist(State(hub): State<Hub>, Path(id): Path<String>) -> Result<Response, ApiError> {
    Ok(Json(hub.persist_snapshot(&id)?).into_response())
}

pub async fn commit_contour(State(hub): State<Hub>, Path(id): Path<String>, body: Bytes) -> Result<Response, ApiError> {
    let text = std::str::from_utf8(&body).map_err(|_| ApiError::BadRequest("request body is not UTF-8".into()))?;
    let contour = Contour::from_json(text).map_err(slicelab_core::collab::CollabError::from)?;
    let outcome = hub.commit_contour(&id, contour)?;
    Ok((StatusCode::CREATED, Json(outcome)).into_response())
}

pub async fn mesh_obj(
    State(hub): State<Hub>,
    Path((id, label)): Path<(String, String)>,
) -> Result<Response, ApiError> {
    let (version, obj) = hub
        .mesh_obj(&id, &label)?
        .ok_or_else(|| ApiError::NotFound(format!("structure {label:?} has no mesh yet")))?;
    let etag = HeaderValue::from_str(&format!("\"{version}\"")).expect("ascii");
    Ok((
        [(header::CONTENT_TYPE, HeaderValue::from_static("model/obj")), (header::ETAG, etag)],
        obj,
    )
        .into_response())
}

#[derive(Deserialize)]
struct GradeBody {
    grader_id: String,
    author_id: String,
    structure_label: String,
    stars: i64,
}

pub async fn grade(State(hub): State<Hub>, Path(id): Path<String>, body: Bytes) -> Result<Response, ApiError> {
    let b: GradeBody = parse(&body)?;
    let summary = hub.grade(&id, &b.grader_id, &b.author_id, &b.structure_label, b.stars)?;
    Ok(Json(summary).into_response())
}

#[derive(Deserialize)]
struct AssignmentBody {
    teacher_id: String,
    structures: Vec<String>,
}

pub async fn assignments(State(hub): State<Hub>, Path(id): Path<String>, body: Bytes) -> Result<Response, ApiError> {
    let b: AssignmentBody = parse(&body)?;
    hub.set_assignments(&id, &b.teacher_id, b.structures)?;
    Ok(StatusCode::NO_CONTENT.into_response())
}

pub async fn accuracy(
    State(hub): State<Hub>,
    Path((id, contour_id)): Path<(String, String)>,
) -> Result<Response, ApiError> {
    let dice = hub.accuracy(&id, &contour_id)?;
    Ok(Json(json!({ "contour_id": contour_id, "dice": dice })).into_response())
}
