//! Read-only tile service.

use axum::extract::{Path, State};
use axum::http::{header, HeaderMap, HeaderValue, StatusCode};
use axum::response::{IntoResponse, Response};
use sha2::{Digest, Sha256};
use slicelab_core::tiler::parse_tile_path;
use slicelab_core::collab::Hub;

use crate::error::ApiError;

fn cached(headers: &HeaderMap, etag: &str, content_type: &'static str, body: Vec<u8>) -> Response {
    let etag = HeaderValue::from_str(etag).expect("etag is ascii");
    let hit = headers
        .get(header::IF_NONE_MATCH)
        .and_then(|v| v.to_str().ok())
        .is_some_and(|v| v.split(',').any(|t| t.trim() == etag || t.trim() == "*"));
    if hit {
        return (StatusCode::NOT_MODIFIED, [(header::ETAG, etag)]).into_response();
    }
    (StatusCode::OK, [(header::ETAG, etag), (header::CONTENT_TYPE, HeaderValue::from_static(content_type))], body)
        .into_response()
}

pub async fn manifest(
    State(hub): State<Hub>,
    Path(id): Path<String>,
    headers: HeaderMap,
) -> Result<Response, ApiError> {
    let bytes = hub.tiles().manifest_bytes(&id)?;
    let etag = format!("\"{}\"", hex::encode(Sha256::digest(&bytes)));
    Ok(cached(&headers, &etag, "application/json", bytes))
}

pub async fn tile(
    State(hub): State<Hub>,
    Path((id, slice, zoom, file)): Path<(String, String, String, String)>,
    headers: HeaderMap,
) -> Result<Response, ApiError> {
    let addr = parse_tile_path(&slice, &zoom, &file)?;
    let manifest = hub.tiles().get_manifest(&id)?;
    manifest.check(addr)?;
    let bytes = hub.tiles().get_tile(&id, addr)?;
    let checksum = &manifest.checksums[addr.slice as usize];
    let etag = format!("\"{checksum}-{}-{}-{}\"", addr.zoom, addr.tx, addr.ty);
    Ok(cached(&headers, &etag, "image/png", bytes))
}
