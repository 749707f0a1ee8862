#![allow(dead_code)]

use std::path::Path;
use std::time::Duration;

use axum::body::Body;
use axum::http::{Request, Response, StatusCode};
use http_body_util::BodyExt;
use serde_json::{json, Value};
use slicelab_core::collab::{Hub, HubOptions};
use slicelab_core::tiler::{ingest_dataset, IngestConfig, IngestReport};
use tower::ServiceExt;

/// Ingests `count` grayscale `w`×`h` slices as dataset `id` under `root/datasets`.
pub fn dataset(root: &Path, id: &str, count: u32, w: u32, h: u32) -> IngestReport {
    let src = root.join(format!("src-{id}"));
    std::fs::create_dir_all(&src).unwrap();
    for s in 0..count {
        let img = image::GrayImage::from_fn(w, h, |x, y| image::Luma([((x * 7 + y * 3 + s * 11) % 256) as u8]));
        img.save(src.join(format!("slice{s}.png"))).unwrap();
    }
    let mut cfg = IngestConfig::new(&src, root.join("datasets"));
    cfg.dataset_id = Some(id.into());
    cfg.pixel_spacing = 0.5;
    ingest_dataset(&cfg).unwrap()
}

pub fn hub(root: &Path, debounce_ms: u64) -> Hub {
    Hub::new(HubOptions {
        store_dir: Some(root.join("store")),
        dataset_root: root.join("datasets"),
        palette_size: 24,
        debounce: Duration::from_millis(debounce_ms),
    })
    .unwrap()
}

pub async fn call(app: &axum::Router, method: &str, uri: &str, body: Option<Value>) -> Response<Body> {
    let req = Request::builder().method(method).uri(uri);
    let req = match body {
        Some(v) => req.header("content-type", "application/json").body(Body::from(v.to_string())),
        None => req.body(Body::empty()),
    };
    app.clone().oneshot(req.unwrap()).await.unwrap()
}

pub async fn bytes(resp: Response<Body>) -> Vec<u8> {
    resp.into_body().collect().await.unwrap().to_bytes().to_vec()
}

pub async fn json_of(resp: Response<Body>) -> (StatusCode, Value) {
    let status = resp.status();
    let b = bytes(resp).await;
    (status, serde_json::from_slice(&b).unwrap_or(Value::Null))
}

pub fn square(slice: u32, structure: &str, author: &str, x: f64, y: f64, side: f64) -> Value {
    json!({
        "slice": slice,
        "structure": structure,
        "author": author,
        "outer": [[x, y], [x + side, y], [x + side, y + side], [x, y + side]],
        "holes": []
    })
}
