//! HTTP front end: the dataset tile service, session REST endpoints and the WebSocket
//! message transport, all backed by one [`Hub`].

mod error;
mod rest;
mod tiles;
mod ws;

use std::future::Future;

use axum::routing::{get, post};
use axum::Router;
use slicelab_core::collab::{Hub, HubOptions, ServerConfig};
use tokio::net::TcpListener;

pub use error::{collab_status, ApiError};

pub fn router(hub: Hub) -> Router {
    Router::new()
        .route("/datasets/{id}/manifest.json", get(tiles::manifest))
        .route("/datasets/{id}/slices/{slice}/{zoom}/{file}", get(tiles::tile))
        .route("/sessions", post(rest::create_session))
        .route("/sessions/{id}/participants", post(rest::join))
        .route("/sessions/{id}/snapshot", get(rest::snapshot).post(rest::persist))
        .route("/sessions/{id}/contours", post(rest::commit_contour))
        .route("/sessions/{id}/contours/{contour_id}/accuracy", get(rest::accuracy))
        .route("/sessions/{id}/structures/{label}/mesh.obj", get(rest::mesh_obj))
        .route("/sessions/{id}/grades", post(rest::grade))
        .route("/sessions/{id}/assignments", post(rest::assignments))
        .route("/ws", get(ws::upgrade))
        .with_state(hub)
}

/// Serves `hub` on `listener` until `shutdown` resolves.
pub async fn serve(
    listener: TcpListener,
    hub: Hub,
    shutdown: impl Future<Output = ()> + Send + 'static,
) -> std::io::Result<()> {
    axum::serve(listener, router(hub)).with_graceful_shutdown(shutdown).await
}

/// Binds the configured address, restores stored sessions and serves until `shutdown`.
pub async fn run(config: &ServerConfig, shutdown: impl Future<Output = ()> + Send + 'static) -> anyhow::Result<()> {
    let hub = Hub::new(HubOptions::from(config))?;
    let listener = TcpListener::bind(config.listen).await?;
    tracing::info!(addr = %listener.local_addr()?, "listening");
    serve(listener, hub, shutdown).await?;
    Ok(())
}
