//! WebSocket transport: one JSON envelope per text frame in each direction.

use std::collections::BTreeSet;

use axum::extract::ws::{Message, WebSocket, WebSocketUpgrade};
use axum::extract::State;
use axum::response::Response;
use futures::{SinkExt, StreamExt};
use slicelab_core::collab::{CollabError, Hub, MessageEnvelope, MessageType, SessionState};
use tokio::sync::mpsc::unbounded_channel;
use tracing::debug;

pub async fn upgrade(State(hub): State<Hub>, ws: WebSocketUpgrade) -> Response {
    ws.on_upgrade(move |socket| connection(hub, socket))
}

async fn connection(hub: Hub, socket: WebSocket) {
    let (mut sink, mut stream) = socket.split();
    let (tx, mut rx) = unbounded_channel::<String>();
    let writer = tokio::spawn(async move {
        while let Some(text) = rx.recv().await {
            if sink.send(Message::Text(text.into())).await.is_err() {
                break;
            }
        }
        let _ = sink.close().await;
    });

    // Identities bound to this connection by successful joins.
    let mut bound: BTreeSet<(String, String)> = BTreeSet::new();
    while let Some(Ok(msg)) = stream.next().await {
        let text = match msg {
            Message::Text(t) => t,
            Message::Close(_) => break,
            _ => continue,
        };
        let env = match MessageEnvelope::from_json(text.as_str()) {
            Ok(env) => env,
            Err(e) => {
                let err = CollabError::InvalidPayload(format!("frame is not an envelope: {e}"));
                let _ = tx.send(SessionState::error_envelope("", &err).to_json());
                continue;
            }
        };
        if hub.dispatch(&env, &tx).is_ok() {
            let key = (env.session_id.clone(), env.sender_id.clone());
            match env.kind() {
                Some(MessageType::JoinSession) => {
                    bound.insert(key);
                }
                Some(MessageType::LeaveSession) => {
                    bound.remove(&key);
                }
                _ => {}
            }
        }
    }
    for (session, pid) in &bound {
        debug!(%session, participant = %pid, "connection closed");
        hub.disconnect(session, pid, &tx);
    }
    drop(tx);
    let _ = writer.await;
}
