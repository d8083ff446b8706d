//! A2A endpoint: agent card discovery, health, and a message endpoint that
//! answers JSON unary requests or streams fragments as server-sent events
//! when the client asks for `text/event-stream`.

use std::sync::Arc;

use agentwire_core::codec::{canonical_bytes, A2aCodec, Codec};
use agentwire_core::{Envelope, Protocol};
use axum::extract::State;
use axum::http::{header, HeaderMap, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde_json::{json, Value};

use super::{error_response, serve, HttpServerCore, RunningServer, ServerConfig};
use crate::handler::AgentHandler;
use crate::sse::{format_done, format_event, SSE_CONTENT_TYPE};

struct A2aState {
    core: HttpServerCore,
}

pub async fn spawn_a2a(
    cfg: ServerConfig,
    handler: Arc<dyn AgentHandler>,
) -> std::io::Result<RunningServer> {
    let state = Arc::new(A2aState { core: HttpServerCore::new(&cfg, handler) });
    let app = Router::new()
        .route("/.well-known/agent.json", get(agent_card))
        .route("/health", get(health))
        .route("/message", post(message))
        .with_state(state);
    serve(app).await
}

async fn agent_card(State(st): State<Arc<A2aState>>) -> Json<Value> {
    Json(json!({
        "protocol": "a2a",
        "protocolVersion": "1.0",
        "name": st.core.agent_id,
        "capabilities": ["request_response", "streaming", "artifact_refs"],
        "endpoints": {"message": "/message"},
    }))
}

async fn health(State(st): State<Arc<A2aState>>) -> Json<Value> {
    Json(json!({"status": "ok", "agent": st.core.agent_id}))
}

fn wants_stream(headers: &HeaderMap) -> bool {
    headers
        .get(header::ACCEPT)
        .and_then(|v| v.to_str().ok())
        .is_some_and(|v| v.contains(SSE_CONTENT_TYPE))
}

/// Builds the full event-stream body: one data event per reply fragment,
/// closed by the `done` event.
fn stream_body(st: &A2aState, request: &Envelope) -> Result<String, Response> {
    let chunks = st.core.handler.stream(request).map_err(|e| st.core.handler_error_response(&e))?;
    let mut body = String::new();
    for content in chunks {
        let reply = st.core.factory.lock().unwrap().reply_to(request, content);
        let doc = A2aCodec
            .encode_reply(&reply)
            .map_err(|e| error_response(StatusCode::INTERNAL_SERVER_ERROR, &e))?;
        body.push_str(&format_event(None, &String::from_utf8_lossy(&canonical_bytes(&doc))));
    }
    body.push_str(&format_done());
    Ok(body)
}

async fn message(
    State(st): State<Arc<A2aState>>,
    headers: HeaderMap,
    Json(doc): Json<Value>,
) -> Response {
    let request = match A2aCodec.decode(&doc) {
        Ok(e) => e,
        Err(e) => return error_response(StatusCode::BAD_REQUEST, &e),
    };
    if let Err(denied) = st.core.vet(&doc, Protocol::A2a) {
        return denied;
    }
    if wants_stream(&headers) {
        return match stream_body(&st, &request) {
            Ok(body) => {
                ([(header::CONTENT_TYPE, SSE_CONTENT_TYPE)], body).into_response()
            }
            Err(resp) => resp,
        };
    }
    let key = request.context.idempotency_key.clone();
    if let Some(cached) = st.core.replay.lookup(&key, st.core.now()) {
        return Json(cached).into_response();
    }
    let reply = match st.core.reply_for(&request) {
        Ok(r) => r,
        Err(e) => return st.core.handler_error_response(&e),
    };
    match A2aCodec.encode_reply(&reply) {
        Ok(out) => {
            st.core.replay.store(&key, st.core.now(), out.clone());
            Json(out).into_response()
        }
        Err(e) => error_response(StatusCode::INTERNAL_SERVER_ERROR, &e),
    }
}
