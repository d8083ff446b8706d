//! Agora endpoint: hash-addressed routine dispatch with natural-language
//! fallback, plus conversation threads keyed by conversation id.
//!
//! A routine document is plain text; its identity is the SHA-256 hex of
//! the exact bytes. A task naming a registered hash runs that routine; an
//! unknown hash falls back to the task's `fallback_text` when present and
//! is otherwise a protocol-level error.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use agentwire_core::codec::{AgoraCodec, Codec};
use agentwire_core::{PalError, Protocol};
use axum::extract::{Path, State};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use super::{error_response, serve, HttpServerCore, RunningServer, ServerConfig};
use crate::handler::AgentHandler;

#[derive(Clone, Debug)]
pub struct Routine {
    pub name: String,
    pub doc: String,
}

/// Identity of a routine document: SHA-256 hex over its exact bytes.
pub fn routine_hash(doc: &str) -> String {
    hex::encode(Sha256::digest(doc.as_bytes()))
}

struct AgoraState {
    core: HttpServerCore,
    routines: HashMap<String, Routine>,
    conversations: Mutex<HashMap<String, u64>>,
}

pub async fn spawn_agora(
    cfg: ServerConfig,
    handler: Arc<dyn AgentHandler>,
    routines: Vec<Routine>,
) -> std::io::Result<RunningServer> {
    let routines = routines.into_iter().map(|r| (routine_hash(&r.doc), r)).collect();
    let state = Arc::new(AgoraState {
        core: HttpServerCore::new(&cfg, handler),
        routines,
        conversations: Mutex::new(HashMap::new()),
    });
    let app = Router::new()
        .route("/.well-known", get(well_known))
        .route("/agora", post(task))
        .route("/conversations/{conversation_id}", post(conversation))
        .with_state(state);
    serve(app).await
}

async fn well_known(State(st): State<Arc<AgoraState>>) -> Json<Value> {
    let mut hashes: Vec<&String> = st.routines.keys().collect();
    hashes.sort();
    Json(json!({
        "protocol": "agora",
        "name": st.core.agent_id,
        "supported_hashes": hashes,
    }))
}

/// Dispatch outcome for the hash binding: which path served the task.
fn served_by(st: &AgoraState, doc: &Value) -> Result<&'static str, PalError> {
    match doc.get("protocol_hash").and_then(Value::as_str) {
        Some(h) if st.routines.contains_key(h) => Ok("routine"),
        Some(h) => {
            if doc.get("fallback_text").and_then(Value::as_str).is_some() {
                Ok("fallback")
            } else {
                Err(PalError::protocol(format!("unknown protocol hash '{h}'")))
            }
        }
        None => Ok("natural"),
    }
}

fn run_task(st: &AgoraState, doc: &Value) -> Response {
    let request = match AgoraCodec.decode(doc) {
        Ok(e) => e,
        Err(e) => return error_response(StatusCode::BAD_REQUEST, &e),
    };
    if let Err(denied) = st.core.vet(doc, Protocol::Agora) {
        return denied;
    }
    let key = request.context.idempotency_key.clone();
    if let Some(cached) = st.core.replay.lookup(&key, st.core.now()) {
        return Json(cached).into_response();
    }
    let mode = match served_by(st, doc) {
        Ok(m) => m,
        // Unknown hash without fallback text: an in-protocol error status,
        // not an HTTP failure, so clients surface E_PROTOCOL.
        Err(e) => {
            return Json(json!({"status": "error", "body": e.detail})).into_response();
        }
    };
    let reply = match st.core.reply_for(&request) {
        Ok(r) => r,
        Err(e) => return st.core.handler_error_response(&e),
    };
    let mut out = match AgoraCodec.encode_reply(&reply) {
        Ok(v) => v,
        Err(e) => return error_response(StatusCode::INTERNAL_SERVER_ERROR, &e),
    };
    out["served_by"] = json!(mode);
    if let Some(cid) = doc["metadata"].get("conversation_id").and_then(Value::as_str) {
        let mut convs = st.conversations.lock().unwrap();
        let round = convs.entry(cid.to_string()).or_insert(0);
        *round += 1;
        out["conversation_id"] = json!(cid);
        out["round"] = json!(*round);
    }
    st.core.replay.store(&key, st.core.now(), out.clone());
    Json(out).into_response()
}

async fn task(State(st): State<Arc<AgoraState>>, Json(doc): Json<Value>) -> Response {
    run_task(&st, &doc)
}

/// Continues an existing thread. Threads are opened by a task carrying
/// `metadata.conversation_id`; posting to an unknown id is 404.
async fn conversation(
    State(st): State<Arc<AgoraState>>,
    Path(conversation_id): Path<String>,
    Json(mut doc): Json<Value>,
) -> Response {
    if !st.conversations.lock().unwrap().contains_key(&conversation_id) {
        return error_response(
            StatusCode::NOT_FOUND,
            &PalError::protocol(format!("unknown conversation '{conversation_id}'")),
        );
    }
    if let Some(meta) = doc.get_mut("metadata").and_then(Value::as_object_mut) {
        meta.insert("conversation_id".into(), json!(conversation_id));
    }
    run_task(&st, &doc)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hash_is_sha256_hex_of_exact_bytes() {
        // Independently derived: sha256("order lookup routine v1").
        assert_eq!(
            routine_hash("order lookup routine v1"),
            "6efa49939df132999135dd029d292af97c8d33715742d2233a80d828c74259e5"
        );
        assert_ne!(routine_hash("a"), routine_hash("a "));
    }
}
