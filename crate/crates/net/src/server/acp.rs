//! ACP endpoint: manifest and capability discovery, a message endpoint
//! (unary or SSE), and a session-keyed job-status resource that walks
//! pending, running, then committed or aborted.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use agentwire_core::codec::{canonical_bytes, AcpCodec, Codec};
use agentwire_core::{Envelope, PalError, Protocol};
use axum::extract::{Query, State};
use axum::http::{header, HeaderMap, StatusCode};
use axum::response::{IntoResponse, Response};
use axum::routing::{get, post};
use axum::{Json, Router};
use serde_json::{json, Value};

use super::{error_response, serve, HttpServerCore, RunningServer, ServerConfig};
use crate::handler::AgentHandler;
use crate::sse::{format_done, format_event, SSE_CONTENT_TYPE};

/// Fraction of a job's duration spent in `pending` before it starts.
const PENDING_FRACTION: f64 = 0.25;

struct Job {
    submitted_at: f64,
    duration: f64,
    fail: bool,
}

impl Job {
    fn state(&self, now: f64) -> &'static str {
        let elapsed = now - self.submitted_at;
        if self.duration > 0.0 && elapsed < self.duration * PENDING_FRACTION {
            "pending"
        } else if elapsed < self.duration {
            "running"
        } else if self.fail {
            "aborted"
        } else {
            "committed"
        }
    }
}

struct AcpState {
    core: HttpServerCore,
    jobs: Mutex<HashMap<String, Job>>,
}

pub async fn spawn_acp(
    cfg: ServerConfig,
    handler: Arc<dyn AgentHandler>,
) -> std::io::Result<RunningServer> {
    let state = Arc::new(AcpState {
        core: HttpServerCore::new(&cfg, handler),
        jobs: Mutex::new(HashMap::new()),
    });
    let app = Router::new()
        .route("/.well-known/agent.json", get(manifest))
        .route("/acp/capabilities", get(capabilities))
        .route("/acp/status", get(status))
        .route("/acp/message", post(message))
        .with_state(state);
    serve(app).await
}

async fn manifest(State(st): State<Arc<AcpState>>) -> Json<Value> {
    Json(json!({
        "protocol": "acp",
        "name": st.core.agent_id,
        "endpoints": {
            "capabilities": "/acp/capabilities",
            "message": "/acp/message",
            "status": "/acp/status",
        },
    }))
}

async fn capabilities() -> Json<Value> {
    Json(json!({
        "capabilities": [
            "rest_resource", "idempotent_ops", "job_status",
            "streaming", "async_first", "request_response",
        ],
    }))
}

async fn status(
    State(st): State<Arc<AcpState>>,
    Query(params): Query<HashMap<String, String>>,
) -> Response {
    let Some(session_id) = params.get("session_id") else {
        return error_response(
            StatusCode::BAD_REQUEST,
            &PalError::protocol("status query requires session_id"),
        );
    };
    let jobs = st.jobs.lock().unwrap();
    match jobs.get(session_id) {
        Some(job) => Json(json!({
            "session_id": session_id,
            "state": job.state(st.core.now()),
        }))
        .into_response(),
        None => error_response(
            StatusCode::NOT_FOUND,
            &PalError::protocol(format!("unknown session '{session_id}'")),
        ),
    }
}

/// A message carrying a session id registers a job keyed by that session.
/// Duration and outcome come from the content's `job_seconds` and
/// `job_fail` fields; without them the job commits immediately.
fn register_job(st: &AcpState, request: &Envelope) {
    let Some(session) = &request.context.session_id else { return };
    let duration = request.content.get("job_seconds").and_then(Value::as_f64).unwrap_or(0.0);
    let fail = request.content.get("job_fail").and_then(Value::as_bool).unwrap_or(false);
    st.jobs
        .lock()
        .unwrap()
        .insert(session.clone(), Job { submitted_at: st.core.now(), duration, fail });
}

fn wants_stream(headers: &HeaderMap) -> bool {
    headers
        .get(header::ACCEPT)
        .and_then(|v| v.to_str().ok())
        .is_some_and(|v| v.contains(SSE_CONTENT_TYPE))
}

fn stream_body(st: &AcpState, request: &Envelope) -> Result<String, Response> {
    let chunks = st.core.handler.stream(request).map_err(|e| st.core.handler_error_response(&e))?;
    let mut body = String::new();
    for content in chunks {
        let reply = st.core.factory.lock().unwrap().reply_to(request, content);
        let doc = AcpCodec
            .encode_reply(&reply)
            .map_err(|e| error_response(StatusCode::INTERNAL_SERVER_ERROR, &e))?;
        body.push_str(&format_event(None, &String::from_utf8_lossy(&canonical_bytes(&doc))));
    }
    body.push_str(&format_done());
    Ok(body)
}

async fn message(
    State(st): State<Arc<AcpState>>,
    headers: HeaderMap,
    Json(doc): Json<Value>,
) -> Response {
    let request = match AcpCodec.decode(&doc) {
        Ok(e) => e,
        Err(e) => return error_response(StatusCode::BAD_REQUEST, &e),
    };
    if let Err(denied) = st.core.vet(&doc, Protocol::Acp) {
        return denied;
    }
    if wants_stream(&headers) {
        register_job(&st, &request);
        return match stream_body(&st, &request) {
            Ok(body) => ([(header::CONTENT_TYPE, SSE_CONTENT_TYPE)], body).into_response(),
            Err(resp) => resp,
        };
    }
    let key = request.context.idempotency_key.clone();
    if let Some(cached) = st.core.replay.lookup(&key, st.core.now()) {
        return Json(cached).into_response();
    }
    register_job(&st, &request);
    let reply = match st.core.reply_for(&request) {
        Ok(r) => r,
        Err(e) => return st.core.handler_error_response(&e),
    };
    match AcpCodec.encode_reply(&reply) {
        Ok(out) => {
            st.core.replay.store(&key, st.core.now(), out.clone());
            Json(out).into_response()
        }
        Err(e) => error_response(StatusCode::INTERNAL_SERVER_ERROR, &e),
    }
}
