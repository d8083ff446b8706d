//! ANP endpoint: a raw socket listener that accepts an HTTP upgrade on the
//! socket path, runs the three-message key agreement, then serves sealed
//! frames; plus an optional plaintext HTTP fallback that is always marked
//! insecure on the wire.
//!
//! Rejections inside an established session (replayed sequence, failed
//! authentication, denied session token, clock skew) are answered with a
//! sealed data frame whose body is an error document; the transport stays
//! up so probes can observe the rejection.

use std::net::SocketAddr;
use std::sync::{Arc, Mutex};

use agentwire_core::anp::{
    create_identity, FrameType, Identity, SecureFrame, SecureSession, ServerHandshake,
};
use agentwire_core::clock::{Clock, WallClock};
use agentwire_core::codec::{canonical_bytes, AnpCodec, Codec};
use agentwire_core::envelope::EnvelopeFactory;
use agentwire_core::{Envelope, PalError, Protocol};
use axum::extract::State;
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::routing::post;
use axum::{Json, Router};
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use serde_json::{json, Value};
use tokio::io::AsyncWriteExt;
use tokio::net::tcp::{OwnedReadHalf, OwnedWriteHalf};
use tokio::net::{TcpListener, TcpStream};
use tokio::sync::oneshot;
use tokio::task::JoinHandle;

use super::{error_body, error_response, serve, HttpServerCore, RunningServer, ServerConfig};
use crate::framing::{read_frame, read_preamble, upgrade_response, write_frame, SOCKET_PATH};
use crate::guard::{session_id_in, timestamp_in, vet_session, vet_timestamp, SessionVerdict};
use crate::handler::AgentHandler;

/// Marker injected by a client requesting a streamed reply; the codec
/// ignores unknown top-level fields.
pub const STREAM_FLAG: &str = "stream";

/// Sentinel document closing a streamed reply over the socket.
pub const STREAM_DONE_TYPE: &str = "stream_done";

#[derive(Clone, Debug)]
pub struct AnpServerConfig {
    pub agent_id: String,
    /// Seed for the server's DID identity.
    pub identity_seed: u64,
    /// Seed for reply-envelope ids.
    pub seed: u64,
    /// Seed for handshake nonces.
    pub rng_seed: u64,
    pub heartbeat_interval: f64,
    pub heartbeat_timeout: f64,
    pub skew_accept_secs: f64,
    pub replay_window_secs: f64,
    /// Serve the plaintext HTTP fallback endpoint as well.
    pub fallback_enabled: bool,
}

impl Default for AnpServerConfig {
    fn default() -> Self {
        let base = ServerConfig::default();
        AnpServerConfig {
            agent_id: "anp-server".into(),
            identity_seed: 1,
            seed: 0,
            rng_seed: 0,
            heartbeat_interval: agentwire_core::anp::DEFAULT_HEARTBEAT_INTERVAL_SECS,
            heartbeat_timeout: agentwire_core::anp::DEFAULT_HEARTBEAT_TIMEOUT_SECS,
            skew_accept_secs: base.skew_accept_secs,
            replay_window_secs: base.replay_window_secs,
            fallback_enabled: false,
        }
    }
}

pub struct RunningAnpServer {
    socket_addr: SocketAddr,
    did: String,
    fallback: Option<RunningServer>,
    shutdown: Option<oneshot::Sender<()>>,
    task: Option<JoinHandle<()>>,
}

impl RunningAnpServer {
    /// host:port of the secure socket listener.
    pub fn socket_endpoint(&self) -> String {
        self.socket_addr.to_string()
    }

    /// Base url of the plaintext fallback app, when enabled.
    pub fn fallback_endpoint(&self) -> Option<String> {
        self.fallback.as_ref().map(|f| f.endpoint())
    }

    /// The server's DID; clients pin this as the expected peer identity.
    pub fn did(&self) -> &str {
        &self.did
    }

    pub async fn stop(mut self) {
        if let Some(tx) = self.shutdown.take() {
            let _ = tx.send(());
        }
        if let Some(task) = self.task.take() {
            let _ = task.await;
        }
        if let Some(fb) = self.fallback.take() {
            fb.stop().await;
        }
    }
}

struct AnpState {
    identity: Identity,
    handler: Arc<dyn AgentHandler>,
    factory: Mutex<EnvelopeFactory>,
    clock: Arc<dyn Clock>,
    rng: Mutex<ChaCha20Rng>,
    heartbeat_interval: f64,
    heartbeat_timeout: f64,
    skew_accept: f64,
}

pub async fn spawn_anp(
    cfg: AnpServerConfig,
    handler: Arc<dyn AgentHandler>,
) -> std::io::Result<RunningAnpServer> {
    let identity = create_identity(cfg.identity_seed);
    let did = identity.did.clone();
    let clock: Arc<dyn Clock> = Arc::new(WallClock);
    let state = Arc::new(AnpState {
        identity,
        handler: handler.clone(),
        factory: Mutex::new(EnvelopeFactory::new(clock.clone(), cfg.seed)),
        clock,
        rng: Mutex::new(ChaCha20Rng::seed_from_u64(cfg.rng_seed)),
        heartbeat_interval: cfg.heartbeat_interval,
        heartbeat_timeout: cfg.heartbeat_timeout,
        skew_accept: cfg.skew_accept_secs,
    });

    let listener = TcpListener::bind(("127.0.0.1", 0)).await?;
    let socket_addr = listener.local_addr()?;
    let (tx, mut rx) = oneshot::channel::<()>();
    let accept_state = state.clone();
    let task = tokio::spawn(async move {
        loop {
            tokio::select! {
                _ = &mut rx => break,
                accepted = listener.accept() => match accepted {
                    Ok((stream, _)) => {
                        let st = accept_state.clone();
                        tokio::spawn(async move {
                            let _ = handle_conn(stream, st).await;
                        });
                    }
                    Err(_) => break,
                },
            }
        }
    });

    let fallback = if cfg.fallback_enabled {
        let base = ServerConfig {
            agent_id: cfg.agent_id.clone(),
            seed: cfg.seed.wrapping_add(1),
            replay_window_secs: cfg.replay_window_secs,
            skew_accept_secs: cfg.skew_accept_secs,
        };
        Some(spawn_fallback(base, handler).await?)
    } else {
        None
    };

    Ok(RunningAnpServer { socket_addr, did, fallback, shutdown: Some(tx), task: Some(task) })
}

async fn handle_conn(stream: TcpStream, st: Arc<AnpState>) -> Result<(), PalError> {
    let (mut rd, mut wr) = stream.into_split();
    let preamble = read_preamble(&mut rd).await?;
    let request_line = preamble.lines().next().unwrap_or_default();
    let path = request_line.split_whitespace().nth(1).unwrap_or_default();
    if path != SOCKET_PATH {
        let _ = wr.write_all(b"HTTP/1.1 404 Not Found\r\ncontent-length: 0\r\n\r\n").await;
        return Err(PalError::protocol(format!("unknown socket path '{path}'")));
    }
    wr.write_all(upgrade_response().as_bytes())
        .await
        .map_err(|e| PalError::conn(format!("upgrade response: {e}")))?;

    let mut session = establish(&st, &mut rd, &mut wr).await?;
    session.set_heartbeat(st.heartbeat_interval, st.heartbeat_timeout);
    serve_session(&st, &mut session, &mut rd, &mut wr).await
}

async fn establish(
    st: &AnpState,
    rd: &mut OwnedReadHalf,
    wr: &mut OwnedWriteHalf,
) -> Result<SecureSession, PalError> {
    let (hello, _) = read_frame(rd).await?;
    let (pending, server_hello) = {
        let mut rng = st.rng.lock().unwrap();
        ServerHandshake::respond(&st.identity, &hello, &mut rng)?
    };
    write_frame(wr, &server_hello).await?;
    let (confirm, _) = read_frame(rd).await?;
    pending.finish(&confirm, st.clock.now())
}

async fn serve_session(
    st: &AnpState,
    session: &mut SecureSession,
    rd: &mut OwnedReadHalf,
    wr: &mut OwnedWriteHalf,
) -> Result<(), PalError> {
    loop {
        let Ok((frame, _)) = read_frame(rd).await else { return Ok(()) };
        let now = st.clock.now();
        match session.open(&frame, now) {
            Ok(plain) => match frame.frame_type {
                FrameType::Heartbeat => {
                    let echo = session.heartbeat();
                    write_frame(wr, &echo).await?;
                }
                FrameType::Close => return Ok(()),
                _ => {
                    for reply in data_replies(st, session, &plain) {
                        write_frame(wr, &reply).await?;
                    }
                }
            },
            Err(err) => {
                let body = canonical_bytes(&error_body(&err));
                let reply = session.seal(FrameType::Data, &body);
                write_frame(wr, &reply).await?;
            }
        }
    }
}

/// Decodes one data payload, vets it, and seals the reply frames: either a
/// single unary reply, a fragment sequence closed by the stream-done
/// sentinel, or one error document.
fn data_replies(st: &AnpState, session: &mut SecureSession, plain: &[u8]) -> Vec<SecureFrame> {
    match data_documents(st, plain) {
        Ok(docs) => docs
            .into_iter()
            .map(|d| session.seal(FrameType::Data, &canonical_bytes(&d)))
            .collect(),
        Err(err) => {
            let body = canonical_bytes(&error_body(&err));
            vec![session.seal(FrameType::Data, &body)]
        }
    }
}

fn data_documents(st: &AnpState, plain: &[u8]) -> Result<Vec<Value>, PalError> {
    let doc: Value = serde_json::from_slice(plain)
        .map_err(|e| PalError::decode(format!("data frame body: {e}")))?;
    let request = AnpCodec.decode(&doc)?;
    if let SessionVerdict::Denied(reason) = vet_session(session_id_in(&doc, Protocol::Anp)) {
        return Err(PalError::protocol(format!("session denied: {reason}")));
    }
    if let Err(skew) = vet_timestamp(timestamp_in(&doc), st.clock.now(), st.skew_accept) {
        return Err(PalError::protocol(format!("clock skew {skew:+.1}s outside accept window")));
    }
    if doc.get(STREAM_FLAG).and_then(Value::as_bool).unwrap_or(false) {
        let chunks = st.handler.stream(&request)?;
        let mut docs = Vec::with_capacity(chunks.len() + 1);
        for content in chunks {
            docs.push(encode_reply(st, &request, content)?);
        }
        docs.push(json!({"type": STREAM_DONE_TYPE}));
        Ok(docs)
    } else {
        let content = st.handler.handle(&request)?;
        Ok(vec![encode_reply(st, &request, content)?])
    }
}

fn encode_reply(st: &AnpState, request: &Envelope, content: Value) -> Result<Value, PalError> {
    let reply = st.factory.lock().unwrap().reply_to(request, content);
    AnpCodec.encode_reply(&reply)
}

// Plaintext HTTP fallback. Responses carry `"secure": false` so the
// degraded channel is visible in every capture.

struct FallbackState {
    core: HttpServerCore,
}

async fn spawn_fallback(
    cfg: ServerConfig,
    handler: Arc<dyn AgentHandler>,
) -> std::io::Result<RunningServer> {
    let state = Arc::new(FallbackState { core: HttpServerCore::new(&cfg, handler) });
    let app =
        Router::new().route("/anp/message", post(fallback_message)).with_state(state);
    serve(app).await
}

async fn fallback_message(State(st): State<Arc<FallbackState>>, Json(doc): Json<Value>) -> Response {
    let request = match AnpCodec.decode(&doc) {
        Ok(e) => e,
        Err(e) => return error_response(StatusCode::BAD_REQUEST, &e),
    };
    if let Err(denied) = st.core.vet(&doc, Protocol::Anp) {
        return denied;
    }
    let key = request.context.idempotency_key.clone();
    if let Some(cached) = st.core.replay.lookup(&key, st.core.now()) {
        return Json(cached).into_response();
    }
    let reply = match st.core.reply_for(&request) {
        Ok(r) => r,
        Err(e) => return st.core.handler_error_response(&e),
    };
    match AnpCodec.encode_reply(&reply) {
        Ok(mut out) => {
            out["secure"] = json!(false);
            st.core.replay.store(&key, st.core.now(), out.clone());
            Json(out).into_response()
        }
        Err(e) => error_response(StatusCode::INTERNAL_SERVER_ERROR, &e),
    }
}
