//! HTTP server scaffolding shared by the A2A, ACP, Agora, and ANP-fallback
//! apps: ephemeral binding, graceful shutdown, the per-server core state
//! (envelope factory, replay cache, vetting), and uniform error bodies.

pub mod a2a;
pub mod acp;
pub mod agora;
pub mod anp;

use std::io;
use std::net::SocketAddr;
use std::sync::{Arc, Mutex};

use agentwire_core::clock::{Clock, WallClock};
use agentwire_core::envelope::EnvelopeFactory;
use agentwire_core::{Envelope, PalError, Protocol};
use axum::http::StatusCode;
use axum::response::{IntoResponse, Response};
use axum::{Json, Router};
use serde_json::{json, Value};
use tokio::net::TcpListener;
use tokio::sync::oneshot;
use tokio::task::JoinHandle;

use crate::guard::{
    session_id_in, timestamp_in, vet_session, vet_timestamp, SessionVerdict,
    DEFAULT_SKEW_ACCEPT_SECS,
};
use crate::handler::AgentHandler;
use crate::replay::{ReplayCache, DEFAULT_REPLAY_WINDOW_SECS};

#[derive(Clone, Debug)]
pub struct ServerConfig {
    pub agent_id: String,
    /// Seed for the server's reply-envelope ids.
    pub seed: u64,
    pub replay_window_secs: f64,
    pub skew_accept_secs: f64,
}

impl Default for ServerConfig {
    fn default() -> Self {
        ServerConfig {
            agent_id: "server".into(),
            seed: 0,
            replay_window_secs: DEFAULT_REPLAY_WINDOW_SECS,
            skew_accept_secs: DEFAULT_SKEW_ACCEPT_SECS,
        }
    }
}

/// A bound, serving app. Dropping it also shuts the listener down; `stop`
/// does so deterministically.
pub struct RunningServer {
    addr: SocketAddr,
    shutdown: Option<oneshot::Sender<()>>,
    task: Option<JoinHandle<()>>,
}

impl RunningServer {
    pub fn addr(&self) -> SocketAddr {
        self.addr
    }

    pub fn endpoint(&self) -> String {
        format!("http://{}", self.addr)
    }

    pub async fn stop(mut self) {
        if let Some(tx) = self.shutdown.take() {
            let _ = tx.send(());
        }
        if let Some(task) = self.task.take() {
            let _ = task.await;
        }
    }
}

/// Binds `app` on an ephemeral loopback port and serves it until shutdown.
pub(crate) async fn serve(app: Router) -> io::Result<RunningServer> {
    let listener = TcpListener::bind(("127.0.0.1", 0)).await?;
    let addr = listener.local_addr()?;
    let (tx, rx) = oneshot::channel::<()>();
    let task = tokio::spawn(async move {
        let _ = axum::serve(listener, app)
            .with_graceful_shutdown(async {
                let _ = rx.await;
            })
            .await;
    });
    Ok(RunningServer { addr, shutdown: Some(tx), task: Some(task) })
}

pub(crate) fn error_body(err: &PalError) -> Value {
    json!({"error": {"kind": err.kind.code(), "detail": err.detail}})
}

pub(crate) fn error_response(status: StatusCode, err: &PalError) -> Response {
    (status, Json(error_body(err))).into_response()
}

/// State every HTTP protocol app shares: reply factory, replay coalescing,
/// and the request vetting pipeline.
pub(crate) struct HttpServerCore {
    pub agent_id: String,
    pub factory: Mutex<EnvelopeFactory>,
    pub replay: ReplayCache,
    pub clock: Arc<dyn Clock>,
    pub skew_accept: f64,
    pub handler: Arc<dyn AgentHandler>,
}

impl HttpServerCore {
    pub fn new(cfg: &ServerConfig, handler: Arc<dyn AgentHandler>) -> Self {
        let clock: Arc<dyn Clock> = Arc::new(WallClock);
        HttpServerCore {
            agent_id: cfg.agent_id.clone(),
            factory: Mutex::new(EnvelopeFactory::new(clock.clone(), cfg.seed)),
            replay: ReplayCache::new(cfg.replay_window_secs),
            clock,
            skew_accept: cfg.skew_accept_secs,
            handler,
        }
    }

    pub fn now(&self) -> f64 {
        self.clock.now()
    }

    /// Session and clock-skew vetting against the raw wire document.
    /// Returns the denial response on rejection.
    pub fn vet(&self, doc: &Value, protocol: Protocol) -> Result<(), Response> {
        if let SessionVerdict::Denied(reason) = vet_session(session_id_in(doc, protocol)) {
            return Err(error_response(
                StatusCode::FORBIDDEN,
                &PalError::protocol(format!("session denied: {reason}")),
            ));
        }
        if let Err(skew) = vet_timestamp(timestamp_in(doc), self.now(), self.skew_accept) {
            return Err(error_response(
                StatusCode::BAD_REQUEST,
                &PalError::protocol(format!("clock skew {skew:+.1}s outside accept window")),
            ));
        }
        Ok(())
    }

    /// Runs the application handler and wraps its content in a correlated
    /// reply envelope.
    pub fn reply_for(&self, request: &Envelope) -> Result<Envelope, PalError> {
        let content = self.handler.handle(request)?;
        Ok(self.factory.lock().unwrap().reply_to(request, content))
    }

    /// Handler failures become their HTTP status, or 500 for non-HTTP
    /// error kinds.
    pub fn handler_error_response(&self, err: &PalError) -> Response {
        let status = err
            .http_status
            .and_then(|s| StatusCode::from_u16(s).ok())
            .unwrap_or(StatusCode::INTERNAL_SERVER_ERROR);
        error_response(status, err)
    }
}
