//! Live protocol endpoints and client adapters.
//!
//! Servers are axum apps (A2A, ACP, Agora, and the ANP plaintext fallback)
//! plus a raw socket listener for ANP secure sessions. Clients implement
//! the [`ProtocolAdapter`] lifecycle over reqwest and tokio sockets. Every
//! frame that crosses a transport boundary is recorded on the shared wire
//! tap and metered in the same motion, so byte counters, latency samples,
//! and the confidentiality probes all read from one consistent capture.
//!
//! Adapters perform exactly one attempt per `send`; retries are a caller
//! decision made through [`send_with_retry`], which stamps the attempt
//! index into the envelope so retried frames are classed as overhead.

pub mod adapter;
pub mod client;
pub mod context;
pub mod framing;
pub mod guard;
pub mod handler;
pub mod replay;
pub mod retry;
pub mod server;
pub mod sse;

pub use adapter::{AdapterDescriptor, AdapterPool, PoolConfig, ProtocolAdapter, StreamFragment};
pub use client::a2a::A2aClient;
pub use client::acp::AcpClient;
pub use client::agora::{AgoraBinding, AgoraClient};
pub use client::anp::AnpClient;
pub use context::NetContext;
pub use handler::{AgentHandler, EchoHandler};
pub use replay::ReplayCache;
pub use retry::{send_with_retry, RetryPolicy};
pub use server::a2a::spawn_a2a;
pub use server::acp::spawn_acp;
pub use server::agora::{routine_hash, spawn_agora, Routine};
pub use server::anp::{spawn_anp, AnpServerConfig, RunningAnpServer};
pub use server::{RunningServer, ServerConfig};
