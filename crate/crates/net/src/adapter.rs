//! Adapter lifecycle contract and the pool that enforces one adapter
//! instance per (dst_id, endpoint, credentials).

use std::collections::HashMap;

use agentwire_core::{Envelope, PalError, Protocol};
use async_trait::async_trait;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use sha2::{Digest, Sha256};

use crate::client::{a2a::A2aClient, acp::AcpClient, agora::AgoraClient, anp::AnpClient};
use crate::client::agora::AgoraBinding;
use crate::context::NetContext;

/// Identity and addressing for one peer edge. `credentials` is an opaque
/// token; for ANP it carries the expected server DID so the handshake can
/// verify the peer.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct AdapterDescriptor {
    pub protocol: Protocol,
    /// Local agent name, used as the source label on all metered traffic.
    pub src_agent: String,
    pub dst_id: String,
    /// HTTP base url, or host:port for the ANP socket.
    pub endpoint: String,
    pub credentials: String,
}

impl AdapterDescriptor {
    /// The pool identity: one live adapter per key.
    pub fn pool_key(&self) -> (String, String, String) {
        (self.dst_id.clone(), self.endpoint.clone(), self.credentials.clone())
    }
}

/// One element of a streamed reply. A well-formed stream is zero or more
/// `Data` fragments followed by exactly one `Done`.
#[derive(Clone, Debug)]
pub enum StreamFragment {
    Data(Envelope),
    Done,
}

impl StreamFragment {
    pub fn is_done(&self) -> bool {
        matches!(self, StreamFragment::Done)
    }
}

/// Lifecycle of a live protocol client. `send` performs exactly one
/// attempt: encode, transmit, decode the reply, meter latency, bytes, and
/// failures. It never retries; backoff belongs to the caller (see
/// [`crate::retry::send_with_retry`]).
#[async_trait]
pub trait ProtocolAdapter: Send {
    fn descriptor(&self) -> &AdapterDescriptor;

    /// Fetches the peer's discovery document and prepares the transport
    /// (for ANP: connects and runs the secure handshake).
    async fn initialize(&mut self) -> Result<(), PalError>;

    /// Cheap liveness check against the peer.
    async fn health_check(&mut self) -> bool;

    /// One request, one attempt. The envelope's retry_count is the attempt
    /// index and decides the byte-accounting class of its frames.
    async fn send(&mut self, e: &Envelope) -> Result<Envelope, PalError>;

    /// Ordered reply fragments, terminated by [`StreamFragment::Done`].
    /// E_UNSUPPORTED on edges without streaming.
    async fn send_streaming(&mut self, e: &Envelope) -> Result<Vec<StreamFragment>, PalError>;

    /// Compatibility stub: this stack is request/response, inbound pushes
    /// do not exist.
    async fn receive_message(&mut self) -> Result<Option<Envelope>, PalError> {
        Ok(None)
    }

    /// Releases transport state. Idempotent.
    async fn cleanup(&mut self) -> Result<(), PalError>;
}

#[derive(Clone, Debug)]
pub struct PoolConfig {
    /// Per-request transport timeout for HTTP adapters.
    pub timeout_secs: f64,
    /// Seed for the local ANP identity.
    pub identity_seed: u64,
    /// Seed stream for handshake nonces and retry jitter.
    pub rng_seed: u64,
    /// Optional ANP plaintext fallback endpoint per destination id.
    pub anp_fallback: HashMap<String, String>,
    /// Optional Agora routine binding per destination id.
    pub agora_bindings: HashMap<String, AgoraBinding>,
}

impl Default for PoolConfig {
    fn default() -> Self {
        PoolConfig {
            timeout_secs: 5.0,
            identity_seed: 0,
            rng_seed: 0,
            anp_fallback: HashMap::new(),
            agora_bindings: HashMap::new(),
        }
    }
}

/// Owns every live adapter in a process. Lookups create on miss and always
/// return the same instance for the same (dst_id, endpoint, credentials).
pub struct AdapterPool {
    ctx: NetContext,
    cfg: PoolConfig,
    adapters: HashMap<(String, String, String), Box<dyn ProtocolAdapter>>,
}

/// Mixes a destination id into a seed so per-adapter RNG streams are
/// deterministic but distinct, independent of creation order.
fn derive_seed(base: u64, dst_id: &str) -> u64 {
    let digest = Sha256::digest(dst_id.as_bytes());
    base ^ u64::from_be_bytes(digest[..8].try_into().unwrap())
}

impl AdapterPool {
    pub fn new(ctx: NetContext, cfg: PoolConfig) -> Self {
        AdapterPool { ctx, cfg, adapters: HashMap::new() }
    }

    pub fn len(&self) -> usize {
        self.adapters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.adapters.is_empty()
    }

    pub fn adapter(&mut self, desc: &AdapterDescriptor) -> &mut (dyn ProtocolAdapter + '_) {
        let key = desc.pool_key();
        if !self.adapters.contains_key(&key) {
            let built = self.build(desc);
            self.adapters.insert(key.clone(), built);
        }
        self.adapters.get_mut(&key).unwrap().as_mut()
    }

    fn build(&self, desc: &AdapterDescriptor) -> Box<dyn ProtocolAdapter> {
        match desc.protocol {
            Protocol::A2a => {
                Box::new(A2aClient::new(desc.clone(), self.ctx.clone(), self.cfg.timeout_secs))
            }
            Protocol::Acp => {
                Box::new(AcpClient::new(desc.clone(), self.ctx.clone(), self.cfg.timeout_secs))
            }
            Protocol::Agora => {
                let binding =
                    self.cfg.agora_bindings.get(&desc.dst_id).cloned().unwrap_or_default();
                Box::new(AgoraClient::new(
                    desc.clone(),
                    self.ctx.clone(),
                    self.cfg.timeout_secs,
                    binding,
                ))
            }
            Protocol::Anp => {
                let identity = agentwire_core::anp::create_identity(self.cfg.identity_seed);
                let rng =
                    ChaCha20Rng::seed_from_u64(derive_seed(self.cfg.rng_seed, &desc.dst_id));
                let mut client =
                    AnpClient::new(desc.clone(), self.ctx.clone(), identity, rng);
                if let Some(fb) = self.cfg.anp_fallback.get(&desc.dst_id) {
                    client = client.with_fallback(fb.clone(), self.cfg.timeout_secs);
                }
                Box::new(client)
            }
        }
    }

    /// Cleans up and drops every adapter.
    pub async fn cleanup_all(&mut self) {
        for (_, adapter) in self.adapters.iter_mut() {
            let _ = adapter.cleanup().await;
        }
        self.adapters.clear();
    }
}
