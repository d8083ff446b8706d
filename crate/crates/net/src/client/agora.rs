//! Agora client adapter. The routine binding (protocol hash, fallback
//! text) is adapter state layered onto the codec output before transport;
//! the simplified Agora edge has no streaming path.

use agentwire_core::codec::{AgoraCodec, Codec};
use agentwire_core::{Envelope, PalError};
use async_trait::async_trait;
use serde_json::{json, Value};

use super::{exchange, get_json, record_in, SendScope};
use crate::adapter::{AdapterDescriptor, ProtocolAdapter, StreamFragment};
use crate::context::NetContext;

/// Routine binding for one destination: which protocol document the sender
/// believes both sides share, and the natural-language text to fall back
/// to when the receiver does not recognize it.
#[derive(Clone, Debug, Default)]
pub struct AgoraBinding {
    pub protocol_hash: Option<String>,
    pub fallback_text: Option<String>,
}

pub struct AgoraClient {
    desc: AdapterDescriptor,
    ctx: NetContext,
    http: reqwest::Client,
    binding: AgoraBinding,
    supported_hashes: Vec<String>,
}

impl AgoraClient {
    pub fn new(
        desc: AdapterDescriptor,
        ctx: NetContext,
        timeout_secs: f64,
        binding: AgoraBinding,
    ) -> Self {
        AgoraClient {
            desc,
            ctx,
            http: super::http_client(timeout_secs),
            binding,
            supported_hashes: Vec::new(),
        }
    }

    pub fn set_binding(&mut self, binding: AgoraBinding) {
        self.binding = binding;
    }

    /// Hashes advertised by the peer's discovery document.
    pub fn supported_hashes(&self) -> &[String] {
        &self.supported_hashes
    }

    fn url(&self, path: &str) -> String {
        format!("{}{}", self.desc.endpoint, path)
    }

    fn task_doc(&self, e: &Envelope) -> Result<Value, PalError> {
        let mut doc = AgoraCodec.encode(e)?;
        if let Some(h) = &self.binding.protocol_hash {
            doc["protocol_hash"] = json!(h);
        }
        if let Some(t) = &self.binding.fallback_text {
            doc["fallback_text"] = json!(t);
        }
        Ok(doc)
    }

    async fn post_doc(&self, url: &str, doc: &Value, e: &Envelope) -> Result<Envelope, PalError> {
        let body =
            exchange(&self.ctx, &self.http, &self.desc, url, doc, e.meta.retry_count, None)
                .await?;
        record_in(&self.ctx, &self.desc, e.meta.retry_count, body.clone());
        let reply: Value = serde_json::from_slice(&body)
            .map_err(|err| PalError::decode(format!("reply body: {err}")))?;
        AgoraCodec.decode_reply(&reply, e)
    }

    async fn post_task(&self, url: &str, e: &Envelope) -> Result<Envelope, PalError> {
        let doc = self.task_doc(e)?;
        self.post_doc(url, &doc, e).await
    }

    /// Opens a thread: the task carries the conversation id so the peer
    /// starts its round counter.
    pub async fn open_conversation(
        &mut self,
        conversation_id: &str,
        e: &Envelope,
    ) -> Result<Envelope, PalError> {
        let scope = SendScope::start(&self.ctx, &self.desc);
        let url = self.url("/agora");
        let result = async {
            let mut doc = self.task_doc(e)?;
            doc["metadata"]["conversation_id"] = json!(conversation_id);
            self.post_doc(&url, &doc, e).await
        }
        .await;
        scope.finish(result)
    }

    /// Posts a follow-up round on an existing thread. Unknown conversation
    /// ids surface as E_HTTP 404.
    pub async fn continue_conversation(
        &mut self,
        conversation_id: &str,
        e: &Envelope,
    ) -> Result<Envelope, PalError> {
        let scope = SendScope::start(&self.ctx, &self.desc);
        let url = self.url(&format!("/conversations/{conversation_id}"));
        let result = self.post_task(&url, e).await;
        scope.finish(result)
    }
}

#[async_trait]
impl ProtocolAdapter for AgoraClient {
    fn descriptor(&self) -> &AdapterDescriptor {
        &self.desc
    }

    async fn initialize(&mut self) -> Result<(), PalError> {
        let doc = get_json(&self.http, &self.url("/.well-known")).await?;
        self.supported_hashes = doc
            .get("supported_hashes")
            .and_then(Value::as_array)
            .map(|a| a.iter().filter_map(Value::as_str).map(str::to_string).collect())
            .unwrap_or_default();
        Ok(())
    }

    async fn health_check(&mut self) -> bool {
        get_json(&self.http, &self.url("/.well-known")).await.is_ok()
    }

    async fn send(&mut self, e: &Envelope) -> Result<Envelope, PalError> {
        let scope = SendScope::start(&self.ctx, &self.desc);
        let url = self.url("/agora");
        let result = self.post_task(&url, e).await;
        scope.finish(result)
    }

    async fn send_streaming(&mut self, _e: &Envelope) -> Result<Vec<StreamFragment>, PalError> {
        Err(PalError::unsupported("agora edge has no streaming path"))
    }

    async fn cleanup(&mut self) -> Result<(), PalError> {
        self.supported_hashes.clear();
        Ok(())
    }
}
