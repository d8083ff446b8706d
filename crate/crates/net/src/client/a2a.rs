//! A2A client adapter: agent-card discovery, health, unary send, and SSE
//! streaming against the message endpoint.

use agentwire_core::codec::{A2aCodec, Codec};
use agentwire_core::{Envelope, PalError};
use async_trait::async_trait;
use serde_json::Value;

use super::{exchange, get_json, record_in, SendScope};
use crate::adapter::{AdapterDescriptor, ProtocolAdapter, StreamFragment};
use crate::context::NetContext;
use crate::sse::{parse_stream, DONE_EVENT, SSE_CONTENT_TYPE};

pub struct A2aClient {
    desc: AdapterDescriptor,
    ctx: NetContext,
    http: reqwest::Client,
    card: Option<Value>,
}

impl A2aClient {
    pub fn new(desc: AdapterDescriptor, ctx: NetContext, timeout_secs: f64) -> Self {
        A2aClient { desc, ctx, http: super::http_client(timeout_secs), card: None }
    }

    /// Discovery document fetched by `initialize`.
    pub fn agent_card(&self) -> Option<&Value> {
        self.card.as_ref()
    }

    fn url(&self, path: &str) -> String {
        format!("{}{}", self.desc.endpoint, path)
    }
}

/// Parses an SSE body into reply fragments, decoding each data event
/// against the request for correlation; the `done` event closes the
/// stream.
pub(crate) fn fragments_from_sse(
    ctx: &NetContext,
    desc: &AdapterDescriptor,
    codec: &dyn Codec,
    request: &Envelope,
    body: &[u8],
) -> Result<Vec<StreamFragment>, PalError> {
    let text = std::str::from_utf8(body)
        .map_err(|_| PalError::decode("event stream is not utf-8"))?;
    let mut fragments = Vec::new();
    for event in parse_stream(text) {
        if event.name.as_deref() == Some(DONE_EVENT) {
            record_in(ctx, desc, request.meta.retry_count, event.data.into_bytes());
            fragments.push(StreamFragment::Done);
            return Ok(fragments);
        }
        record_in(ctx, desc, request.meta.retry_count, event.data.clone().into_bytes());
        let doc: Value = serde_json::from_str(&event.data)
            .map_err(|e| PalError::decode(format!("stream fragment: {e}")))?;
        let envelope = codec.decode_reply(&doc, request)?;
        fragments.push(StreamFragment::Data(envelope));
    }
    Err(PalError::protocol("event stream ended without the done event"))
}

#[async_trait]
impl ProtocolAdapter for A2aClient {
    fn descriptor(&self) -> &AdapterDescriptor {
        &self.desc
    }

    async fn initialize(&mut self) -> Result<(), PalError> {
        self.card = Some(get_json(&self.http, &self.url("/.well-known/agent.json")).await?);
        Ok(())
    }

    async fn health_check(&mut self) -> bool {
        get_json(&self.http, &self.url("/health")).await.is_ok()
    }

    async fn send(&mut self, e: &Envelope) -> Result<Envelope, PalError> {
        let scope = SendScope::start(&self.ctx, &self.desc);
        let result = async {
            let doc = A2aCodec.encode(e)?;
            let body = exchange(
                &self.ctx,
                &self.http,
                &self.desc,
                &self.url("/message"),
                &doc,
                e.meta.retry_count,
                None,
            )
            .await?;
            record_in(&self.ctx, &self.desc, e.meta.retry_count, body.clone());
            let reply: Value = serde_json::from_slice(&body)
                .map_err(|err| PalError::decode(format!("reply body: {err}")))?;
            A2aCodec.decode_reply(&reply, e)
        }
        .await;
        scope.finish(result)
    }

    async fn send_streaming(&mut self, e: &Envelope) -> Result<Vec<StreamFragment>, PalError> {
        let scope = SendScope::start(&self.ctx, &self.desc);
        let result = async {
            let doc = A2aCodec.encode(e)?;
            let body = exchange(
                &self.ctx,
                &self.http,
                &self.desc,
                &self.url("/message"),
                &doc,
                e.meta.retry_count,
                Some(SSE_CONTENT_TYPE),
            )
            .await?;
            fragments_from_sse(&self.ctx, &self.desc, &A2aCodec, e, &body)
        }
        .await;
        scope.finish(result)
    }

    async fn cleanup(&mut self) -> Result<(), PalError> {
        self.card = None;
        Ok(())
    }
}
