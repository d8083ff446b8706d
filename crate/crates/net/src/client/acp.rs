//! ACP client adapter: manifest discovery, capability-backed health, unary
//! and SSE message paths, plus the job-status poll.

use agentwire_core::codec::{AcpCodec, Codec};
use agentwire_core::{Envelope, PalError};
use async_trait::async_trait;
use serde_json::Value;

use super::a2a::fragments_from_sse;
use super::{exchange, get_json, record_in, SendScope};
use crate::adapter::{AdapterDescriptor, ProtocolAdapter, StreamFragment};
use crate::context::NetContext;
use crate::sse::SSE_CONTENT_TYPE;

pub struct AcpClient {
    desc: AdapterDescriptor,
    ctx: NetContext,
    http: reqwest::Client,
    manifest: Option<Value>,
}

impl AcpClient {
    pub fn new(desc: AdapterDescriptor, ctx: NetContext, timeout_secs: f64) -> Self {
        AcpClient { desc, ctx, http: super::http_client(timeout_secs), manifest: None }
    }

    pub fn manifest(&self) -> Option<&Value> {
        self.manifest.as_ref()
    }

    fn url(&self, path: &str) -> String {
        format!("{}{}", self.desc.endpoint, path)
    }

    /// Current state of the job keyed by `session_id`. Unknown sessions
    /// surface as E_HTTP 404.
    pub async fn job_status(&self, session_id: &str) -> Result<String, PalError> {
        let doc =
            get_json(&self.http, &format!("{}?session_id={session_id}", self.url("/acp/status")))
                .await?;
        doc.get("state")
            .and_then(Value::as_str)
            .map(str::to_string)
            .ok_or_else(|| PalError::decode("status reply missing 'state'"))
    }
}

#[async_trait]
impl ProtocolAdapter for AcpClient {
    fn descriptor(&self) -> &AdapterDescriptor {
        &self.desc
    }

    async fn initialize(&mut self) -> Result<(), PalError> {
        self.manifest = Some(get_json(&self.http, &self.url("/.well-known/agent.json")).await?);
        Ok(())
    }

    async fn health_check(&mut self) -> bool {
        get_json(&self.http, &self.url("/acp/capabilities")).await.is_ok()
    }

    async fn send(&mut self, e: &Envelope) -> Result<Envelope, PalError> {
        let scope = SendScope::start(&self.ctx, &self.desc);
        let result = async {
            let doc = AcpCodec.encode(e)?;
            let body = exchange(
                &self.ctx,
                &self.http,
                &self.desc,
                &self.url("/acp/message"),
                &doc,
                e.meta.retry_count,
                None,
            )
            .await?;
            record_in(&self.ctx, &self.desc, e.meta.retry_count, body.clone());
            let reply: Value = serde_json::from_slice(&body)
                .map_err(|err| PalError::decode(format!("reply body: {err}")))?;
            AcpCodec.decode_reply(&reply, e)
        }
        .await;
        scope.finish(result)
    }

    async fn send_streaming(&mut self, e: &Envelope) -> Result<Vec<StreamFragment>, PalError> {
        let scope = SendScope::start(&self.ctx, &self.desc);
        let result = async {
            let doc = AcpCodec.encode(e)?;
            let body = exchange(
                &self.ctx,
                &self.http,
                &self.desc,
                &self.url("/acp/message"),
                &doc,
                e.meta.retry_count,
                Some(SSE_CONTENT_TYPE),
            )
            .await?;
            fragments_from_sse(&self.ctx, &self.desc, &AcpCodec, e, &body)
        }
        .await;
        scope.finish(result)
    }

    async fn cleanup(&mut self) -> Result<(), PalError> {
        self.manifest = None;
        Ok(())
    }
}
