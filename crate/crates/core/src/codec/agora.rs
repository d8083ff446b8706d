//! Agora wire mapping. Requests are task documents with `request_id`,
//! `source`/`target`, a `message` body, and a `metadata` block; the routine
//! binding (`protocol_hash`, `fallback_text`) is adapter state layered on
//! top of the codec output. Responses are the two-field `{status, body}`
//! form and carry no context, so reply decoding correlates through the
//! request.

use serde_json::{json, Map, Value};

use super::{obj, opt_str, req_str, str_or_empty, Codec};
use crate::envelope::{Envelope, EnvelopeContext, EnvelopeMeta};
use crate::error::PalError;
use crate::protocol::Protocol;

pub struct AgoraCodec;

/// Response status value for a handled request. Anything else is surfaced
/// to the caller as E_PROTOCOL.
pub const STATUS_OK: &str = "ok";

impl Codec for AgoraCodec {
    fn protocol(&self) -> Protocol {
        Protocol::Agora
    }

    fn encode(&self, e: &Envelope) -> Result<Value, PalError> {
        let mut metadata = Map::new();
        metadata.insert("trace_id".into(), Value::String(e.context.trace_id.clone()));
        metadata
            .insert("idempotency_key".into(), Value::String(e.context.idempotency_key.clone()));
        if let Some(s) = &e.context.session_id {
            metadata.insert("session_id".into(), Value::String(s.clone()));
        }
        if let Some(p) = &e.context.parent_id {
            metadata.insert("parent_id".into(), Value::String(p.clone()));
        }
        Ok(json!({
            "request_id": e.id,
            "source": e.src,
            "target": e.dst,
            "message": e.content,
            "metadata": Value::Object(metadata),
        }))
    }

    fn decode(&self, doc: &Value) -> Result<Envelope, PalError> {
        let top = obj(doc, "agora task")?;
        let metadata = match top.get("metadata") {
            Some(v) => obj(v, "agora metadata")?.clone(),
            None => Map::new(),
        };
        Ok(Envelope {
            id: req_str(top, "request_id", "agora task")?,
            ts: 0.0,
            src: req_str(top, "source", "agora task")?,
            dst: req_str(top, "target", "agora task")?,
            intent: String::new(),
            content: top
                .get("message")
                .cloned()
                .ok_or_else(|| PalError::decode("agora task: missing 'message'"))?,
            context: EnvelopeContext {
                trace_id: str_or_empty(&metadata, "trace_id"),
                parent_id: opt_str(&metadata, "parent_id"),
                idempotency_key: str_or_empty(&metadata, "idempotency_key"),
                session_id: opt_str(&metadata, "session_id"),
                ..EnvelopeContext::default()
            },
            meta: EnvelopeMeta { protocol_hint: Some(Protocol::Agora), retry_count: 0 },
        })
    }

    fn encode_reply(&self, e: &Envelope) -> Result<Value, PalError> {
        Ok(json!({
            "status": STATUS_OK,
            "body": e.content,
        }))
    }

    fn decode_reply(&self, doc: &Value, request: &Envelope) -> Result<Envelope, PalError> {
        let top = obj(doc, "agora response")?;
        let status = req_str(top, "status", "agora response")?;
        let body = top
            .get("body")
            .cloned()
            .ok_or_else(|| PalError::decode("agora response: missing 'body'"))?;
        if status != STATUS_OK {
            return Err(PalError::protocol(format!("agora response status '{status}': {body}")));
        }
        Ok(Envelope {
            id: format!("{}#reply", request.id),
            ts: 0.0,
            src: request.dst.clone(),
            dst: request.src.clone(),
            intent: String::new(),
            content: body,
            context: EnvelopeContext {
                trace_id: request.context.trace_id.clone(),
                parent_id: Some(request.id.clone()),
                idempotency_key: request.context.idempotency_key.clone(),
                session_id: request.context.session_id.clone(),
                ..EnvelopeContext::default()
            },
            meta: EnvelopeMeta { protocol_hint: Some(Protocol::Agora), retry_count: 0 },
        })
    }
}
