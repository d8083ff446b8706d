//! ACP wire mapping: flat message document with `sender`/`receiver`,
//! `payload`, a float `timestamp`, `correlation_id` carrying the
//! idempotency key, and a `metadata` block for trace/session.

use serde_json::{json, Map, Value};

use super::{obj, opt_str, req_str, str_or_empty, Codec};
use crate::envelope::{Envelope, EnvelopeContext, EnvelopeMeta};
use crate::error::PalError;
use crate::protocol::Protocol;

pub struct AcpCodec;

fn metadata_block(e: &Envelope) -> Value {
    let mut m = Map::new();
    m.insert("trace_id".into(), Value::String(e.context.trace_id.clone()));
    if let Some(s) = &e.context.session_id {
        m.insert("session_id".into(), Value::String(s.clone()));
    }
    if let Some(p) = &e.context.parent_id {
        m.insert("parent_id".into(), Value::String(p.clone()));
    }
    Value::Object(m)
}

fn decode_message(doc: &Value, expected_type: &str) -> Result<Envelope, PalError> {
    let top = obj(doc, "acp message")?;
    let typ = req_str(top, "type", "acp message")?;
    if typ != expected_type {
        return Err(PalError::decode(format!(
            "acp message: expected type '{expected_type}', got '{typ}'"
        )));
    }
    let metadata = match top.get("metadata") {
        Some(v) => obj(v, "acp metadata")?.clone(),
        None => Map::new(),
    };
    let ts = top.get("timestamp").and_then(Value::as_f64).unwrap_or(0.0);
    Ok(Envelope {
        id: req_str(top, "id", "acp message")?,
        ts,
        src: req_str(top, "sender", "acp message")?,
        dst: req_str(top, "receiver", "acp message")?,
        intent: String::new(),
        content: top
            .get("payload")
            .cloned()
            .ok_or_else(|| PalError::decode("acp message: missing 'payload'"))?,
        context: EnvelopeContext {
            trace_id: str_or_empty(&metadata, "trace_id"),
            parent_id: opt_str(&metadata, "parent_id"),
            idempotency_key: str_or_empty(top, "correlation_id"),
            session_id: opt_str(&metadata, "session_id"),
            ..EnvelopeContext::default()
        },
        meta: EnvelopeMeta { protocol_hint: Some(Protocol::Acp), retry_count: 0 },
    })
}

fn encode_message(e: &Envelope, typ: &str) -> Value {
    json!({
        "id": e.id,
        "type": typ,
        "sender": e.src,
        "receiver": e.dst,
        "payload": e.content,
        "timestamp": e.ts,
        "correlation_id": e.context.idempotency_key,
        "metadata": metadata_block(e),
    })
}

impl Codec for AcpCodec {
    fn protocol(&self) -> Protocol {
        Protocol::Acp
    }

    fn encode(&self, e: &Envelope) -> Result<Value, PalError> {
        Ok(encode_message(e, "request"))
    }

    fn decode(&self, doc: &Value) -> Result<Envelope, PalError> {
        decode_message(doc, "request")
    }

    fn encode_reply(&self, e: &Envelope) -> Result<Value, PalError> {
        Ok(encode_message(e, "response"))
    }

    fn decode_reply(&self, doc: &Value, _request: &Envelope) -> Result<Envelope, PalError> {
        decode_message(doc, "response")
    }
}
