//! Per-protocol wire codecs and the write-once registry that `send()` and
//! the bridges look codecs up in.
//!
//! A codec is a pure mapping between [`Envelope`] and a protocol-specific
//! JSON document. Every codec preserves src, dst, content, trace_id,
//! idempotency_key, and session_id across decode(encode(e)); fields a wire
//! format has no column for (intent, priority, ttl) are node-local and do
//! not travel.

use serde_json::{Map, Value};
use std::collections::BTreeMap;
use std::sync::Arc;

use crate::envelope::Envelope;
use crate::error::PalError;
use crate::protocol::Protocol;

mod a2a;
mod acp;
mod agora;
mod anp;

pub use a2a::A2aCodec;
pub use acp::AcpCodec;
pub use agora::AgoraCodec;
pub use anp::AnpCodec;

pub trait Codec: Send + Sync {
    fn protocol(&self) -> Protocol;

    /// Envelope → request document.
    fn encode(&self, e: &Envelope) -> Result<Value, PalError>;

    /// Request document → envelope.
    fn decode(&self, doc: &Value) -> Result<Envelope, PalError>;

    /// Response envelope → response document. Responders correlate by
    /// carrying the request's trace/idempotency/session and setting
    /// parent_id to the request id before encoding.
    fn encode_reply(&self, e: &Envelope) -> Result<Value, PalError>;

    /// Response document → envelope. `request` supplies correlation state
    /// for wire formats whose responses carry no context of their own.
    fn decode_reply(&self, doc: &Value, request: &Envelope) -> Result<Envelope, PalError>;
}

/// Compact canonical byte form of a wire document. `serde_json::Value` maps
/// are ordered, so equal documents always serialize to equal bytes.
pub fn canonical_bytes(doc: &Value) -> Vec<u8> {
    serde_json::to_vec(doc).expect("JSON value always serializes")
}

/// Codec table keyed by protocol. Registration is write-once: the table is
/// populated at startup and only read afterwards; re-registering a protocol
/// is an error, never a replacement.
#[derive(Default)]
pub struct CodecRegistry {
    entries: BTreeMap<Protocol, Arc<dyn Codec>>,
}

impl CodecRegistry {
    pub fn new() -> Self {
        CodecRegistry::default()
    }

    /// Registry with all four standard codecs installed.
    pub fn standard() -> Self {
        let mut reg = CodecRegistry::new();
        for codec in [
            Arc::new(A2aCodec) as Arc<dyn Codec>,
            Arc::new(AcpCodec),
            Arc::new(AnpCodec),
            Arc::new(AgoraCodec),
        ] {
            reg.register(codec).expect("standard registry has no duplicates");
        }
        reg
    }

    pub fn register(&mut self, codec: Arc<dyn Codec>) -> Result<(), PalError> {
        let p = codec.protocol();
        if self.entries.contains_key(&p) {
            return Err(PalError::unsupported(format!(
                "codec for '{}' already registered",
                p.wire_name()
            )));
        }
        self.entries.insert(p, codec);
        Ok(())
    }

    pub fn get(&self, p: Protocol) -> Result<&Arc<dyn Codec>, PalError> {
        self.entries
            .get(&p)
            .ok_or_else(|| PalError::unsupported(format!("no codec for '{}'", p.wire_name())))
    }

    pub fn protocols(&self) -> Vec<Protocol> {
        self.entries.keys().copied().collect()
    }
}

// Shared helpers for the concrete codecs.

fn obj<'v>(doc: &'v Value, what: &str) -> Result<&'v Map<String, Value>, PalError> {
    doc.as_object().ok_or_else(|| PalError::decode(format!("{what}: not a JSON object")))
}

fn req_str(map: &Map<String, Value>, key: &str, what: &str) -> Result<String, PalError> {
    map.get(key)
        .and_then(Value::as_str)
        .map(str::to_string)
        .ok_or_else(|| PalError::decode(format!("{what}: missing string field '{key}'")))
}

fn opt_str(map: &Map<String, Value>, key: &str) -> Option<String> {
    map.get(key).and_then(Value::as_str).map(str::to_string)
}

fn str_or_empty(map: &Map<String, Value>, key: &str) -> String {
    opt_str(map, key).unwrap_or_default()
}

/// Context block shared by the A2A/ACP/Agora/ANP mappings: trace and
/// idempotency always, session/parent when present.
fn context_block(e: &Envelope, extra: &[(&str, &str)]) -> Value {
    let mut m = Map::new();
    m.insert("trace_id".into(), Value::String(e.context.trace_id.clone()));
    m.insert("idempotency_key".into(), Value::String(e.context.idempotency_key.clone()));
    if let Some(s) = &e.context.session_id {
        m.insert("session_id".into(), Value::String(s.clone()));
    }
    if let Some(p) = &e.context.parent_id {
        m.insert("parent_id".into(), Value::String(p.clone()));
    }
    for (k, v) in extra {
        m.insert((*k).into(), Value::String((*v).to_string()));
    }
    Value::Object(m)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clock::LogicalClock;
    use crate::envelope::{EnvelopeFactory, EnvelopeOptions};
    use serde_json::json;

    #[test]
    fn duplicate_registration_is_an_error() {
        let mut reg = CodecRegistry::new();
        reg.register(Arc::new(A2aCodec)).unwrap();
        let err = reg.register(Arc::new(A2aCodec)).unwrap_err();
        assert_eq!(err.kind, crate::error::ErrorKind::Unsupported);
        assert!(err.detail.contains("already registered"));
    }

    #[test]
    fn missing_codec_is_unsupported() {
        let reg = CodecRegistry::new();
        let err = reg.get(Protocol::Anp).err().expect("missing codec must error");
        assert_eq!(err.kind, crate::error::ErrorKind::Unsupported);
    }

    #[test]
    fn standard_registry_round_trips_the_preserved_set() {
        let reg = CodecRegistry::standard();
        let mut f = EnvelopeFactory::new(LogicalClock::new(), 9);
        let e = f.new_envelope(
            "agent_A",
            "agent_B",
            json!({"text": "payload", "n": 3}),
            EnvelopeOptions { session_id: Some("s-1".into()), ..Default::default() },
        );
        for p in Protocol::ALL {
            let codec = reg.get(p).unwrap();
            let doc = codec.encode(&e).unwrap();
            let back = codec.decode(&doc).unwrap();
            assert_eq!(back.src, e.src, "{p}");
            assert_eq!(back.dst, e.dst, "{p}");
            assert_eq!(back.content, e.content, "{p}");
            assert_eq!(back.context.trace_id, e.context.trace_id, "{p}");
            assert_eq!(back.context.idempotency_key, e.context.idempotency_key, "{p}");
            assert_eq!(back.context.session_id, e.context.session_id, "{p}");
        }
    }
}
