//! ANP message document. The same shape travels two ways: as the plaintext
//! body of the HTTP fallback POST, and as the sealed plaintext inside a
//! secure-session data frame.
//!
//! Payload framing: content keys are inlined into `payload` next to one
//! reserved `context` key. So that decode(encode(e)) stays lossless for
//! every JSON content value, content is inlined only when it is an object
//! that has no `context` key and whose key set is not exactly `{"value"}`;
//! anything else is wrapped as `payload.value`. Decode inverts by checking
//! whether the payload's key set is exactly `{"value", "context"}`.

use serde_json::{json, Map, Value};

use super::{context_block, obj, opt_str, req_str, str_or_empty, Codec};
use crate::envelope::{Envelope, EnvelopeContext, EnvelopeMeta};
use crate::error::PalError;
use crate::protocol::Protocol;

pub struct AnpCodec;

fn build_payload(e: &Envelope) -> Value {
    let context = context_block(e, &[("target_id", &e.dst)]);
    let inline = match &e.content {
        Value::Object(m) => {
            !m.contains_key("context") && !(m.len() == 1 && m.contains_key("value"))
        }
        _ => false,
    };
    let mut payload = Map::new();
    if inline {
        if let Value::Object(m) = &e.content {
            for (k, v) in m {
                payload.insert(k.clone(), v.clone());
            }
        }
    } else {
        payload.insert("value".into(), e.content.clone());
    }
    payload.insert("context".into(), context);
    Value::Object(payload)
}

fn split_payload(payload: &Map<String, Value>) -> (Value, Map<String, Value>) {
    let context = payload
        .get("context")
        .and_then(Value::as_object)
        .cloned()
        .unwrap_or_default();
    let wrapped = payload.len() == 2
        && payload.contains_key("value")
        && payload.contains_key("context");
    let content = if wrapped {
        payload["value"].clone()
    } else {
        let mut m = payload.clone();
        m.remove("context");
        Value::Object(m)
    };
    (content, context)
}

fn decode_doc(doc: &Value) -> Result<Envelope, PalError> {
    let top = obj(doc, "anp message")?;
    let typ = req_str(top, "type", "anp message")?;
    if typ != "anp_message" {
        return Err(PalError::decode(format!("anp message: unexpected type '{typ}'")));
    }
    let payload = obj(
        top.get("payload").ok_or_else(|| PalError::decode("anp message: missing 'payload'"))?,
        "anp payload",
    )?;
    let (content, context) = split_payload(payload);
    Ok(Envelope {
        id: req_str(top, "request_id", "anp message")?,
        ts: top.get("timestamp").and_then(Value::as_f64).unwrap_or(0.0),
        src: req_str(top, "source_id", "anp message")?,
        dst: str_or_empty(&context, "target_id"),
        intent: String::new(),
        content,
        context: EnvelopeContext {
            trace_id: str_or_empty(&context, "trace_id"),
            parent_id: opt_str(&context, "parent_id"),
            idempotency_key: str_or_empty(&context, "idempotency_key"),
            session_id: opt_str(&context, "session_id"),
            ..EnvelopeContext::default()
        },
        meta: EnvelopeMeta { protocol_hint: Some(Protocol::Anp), retry_count: 0 },
    })
}

fn encode_doc(e: &Envelope) -> Value {
    json!({
        "type": "anp_message",
        "request_id": e.id,
        "payload": build_payload(e),
        "timestamp": e.ts,
        "source_id": e.src,
    })
}

impl Codec for AnpCodec {
    fn protocol(&self) -> Protocol {
        Protocol::Anp
    }

    fn encode(&self, e: &Envelope) -> Result<Value, PalError> {
        Ok(encode_doc(e))
    }

    fn decode(&self, doc: &Value) -> Result<Envelope, PalError> {
        decode_doc(doc)
    }

    fn encode_reply(&self, e: &Envelope) -> Result<Value, PalError> {
        Ok(encode_doc(e))
    }

    fn decode_reply(&self, doc: &Value, _request: &Envelope) -> Result<Envelope, PalError> {
        decode_doc(doc)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clock::LogicalClock;
    use crate::envelope::EnvelopeFactory;

    fn round_trip(content: Value) -> Envelope {
        let mut f = EnvelopeFactory::new(LogicalClock::new(), 8);
        let e = f.new_envelope("anp_client", "agent_B", content, Default::default());
        AnpCodec.decode(&AnpCodec.encode(&e).unwrap()).unwrap()
    }

    #[test]
    fn object_content_is_inlined_next_to_context() {
        let mut f = EnvelopeFactory::new(LogicalClock::new(), 8);
        let e = f.new_envelope("anp_client", "b", json!({"text": "hi"}), Default::default());
        let doc = AnpCodec.encode(&e).unwrap();
        assert_eq!(doc["type"], "anp_message");
        assert_eq!(doc["payload"]["text"], "hi");
        assert_eq!(doc["payload"]["context"]["trace_id"], e.context.trace_id.as_str());
        assert_eq!(doc["payload"]["context"]["target_id"], "b");
        assert_eq!(doc["source_id"], "anp_client");
    }

    #[test]
    fn framing_rule_is_lossless_on_awkward_content() {
        for content in [
            json!({"text": "plain"}),
            json!({"context": {"nested": true}}),
            json!({"value": 1}),
            json!({"value": 1, "other": 2}),
            json!("bare string"),
            json!([1, 2, 3]),
            json!({}),
            json!(null),
        ] {
            let back = round_trip(content.clone());
            assert_eq!(back.content, content, "content {content}");
            assert_eq!(back.dst, "agent_B", "content {content}");
        }
    }

    #[test]
    fn timestamp_survives() {
        let clock = LogicalClock::new();
        clock.advance_to_ns(1_730_000_000_000_000_000);
        let mut f = EnvelopeFactory::new(clock, 8);
        let e = f.new_envelope("a", "b", json!({"x": 1}), Default::default());
        let back = AnpCodec.decode(&AnpCodec.encode(&e).unwrap()).unwrap();
        assert_eq!(back.ts, 1_730_000_000.0);
    }
}
