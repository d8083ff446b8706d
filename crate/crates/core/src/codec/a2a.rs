//! A2A wire mapping: JSON-RPC-flavored request with `params.message`,
//! `params.context`, and `params.routing`. The document carries no
//! timestamp, so decoded envelopes get ts 0. A streamed response is asked
//! for with the `Accept: text/event-stream` transport header, not a body
//! field.

use serde_json::{json, Map, Value};

use super::{context_block, obj, opt_str, req_str, str_or_empty, Codec};
use crate::envelope::{Envelope, EnvelopeContext, EnvelopeMeta};
use crate::error::PalError;
use crate::protocol::Protocol;

pub struct A2aCodec;

fn envelope_from_parts(
    id: String,
    src: String,
    dst: String,
    content: Value,
    context: &Map<String, Value>,
) -> Envelope {
    Envelope {
        id,
        ts: 0.0,
        src,
        dst,
        intent: String::new(),
        content,
        context: EnvelopeContext {
            trace_id: str_or_empty(context, "trace_id"),
            parent_id: opt_str(context, "parent_id"),
            idempotency_key: str_or_empty(context, "idempotency_key"),
            session_id: opt_str(context, "session_id"),
            ..EnvelopeContext::default()
        },
        meta: EnvelopeMeta { protocol_hint: Some(Protocol::A2a), retry_count: 0 },
    }
}

impl Codec for A2aCodec {
    fn protocol(&self) -> Protocol {
        Protocol::A2a
    }

    fn encode(&self, e: &Envelope) -> Result<Value, PalError> {
        Ok(json!({
            "id": e.id,
            "params": {
                "message": e.content,
                "context": context_block(e, &[]),
                "routing": {
                    "destination": e.dst,
                    "source": e.src,
                },
            },
        }))
    }

    fn decode(&self, doc: &Value) -> Result<Envelope, PalError> {
        let top = obj(doc, "a2a request")?;
        let id = req_str(top, "id", "a2a request")?;
        let params = obj(
            top.get("params").ok_or_else(|| PalError::decode("a2a request: missing 'params'"))?,
            "a2a params",
        )?;
        let routing = obj(
            params
                .get("routing")
                .ok_or_else(|| PalError::decode("a2a request: missing 'params.routing'"))?,
            "a2a routing",
        )?;
        let context = match params.get("context") {
            Some(v) => obj(v, "a2a context")?.clone(),
            None => Map::new(),
        };
        let content = params
            .get("message")
            .cloned()
            .ok_or_else(|| PalError::decode("a2a request: missing 'params.message'"))?;
        Ok(envelope_from_parts(
            id,
            req_str(routing, "source", "a2a routing")?,
            req_str(routing, "destination", "a2a routing")?,
            content,
            &context,
        ))
    }

    fn encode_reply(&self, e: &Envelope) -> Result<Value, PalError> {
        // JSON-RPC correlation: the reply's top-level id is the request id
        // the responder recorded in parent_id; the reply's own id rides in
        // the result.
        let correlates_to = e.context.parent_id.clone().unwrap_or_else(|| e.id.clone());
        Ok(json!({
            "id": correlates_to,
            "result": {
                "message_id": e.id,
                "message": e.content,
                "context": context_block(e, &[]),
                "routing": {
                    "destination": e.dst,
                    "source": e.src,
                },
            },
        }))
    }

    fn decode_reply(&self, doc: &Value, request: &Envelope) -> Result<Envelope, PalError> {
        let top = obj(doc, "a2a reply")?;
        if let Some(err) = top.get("error") {
            return Err(PalError::protocol(format!("a2a error reply: {err}")));
        }
        let result = obj(
            top.get("result").ok_or_else(|| PalError::decode("a2a reply: missing 'result'"))?,
            "a2a result",
        )?;
        let routing = match result.get("routing") {
            Some(v) => obj(v, "a2a reply routing")?.clone(),
            None => Map::new(),
        };
        let context = match result.get("context") {
            Some(v) => obj(v, "a2a reply context")?.clone(),
            None => Map::new(),
        };
        let content = result
            .get("message")
            .cloned()
            .ok_or_else(|| PalError::decode("a2a reply: missing 'result.message'"))?;
        let mut e = envelope_from_parts(
            opt_str(result, "message_id").unwrap_or_else(|| format!("{}#reply", request.id)),
            opt_str(&routing, "source").unwrap_or_else(|| request.dst.clone()),
            opt_str(&routing, "destination").unwrap_or_else(|| request.src.clone()),
            content,
            &context,
        );
        if e.context.trace_id.is_empty() {
            e.context.trace_id = request.context.trace_id.clone();
        }
        if e.context.idempotency_key.is_empty() {
            e.context.idempotency_key = request.context.idempotency_key.clone();
        }
        Ok(e)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clock::LogicalClock;
    use crate::envelope::{EnvelopeFactory, EnvelopeOptions};

    fn sample() -> Envelope {
        let mut f = EnvelopeFactory::new(LogicalClock::new(), 1);
        f.new_envelope(
            "agent_A",
            "agent_B",
            json!({"text": "hello"}),
            EnvelopeOptions::default(),
        )
    }

    #[test]
    fn encode_places_routing_and_context() {
        let e = sample();
        let doc = A2aCodec.encode(&e).unwrap();
        assert_eq!(doc["params"]["routing"]["destination"], "agent_B");
        assert_eq!(doc["params"]["routing"]["source"], "agent_A");
        assert_eq!(doc["params"]["message"]["text"], "hello");
        assert_eq!(doc["params"]["context"]["trace_id"], e.context.trace_id.as_str());
        assert_eq!(doc["id"], e.id.as_str());
    }

    #[test]
    fn malformed_document_is_e_decode() {
        let err = A2aCodec.decode(&json!({"id": "x"})).unwrap_err();
        assert_eq!(err.kind, crate::error::ErrorKind::Decode);
    }

    #[test]
    fn reply_round_trip_correlates_to_request() {
        let req = sample();
        let mut f = EnvelopeFactory::new(LogicalClock::new(), 2);
        let rep = f.reply_to(&req, json!({"answer": 42}));
        let doc = A2aCodec.encode_reply(&rep).unwrap();
        assert_eq!(doc["id"], req.id.as_str());
        let back = A2aCodec.decode_reply(&doc, &req).unwrap();
        assert_eq!(back.content, json!({"answer": 42}));
        assert_eq!(back.src, "agent_B");
        assert_eq!(back.dst, "agent_A");
        assert_eq!(back.context.trace_id, req.context.trace_id);
    }
}
