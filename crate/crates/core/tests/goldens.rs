//! Frozen wire fixtures: one canonical envelope encoded per protocol. These
//! files are the field-alignment contract; codec changes that move or rename
//! wire fields must fail here before anything downstream notices.

use agentwire_core::codec::CodecRegistry;
use agentwire_core::{Envelope, Protocol};
use serde_json::Value;

fn canonical_envelope() -> Envelope {
    serde_json::from_value(serde_json::json!({
        "id": "11111111-1111-4111-8111-111111111111",
        "ts": 1730000000.0,
        "src": "agent_A",
        "dst": "agent_B",
        "intent": "demo",
        "content": {"text": "hello from A"},
        "context": {
            "trace_id": "22222222-2222-4222-8222-222222222222",
            "idempotency_key": "33333333-3333-4333-8333-333333333333",
            "session_id": "sess-1"
        }
    }))
    .expect("canonical envelope parses")
}

fn golden(name: &str) -> Value {
    let path = format!("{}/tests/golden/{name}", env!("CARGO_MANIFEST_DIR"));
    let text = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{path}: {e}"));
    serde_json::from_str(&text).unwrap_or_else(|e| panic!("{path}: {e}"))
}

fn assert_matches_golden(protocol: Protocol, file: &str) {
    let registry = CodecRegistry::standard();
    let encoded = registry.get(protocol).unwrap().encode(&canonical_envelope()).unwrap();
    let expected = golden(file);
    assert_eq!(
        encoded, expected,
        "{protocol} wire document diverged from {file}:\n got: {}\nwant: {}",
        serde_json::to_string_pretty(&encoded).unwrap(),
        serde_json::to_string_pretty(&expected).unwrap(),
    );
}

#[test]
fn a2a_request_matches_golden() {
    assert_matches_golden(Protocol::A2a, "a2a_request.json");
}

#[test]
fn acp_request_matches_golden() {
    assert_matches_golden(Protocol::Acp, "acp_request.json");
}

#[test]
fn anp_request_matches_golden() {
    assert_matches_golden(Protocol::Anp, "anp_request.json");
}

#[test]
fn agora_request_matches_golden() {
    assert_matches_golden(Protocol::Agora, "agora_request.json");
}

#[test]
fn agora_reply_matches_golden() {
    let registry = CodecRegistry::standard();
    let request = canonical_envelope();
    let mut reply = canonical_envelope();
    reply.src = request.dst.clone();
    reply.dst = request.src.clone();
    reply.content = serde_json::json!({"text": "reply to A"});
    let encoded = registry.get(Protocol::Agora).unwrap().encode_reply(&reply).unwrap();
    assert_eq!(encoded, golden("agora_reply.json"));
}

#[test]
fn goldens_decode_back_to_canonical_fields() {
    let registry = CodecRegistry::standard();
    let e = canonical_envelope();
    for (protocol, file) in [
        (Protocol::A2a, "a2a_request.json"),
        (Protocol::Acp, "acp_request.json"),
        (Protocol::Anp, "anp_request.json"),
        (Protocol::Agora, "agora_request.json"),
    ] {
        let decoded = registry.get(protocol).unwrap().decode(&golden(file)).unwrap();
        assert_eq!(decoded.id, e.id, "{protocol}");
        assert_eq!(decoded.src, e.src, "{protocol}");
        assert_eq!(decoded.dst, e.dst, "{protocol}");
        assert_eq!(decoded.content, e.content, "{protocol}");
        assert_eq!(decoded.context.trace_id, e.context.trace_id, "{protocol}");
        assert_eq!(decoded.context.idempotency_key, e.context.idempotency_key, "{protocol}");
        assert_eq!(decoded.context.session_id, e.context.session_id, "{protocol}");
    }
}
