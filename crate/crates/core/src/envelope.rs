//! The unified transport envelope: the protocol-neutral message every codec
//! encodes from and decodes into. Field names here are load-bearing — they
//! appear verbatim in logs, configs, and the canonical JSON form.

use serde::{Deserialize, Serialize};
use serde_json::Value;
use std::sync::Arc;

use crate::clock::Clock;
use crate::id::IdGen;
use crate::protocol::Protocol;

/// Default time-to-live for an envelope, milliseconds.
pub const DEFAULT_TTL_MS: i64 = 30_000;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Envelope {
    pub id: String,
    pub ts: f64,
    pub src: String,
    pub dst: String,
    /// Free-form routing tag. Not mapped onto any wire document; nodes treat
    /// it as local dispatch state.
    #[serde(default)]
    pub intent: String,
    pub content: Value,
    #[serde(default)]
    pub context: EnvelopeContext,
    #[serde(default)]
    pub meta: EnvelopeMeta,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EnvelopeContext {
    pub trace_id: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub parent_id: Option<String>,
    pub idempotency_key: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub session_id: Option<String>,
    pub priority: i64,
    pub ttl_ms: i64,
    pub stream: bool,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub artifact_refs: Vec<String>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub tags: Vec<String>,
}

impl Default for EnvelopeContext {
    fn default() -> Self {
        EnvelopeContext {
            trace_id: String::new(),
            parent_id: None,
            idempotency_key: String::new(),
            session_id: None,
            priority: 0,
            ttl_ms: DEFAULT_TTL_MS,
            stream: false,
            artifact_refs: Vec::new(),
            tags: Vec::new(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Default, Serialize, Deserialize)]
#[serde(default)]
pub struct EnvelopeMeta {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub protocol_hint: Option<Protocol>,
    pub retry_count: u32,
}

/// Optional fields for [`EnvelopeFactory::new_envelope`]. Anything left
/// `None` gets the documented default (fresh trace/idempotency ids, ttl
/// 30000 ms, priority 0, no streaming).
#[derive(Clone, Debug, Default)]
pub struct EnvelopeOptions {
    pub intent: Option<String>,
    pub trace_id: Option<String>,
    pub parent_id: Option<String>,
    pub idempotency_key: Option<String>,
    pub session_id: Option<String>,
    pub priority: Option<i64>,
    pub ttl_ms: Option<i64>,
    pub stream: bool,
    pub artifact_refs: Vec<String>,
    pub tags: Vec<String>,
    pub protocol_hint: Option<Protocol>,
}

/// Mints envelopes against a shared clock and a seeded id stream. Because
/// the clock is monotonic, every envelope a factory mints carries a
/// non-decreasing `ts`.
pub struct EnvelopeFactory {
    clock: Arc<dyn Clock>,
    ids: IdGen,
}

impl EnvelopeFactory {
    pub fn new(clock: Arc<dyn Clock>, seed: u64) -> Self {
        EnvelopeFactory { clock, ids: IdGen::seeded(seed) }
    }

    pub fn new_envelope(
        &mut self,
        src: &str,
        dst: &str,
        content: Value,
        opts: EnvelopeOptions,
    ) -> Envelope {
        let trace_id = opts.trace_id.unwrap_or_else(|| self.ids.uuid());
        let idempotency_key = opts.idempotency_key.unwrap_or_else(|| self.ids.uuid());
        Envelope {
            id: self.ids.uuid(),
            ts: self.clock.now(),
            src: src.to_string(),
            dst: dst.to_string(),
            intent: opts.intent.unwrap_or_default(),
            content,
            context: EnvelopeContext {
                trace_id,
                parent_id: opts.parent_id,
                idempotency_key,
                session_id: opts.session_id,
                priority: opts.priority.unwrap_or(0),
                ttl_ms: opts.ttl_ms.unwrap_or(DEFAULT_TTL_MS),
                stream: opts.stream,
                artifact_refs: opts.artifact_refs,
                tags: opts.tags,
            },
            meta: EnvelopeMeta { protocol_hint: opts.protocol_hint, retry_count: 0 },
        }
    }

    /// Response envelope for `request`: src/dst swapped, parent set to the
    /// request id, trace/idempotency/session carried over.
    pub fn reply_to(&mut self, request: &Envelope, content: Value) -> Envelope {
        self.new_envelope(
            &request.dst,
            &request.src,
            content,
            EnvelopeOptions {
                trace_id: Some(request.context.trace_id.clone()),
                parent_id: Some(request.id.clone()),
                idempotency_key: Some(request.context.idempotency_key.clone()),
                session_id: request.context.session_id.clone(),
                ..EnvelopeOptions::default()
            },
        )
    }
}

/// A single structural problem found by [`validate`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Violation {
    pub field: &'static str,
    pub message: String,
}

fn violation(field: &'static str, message: impl Into<String>) -> Violation {
    Violation { field, message: message.into() }
}

/// Structural validation. Empty vec means the envelope is well-formed.
/// src == dst (loopback) is legal.
pub fn validate(e: &Envelope) -> Vec<Violation> {
    let mut out = Vec::new();
    if e.id.is_empty() {
        out.push(violation("id", "id missing"));
    }
    if e.src.is_empty() {
        out.push(violation("src", "src missing"));
    }
    if e.dst.is_empty() {
        out.push(violation("dst", "dst missing"));
    }
    if e.content.is_null() {
        out.push(violation("content", "content null"));
    }
    if e.context.trace_id.is_empty() {
        out.push(violation("trace_id", "trace_id missing"));
    }
    if e.context.idempotency_key.is_empty() {
        out.push(violation("idempotency_key", "idempotency_key missing"));
    }
    if e.context.ttl_ms < 0 {
        out.push(violation("ttl_ms", "ttl_ms negative"));
    }
    if !e.ts.is_finite() || e.ts < 0.0 {
        out.push(violation("ts", "ts not a finite non-negative number"));
    }
    out
}
