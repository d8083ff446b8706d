//! Client-side transport plumbing shared by the four adapters: the metered
//! request exchange, reqwest error classification, and the send-scope that
//! accounts requests, latencies, and failures uniformly.

pub mod a2a;
pub mod acp;
pub mod agora;
pub mod anp;

use agentwire_core::codec::canonical_bytes;
use agentwire_core::meter::MetricLabels;
use agentwire_core::tap::{Direction, FrameClass};
use agentwire_core::{ErrorKind, PalError};
use reqwest::header::{ACCEPT, CONTENT_TYPE};
use serde_json::Value;

use crate::adapter::AdapterDescriptor;
use crate::context::NetContext;

/// First attempts are payload; every retried attempt is overhead.
pub(crate) fn class_for(attempt: u32) -> FrameClass {
    if attempt == 0 {
        FrameClass::Payload
    } else {
        FrameClass::RetryOverhead
    }
}

pub(crate) fn classify_transport_error(err: &reqwest::Error) -> PalError {
    if err.is_timeout() {
        PalError::timeout(format!("transport: {err}"))
    } else if err.is_connect() {
        PalError::conn(format!("connect: {err}"))
    } else {
        PalError::conn(format!("transport: {err}"))
    }
}

pub(crate) fn http_client(timeout_secs: f64) -> reqwest::Client {
    reqwest::Client::builder()
        .timeout(std::time::Duration::from_secs_f64(timeout_secs))
        .build()
        .expect("reqwest client construction is infallible with these options")
}

fn truncate_detail(body: &[u8]) -> String {
    String::from_utf8_lossy(body).chars().take(200).collect()
}

/// Accounts one send: a request mark up front, then either a latency
/// sample or a failure count depending on the outcome.
pub(crate) struct SendScope {
    ctx: NetContext,
    labels: MetricLabels,
    t0: f64,
}

impl SendScope {
    pub fn start(ctx: &NetContext, desc: &AdapterDescriptor) -> Self {
        let labels = ctx.labels(desc.protocol, &desc.src_agent, &desc.dst_id);
        ctx.hub.record_request(&labels);
        SendScope { ctx: ctx.clone(), labels, t0: ctx.clock.now() }
    }

    pub fn finish<T>(self, result: Result<T, PalError>) -> Result<T, PalError> {
        match &result {
            Ok(_) => self.ctx.hub.record_latency(&self.labels, self.ctx.clock.now() - self.t0),
            Err(e) => self.ctx.hub.record_failure(&self.labels, e),
        }
        result
    }
}

/// One HTTP request/response exchange. The outbound document is recorded
/// post-encode; the response body is recorded only on success, because
/// error bodies are not protocol frames. Returns the raw response bytes.
pub(crate) async fn exchange(
    ctx: &NetContext,
    http: &reqwest::Client,
    desc: &AdapterDescriptor,
    url: &str,
    doc: &Value,
    attempt: u32,
    accept: Option<&str>,
) -> Result<Vec<u8>, PalError> {
    let bytes = canonical_bytes(doc);
    let class = class_for(attempt);
    ctx.record(
        Direction::Out,
        class,
        desc.protocol,
        &desc.src_agent,
        &desc.dst_id,
        attempt,
        bytes.clone(),
    );
    let mut req = http.post(url).header(CONTENT_TYPE, "application/json").body(bytes);
    if let Some(a) = accept {
        req = req.header(ACCEPT, a);
    }
    let resp = req.send().await.map_err(|e| classify_transport_error(&e))?;
    let status = resp.status().as_u16();
    let body = resp
        .bytes()
        .await
        .map_err(|e| classify_transport_error(&e))?
        .to_vec();
    if !(200..300).contains(&status) {
        return Err(PalError::http(status, truncate_detail(&body)));
    }
    Ok(body)
}

/// Records one received protocol frame under the sender's labels.
pub(crate) fn record_in(ctx: &NetContext, desc: &AdapterDescriptor, attempt: u32, bytes: Vec<u8>) {
    ctx.record(
        Direction::In,
        class_for(attempt),
        desc.protocol,
        &desc.src_agent,
        &desc.dst_id,
        attempt,
        bytes,
    );
}

/// Bodiless discovery or health probe; control-plane traffic is not
/// recorded on the tap.
pub(crate) async fn get_json(http: &reqwest::Client, url: &str) -> Result<Value, PalError> {
    let resp = http.get(url).send().await.map_err(|e| classify_transport_error(&e))?;
    let status = resp.status().as_u16();
    let body = resp.bytes().await.map_err(|e| classify_transport_error(&e))?;
    if !(200..300).contains(&status) {
        return Err(PalError::http(status, truncate_detail(&body)));
    }
    serde_json::from_slice(&body).map_err(|e| PalError::decode(format!("discovery doc: {e}")))
}

/// Maps a server error document (`{"error": {"kind", "detail"}}`) back to
/// the normalized failure it described.
pub(crate) fn error_doc_to_pal(err: &Value) -> PalError {
    let kind = err
        .get("kind")
        .cloned()
        .and_then(|v| serde_json::from_value::<ErrorKind>(v).ok())
        .unwrap_or(ErrorKind::Protocol);
    let detail = err.get("detail").and_then(Value::as_str).unwrap_or("peer error").to_string();
    PalError { kind, detail, http_status: None }
}
