//! Request metrics keyed by (src_agent, dst_id, protocol): latency samples,
//! failure counts by error code, and the two byte counters. Handshake and
//! key-agreement frames are metered by neither counter.

use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::sync::{Arc, Mutex};

use crate::error::PalError;
use crate::protocol::Protocol;
use crate::tap::FrameClass;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct MetricLabels {
    pub src_agent: String,
    pub dst_id: String,
    pub protocol: Protocol,
}

impl MetricLabels {
    /// Canonical flat form used as a map key in serialized snapshots.
    pub fn key(&self) -> String {
        format!("{}->{}@{}", self.src_agent, self.dst_id, self.protocol.wire_name())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ByteCounters {
    /// First-attempt request and response bytes.
    pub payload: u64,
    /// Retried attempts plus protocol-control frames.
    pub retry_overhead: u64,
}

#[derive(Default)]
struct HubInner {
    bytes: BTreeMap<MetricLabels, ByteCounters>,
    latency: BTreeMap<MetricLabels, Vec<f64>>,
    failures: BTreeMap<MetricLabels, BTreeMap<String, u64>>,
    requests: BTreeMap<MetricLabels, u64>,
}

/// Shared, thread-safe metrics sink. Cloning shares the underlying state.
#[derive(Clone, Default)]
pub struct MetricsHub {
    inner: Arc<Mutex<HubInner>>,
}

impl MetricsHub {
    pub fn new() -> Self {
        MetricsHub::default()
    }

    pub fn meter_bytes(&self, labels: &MetricLabels, class: FrameClass, n: u64) {
        let mut inner = self.inner.lock().unwrap();
        let c = inner.bytes.entry(labels.clone()).or_default();
        match class {
            FrameClass::Payload => c.payload += n,
            FrameClass::RetryOverhead => c.retry_overhead += n,
            FrameClass::Handshake => {}
        }
    }

    pub fn record_request(&self, labels: &MetricLabels) {
        let mut inner = self.inner.lock().unwrap();
        *inner.requests.entry(labels.clone()).or_default() += 1;
    }

    pub fn record_latency(&self, labels: &MetricLabels, secs: f64) {
        let mut inner = self.inner.lock().unwrap();
        inner.latency.entry(labels.clone()).or_default().push(secs);
    }

    pub fn record_failure(&self, labels: &MetricLabels, err: &PalError) {
        let mut inner = self.inner.lock().unwrap();
        *inner
            .failures
            .entry(labels.clone())
            .or_default()
            .entry(err.kind.code().to_string())
            .or_default() += 1;
    }

    pub fn bytes_for(&self, labels: &MetricLabels) -> ByteCounters {
        self.inner.lock().unwrap().bytes.get(labels).copied().unwrap_or_default()
    }

    /// Byte counters summed over all label sets.
    pub fn bytes_total(&self) -> ByteCounters {
        let inner = self.inner.lock().unwrap();
        let mut total = ByteCounters::default();
        for c in inner.bytes.values() {
            total.payload += c.payload;
            total.retry_overhead += c.retry_overhead;
        }
        total
    }

    pub fn failures_total(&self) -> u64 {
        let inner = self.inner.lock().unwrap();
        inner.failures.values().flat_map(|m| m.values()).sum()
    }

    pub fn snapshot(&self) -> MetricsSnapshot {
        let inner = self.inner.lock().unwrap();
        MetricsSnapshot {
            bytes: inner.bytes.iter().map(|(k, v)| (k.key(), *v)).collect(),
            latency: inner.latency.iter().map(|(k, v)| (k.key(), v.clone())).collect(),
            failures: inner.failures.iter().map(|(k, v)| (k.key(), v.clone())).collect(),
            requests: inner.requests.iter().map(|(k, v)| (k.key(), *v)).collect(),
        }
    }
}

/// Point-in-time copy of everything the hub has accumulated, keyed by the
/// flat label form. Keys iterate in a stable order, so serialized snapshots
/// are deterministic.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct MetricsSnapshot {
    pub bytes: BTreeMap<String, ByteCounters>,
    pub latency: BTreeMap<String, Vec<f64>>,
    pub failures: BTreeMap<String, BTreeMap<String, u64>>,
    pub requests: BTreeMap<String, u64>,
}
