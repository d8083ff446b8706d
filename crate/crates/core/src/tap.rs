//! In-process wire tap. Every frame that crosses a transport boundary is
//! recorded once, with direction, attempt index, and accounting class; byte
//! counters and the confidentiality probes read these records instead of OS
//! packet capture. For sealed sessions the tap sees exactly what the wire
//! sees: ciphertext.

use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::{Arc, Mutex};

use crate::meter::{MetricLabels, MetricsHub};
use crate::protocol::Protocol;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Direction {
    Out,
    In,
}

/// Accounting class of a frame.
///
/// - `Payload`: first-attempt request/response bytes.
/// - `RetryOverhead`: retried attempts and protocol-control frames
///   (heartbeats, rejoin announcements).
/// - `Handshake`: session establishment and key agreement; counted by
///   neither byte counter.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FrameClass {
    Payload,
    RetryOverhead,
    Handshake,
}

#[derive(Clone, Debug)]
pub struct TapRecord {
    pub t: f64,
    pub direction: Direction,
    pub class: FrameClass,
    pub protocol: Protocol,
    pub src: String,
    pub dst: String,
    pub attempt: u32,
    pub bytes: Vec<u8>,
}

#[derive(Clone, Default)]
pub struct WireTap {
    records: Arc<Mutex<Vec<TapRecord>>>,
    enabled: Arc<AtomicBool>,
}

impl WireTap {
    pub fn enabled() -> Self {
        let tap = WireTap::default();
        tap.set_enabled(true);
        tap
    }

    pub fn set_enabled(&self, on: bool) {
        self.enabled.store(on, Ordering::SeqCst);
    }

    pub fn is_enabled(&self) -> bool {
        self.enabled.load(Ordering::SeqCst)
    }

    pub fn record(&self, rec: TapRecord) {
        if self.is_enabled() {
            self.records.lock().unwrap().push(rec);
        }
    }

    pub fn records(&self) -> Vec<TapRecord> {
        self.records.lock().unwrap().clone()
    }

    pub fn clear(&self) {
        self.records.lock().unwrap().clear();
    }

    /// Byte-substring scan across every captured frame.
    pub fn contains_bytes(&self, needle: &[u8]) -> bool {
        if needle.is_empty() {
            return true;
        }
        self.records
            .lock()
            .unwrap()
            .iter()
            .any(|r| r.bytes.windows(needle.len()).any(|w| w == needle))
    }

    /// Sum of captured frame lengths for one accounting class.
    pub fn total_bytes(&self, class: FrameClass) -> u64 {
        self.records
            .lock()
            .unwrap()
            .iter()
            .filter(|r| r.class == class)
            .map(|r| r.bytes.len() as u64)
            .sum()
    }
}

/// Records a frame on the tap and meters it in the same motion, so the
/// byte counters are additively consistent with the capture by
/// construction.
pub fn record_frame(tap: &WireTap, hub: &MetricsHub, rec: TapRecord) {
    hub.meter_bytes(
        &MetricLabels {
            src_agent: rec.src.clone(),
            dst_id: rec.dst.clone(),
            protocol: rec.protocol,
        },
        rec.class,
        rec.bytes.len() as u64,
    );
    tap.record(rec);
}
