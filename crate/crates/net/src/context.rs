//! Shared recording context for one process: the wire tap, the metrics
//! hub, and the clock that timestamps captures and latency samples.

use std::sync::Arc;

use agentwire_core::clock::{Clock, WallClock};
use agentwire_core::meter::{MetricLabels, MetricsHub};
use agentwire_core::tap::{record_frame, Direction, FrameClass, TapRecord, WireTap};
use agentwire_core::Protocol;

/// Everything a client adapter needs to account for its traffic. Cloning
/// shares the underlying tap and hub.
#[derive(Clone)]
pub struct NetContext {
    pub tap: WireTap,
    pub hub: MetricsHub,
    pub clock: Arc<dyn Clock>,
}

impl NetContext {
    /// Context for live runs: wall clock, tap enabled.
    pub fn live() -> Self {
        NetContext { tap: WireTap::enabled(), hub: MetricsHub::new(), clock: Arc::new(WallClock) }
    }

    pub fn with_clock(clock: Arc<dyn Clock>) -> Self {
        NetContext { tap: WireTap::enabled(), hub: MetricsHub::new(), clock }
    }

    /// Captures one frame and meters its bytes under (src, dst, protocol).
    /// Both directions are recorded under the sender's label pair so the
    /// payload counter accumulates request and response bytes together.
    #[allow(clippy::too_many_arguments)]
    pub fn record(
        &self,
        direction: Direction,
        class: FrameClass,
        protocol: Protocol,
        src: &str,
        dst: &str,
        attempt: u32,
        bytes: Vec<u8>,
    ) {
        record_frame(
            &self.tap,
            &self.hub,
            TapRecord {
                t: self.clock.now(),
                direction,
                class,
                protocol,
                src: src.to_string(),
                dst: dst.to_string(),
                attempt,
                bytes,
            },
        );
    }

    pub fn labels(&self, protocol: Protocol, src: &str, dst: &str) -> MetricLabels {
        MetricLabels { src_agent: src.to_string(), dst_id: dst.to_string(), protocol }
    }
}
