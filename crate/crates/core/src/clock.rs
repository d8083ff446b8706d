//! Clocks. Scenario runs read a logical clock owned by the scheduler so a
//! config+seed pair replays to identical timestamps; live conformance runs
//! use the wall clock. Time is f64 seconds throughout.

use std::sync::atomic::{AtomicU64, Ordering};
use std::sync::Arc;
use std::time::{SystemTime, UNIX_EPOCH};

pub trait Clock: Send + Sync {
    fn now(&self) -> f64;
}

/// Monotonic logical clock with nanosecond granularity. Only the scheduler
/// moves it; `advance_to_ns` never travels backwards.
#[derive(Debug, Default)]
pub struct LogicalClock(AtomicU64);

impl LogicalClock {
    pub fn new() -> Arc<Self> {
        Arc::new(LogicalClock(AtomicU64::new(0)))
    }

    pub fn now_ns(&self) -> u64 {
        self.0.load(Ordering::SeqCst)
    }

    pub fn advance_to_ns(&self, ns: u64) {
        self.0.fetch_max(ns, Ordering::SeqCst);
    }
}

impl Clock for LogicalClock {
    fn now(&self) -> f64 {
        self.now_ns() as f64 / 1e9
    }
}

/// UNIX-epoch wall clock.
#[derive(Debug, Default, Clone, Copy)]
pub struct WallClock;

impl Clock for WallClock {
    fn now(&self) -> f64 {
        SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs_f64()).unwrap_or(0.0)
    }
}

pub fn secs_to_ns(secs: f64) -> u64 {
    (secs * 1e9).round() as u64
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn logical_clock_never_regresses() {
        let c = LogicalClock::new();
        c.advance_to_ns(5_000);
        c.advance_to_ns(2_000);
        assert_eq!(c.now_ns(), 5_000);
        c.advance_to_ns(7_500);
        assert_eq!(c.now_ns(), 7_500);
    }

    #[test]
    fn logical_clock_reports_seconds() {
        let c = LogicalClock::new();
        c.advance_to_ns(1_500_000_000);
        assert_eq!(c.now(), 1.5);
    }
}
