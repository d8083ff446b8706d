//! Per-request latency extraction and summary statistics.
//!
//! A request's latency is t_done minus t_send, taken from its first send and
//! first done event. Requests with a send but no done are failures. The
//! summary uses population standard deviation and nearest-rank percentiles
//! (1-based index ceil(q*n) on the sorted values), both chosen so a naive
//! recomputation from the raw log reproduces every figure bit for bit.

use std::collections::BTreeMap;

use agentwire_core::eventlog::{EventKind, EventLog};
use serde::{Deserialize, Serialize};

use crate::error::MetricError;

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RequestOutcomes {
    /// (request_id, e2e latency seconds), in first-send order.
    pub completed: Vec<(String, f64)>,
    /// Requests that were sent but never completed, in first-send order.
    pub failed: Vec<String>,
}

impl RequestOutcomes {
    pub fn latencies(&self) -> Vec<f64> {
        self.completed.iter().map(|(_, l)| l).copied().collect()
    }

    pub fn success_rate(&self) -> f64 {
        let total = self.completed.len() + self.failed.len();
        if total == 0 {
            return 0.0;
        }
        self.completed.len() as f64 / total as f64
    }
}

/// Scans the log once, pairing each request's first send with its first done.
pub fn request_outcomes(log: &EventLog) -> RequestOutcomes {
    let records = log.records();
    let mut send_order: Vec<String> = Vec::new();
    let mut sends: BTreeMap<String, f64> = BTreeMap::new();
    let mut dones: BTreeMap<String, f64> = BTreeMap::new();
    for rec in &records {
        let Some(id) = rec.request_id.as_ref() else { continue };
        match rec.kind {
            EventKind::Send => {
                if !sends.contains_key(id) {
                    sends.insert(id.clone(), rec.t);
                    send_order.push(id.clone());
                }
            }
            EventKind::Done => {
                dones.entry(id.clone()).or_insert(rec.t);
            }
            _ => {}
        }
    }
    let mut out = RequestOutcomes::default();
    for id in send_order {
        let sent = sends[&id];
        match dones.get(&id) {
            Some(done) => out.completed.push((id, done - sent)),
            None => out.failed.push(id),
        }
    }
    out
}

/// Latency of one request; None when either endpoint event is missing.
pub fn e2e_latency(log: &EventLog, request_id: &str) -> Option<f64> {
    let records = log.records();
    let find = |kind: EventKind| {
        records
            .iter()
            .find(|r| r.kind == kind && r.request_id.as_deref() == Some(request_id))
            .map(|r| r.t)
    };
    Some(find(EventKind::Done)? - find(EventKind::Send)?)
}

/// (max done - min send) / 60. Empty or completion-free logs report 0.
pub fn run_duration_minutes(log: &EventLog) -> f64 {
    let records = log.records();
    let min_send = records
        .iter()
        .filter(|r| r.kind == EventKind::Send)
        .map(|r| r.t)
        .fold(f64::INFINITY, f64::min);
    let max_done = records
        .iter()
        .filter(|r| r.kind == EventKind::Done)
        .map(|r| r.t)
        .fold(f64::NEG_INFINITY, f64::max);
    if !min_send.is_finite() || !max_done.is_finite() {
        log::warn!("run_duration_minutes: no completed requests, reporting 0");
        return 0.0;
    }
    (max_done - min_send) / 60.0
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LatencySummary {
    pub mean: f64,
    pub min: f64,
    pub max: f64,
    pub std_dev: f64,
    pub median: f64,
    pub p95: f64,
    pub n: usize,
}

/// Nearest-rank order statistic: 1-based index ceil(pct*n/100) into the
/// sorted slice. Integer arithmetic; ceil(0.95*n) via floats misranks some n
/// because 0.95 is not exactly representable.
fn nearest_rank(sorted: &[f64], pct: usize) -> f64 {
    debug_assert!(!sorted.is_empty() && pct >= 1 && pct <= 100);
    let n = sorted.len();
    let idx = (pct * n).div_ceil(100);
    sorted[idx - 1]
}

pub fn summarize_latencies(values: &[f64]) -> Result<LatencySummary, MetricError> {
    if values.is_empty() {
        return Err(MetricError::EmptyInput("summarize_latencies"));
    }
    let n = values.len();
    let mean = values.iter().sum::<f64>() / n as f64;
    let std_dev =
        (values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n as f64).sqrt();
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("latencies are finite"));
    let median = if n % 2 == 1 {
        sorted[n / 2]
    } else {
        (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0
    };
    Ok(LatencySummary {
        mean,
        min: sorted[0],
        max: sorted[n - 1],
        std_dev,
        median,
        p95: nearest_rank(&sorted, 95),
        n,
    })
}

/// Population variance of per-worker completed-service counts. When the
/// worker set is known it should be passed in so idle workers count as 0;
/// otherwise only workers that appear in the log are counted.
pub fn load_balance_variance(log: &EventLog, workers: Option<&[String]>) -> f64 {
    let mut counts: BTreeMap<String, u64> = BTreeMap::new();
    if let Some(workers) = workers {
        for w in workers {
            counts.insert(w.clone(), 0);
        }
    }
    for rec in log.records() {
        if rec.kind == EventKind::ServiceEnd {
            if workers.is_some() && !counts.contains_key(&rec.agent) {
                continue;
            }
            *counts.entry(rec.agent.clone()).or_default() += 1;
        }
    }
    variance_of_counts(&counts.values().copied().collect::<Vec<_>>())
}

pub(crate) fn variance_of_counts(counts: &[u64]) -> f64 {
    if counts.is_empty() {
        return 0.0;
    }
    let k = counts.len() as f64;
    let mean = counts.iter().sum::<u64>() as f64 / k;
    counts.iter().map(|&c| (c as f64 - mean) * (c as f64 - mean)).sum::<f64>() / k
}

#[cfg(test)]
mod tests {
    use super::*;
    use agentwire_core::eventlog::{EventKind::*, EventLog, EventRecord};

    fn log_of(events: &[(f64, EventKind, &str, &str)]) -> EventLog {
        let log = EventLog::new();
        for (t, kind, id, agent) in events {
            let mut rec = EventRecord::new(*t, *kind, *agent);
            if !id.is_empty() {
                rec = rec.with_request(*id);
            }
            log.append(rec);
        }
        log
    }

    #[test]
    fn e2e_is_done_minus_send() {
        let log = log_of(&[(1.0, Send, "r1", "driver"), (3.5, Done, "r1", "driver")]);
        assert_eq!(e2e_latency(&log, "r1"), Some(2.5));
    }

    #[test]
    fn missing_done_is_a_failure_not_a_latency() {
        let log = log_of(&[
            (1.0, Send, "r1", "driver"),
            (2.0, Send, "r2", "driver"),
            (2.5, Done, "r2", "driver"),
        ]);
        assert_eq!(e2e_latency(&log, "r1"), None);
        let out = request_outcomes(&log);
        assert_eq!(out.failed, vec!["r1".to_string()]);
        assert_eq!(out.completed, vec![("r2".to_string(), 0.5)]);
        assert_eq!(out.success_rate(), 0.5);
    }

    #[test]
    fn duration_is_span_over_sixty() {
        let log = log_of(&[(0.0, Send, "r1", "d"), (120.0, Done, "r1", "d")]);
        assert_eq!(run_duration_minutes(&log), 2.0);
    }

    #[test]
    fn empty_log_duration_is_zero() {
        assert_eq!(run_duration_minutes(&EventLog::new()), 0.0);
    }

    #[test]
    fn p95_of_one_to_hundred_is_ninety_five() {
        let values: Vec<f64> = (1..=100).map(|v| v as f64).collect();
        let s = summarize_latencies(&values).unwrap();
        assert_eq!(s.p95, 95.0);
        assert_eq!(s.min, 1.0);
        assert_eq!(s.max, 100.0);
        assert_eq!(s.median, 50.5);
    }

    #[test]
    fn nearest_rank_uses_integer_index() {
        // ceil(0.95 * 20) must be 19, not 20: the f64 product rounds above
        // 19 exactly and a float ceil would pick the wrong order statistic.
        let values: Vec<f64> = (1..=20).map(|v| v as f64).collect();
        assert_eq!(nearest_rank(&values, 95), 19.0);
        let values: Vec<f64> = (1..=40).map(|v| v as f64).collect();
        assert_eq!(nearest_rank(&values, 95), 38.0);
    }

    #[test]
    fn constant_values_have_zero_std() {
        let s = summarize_latencies(&[5.0, 5.0, 5.0]).unwrap();
        assert_eq!(s.mean, 5.0);
        assert_eq!(s.median, 5.0);
        assert_eq!(s.std_dev, 0.0);
    }

    #[test]
    fn singleton_summary_is_the_value_itself() {
        let s = summarize_latencies(&[7.0]).unwrap();
        assert_eq!((s.mean, s.min, s.max, s.median, s.p95, s.std_dev), (7.0, 7.0, 7.0, 7.0, 7.0, 0.0));
        assert_eq!(s.n, 1);
    }

    #[test]
    fn empty_summary_is_an_error() {
        assert_eq!(summarize_latencies(&[]), Err(MetricError::EmptyInput("summarize_latencies")));
    }

    #[test]
    fn balanced_workers_have_zero_variance() {
        assert_eq!(variance_of_counts(&[250, 250, 250, 250]), 0.0);
    }

    #[test]
    fn imbalanced_workers_match_direct_computation() {
        assert_eq!(variance_of_counts(&[300, 200, 250, 250]), 1250.0);
    }

    #[test]
    fn idle_workers_count_as_zero_when_roster_is_known() {
        let log = log_of(&[(1.0, ServiceEnd, "r1", "w1"), (2.0, ServiceEnd, "r2", "w1")]);
        let roster = vec!["w1".to_string(), "w2".to_string()];
        // counts [2, 0] -> mean 1, variance 1
        assert_eq!(load_balance_variance(&log, Some(&roster)), 1.0);
        // without a roster only w1 is visible -> variance 0
        assert_eq!(load_balance_variance(&log, None), 0.0);
    }
}
