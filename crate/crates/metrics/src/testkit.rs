//! Synthetic event logs and an independent brute-force recomputation of
//! every reported statistic. The brute-force paths are deliberately naive
//! (explicit scans and branches, no shared helpers) so they can serve as an
//! oracle for the production formulas: both must agree bit for bit on the
//! same inputs.

use agentwire_core::eventlog::{EventKind, EventLog, EventRecord};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha20Rng;

/// Ground truth the generator knows by construction.
#[derive(Debug, Clone, Default)]
pub struct SyntheticTruth {
    /// (request_id, send_t, done_t) for completed requests, in send order.
    pub completed: Vec<(String, f64, f64)>,
    pub failed: Vec<String>,
    /// (kill_t, recover_t) per cycle, in order.
    pub cycles: Vec<(f64, f64)>,
}

/// Seeded synthetic log: a few dozen requests with varied latencies, some
/// failures, worker service events, and one or two kill/reconnect cycles.
pub fn synthetic_log(seed: u64) -> (EventLog, SyntheticTruth) {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let log = EventLog::new();
    let mut truth = SyntheticTruth::default();

    let n: usize = rng.random_range(5..40);
    let mut t = 0.0f64;
    for i in 0..n {
        let id = format!("r{seed}_{i}");
        t += rng.random_range(0.05..2.0);
        let send = t;
        log.append(EventRecord::new(send, EventKind::Send, "driver").with_request(&id));
        let worker = format!("w{}", rng.random_range(0..4u8));
        log.append(
            EventRecord::new(send + 0.001, EventKind::ServiceStart, &worker).with_request(&id),
        );
        let service = rng.random_range(0.002..0.5);
        log.append(
            EventRecord::new(send + 0.001 + service, EventKind::ServiceEnd, &worker)
                .with_request(&id),
        );
        if rng.random_range(0..10u8) == 0 {
            truth.failed.push(id);
        } else {
            let done = send + 0.001 + service + rng.random_range(0.001..0.2);
            log.append(EventRecord::new(done, EventKind::Done, "driver").with_request(&id));
            truth.completed.push((id, send, done));
        }
    }

    let cycles = rng.random_range(1..3u8);
    let mut k = t + rng.random_range(30.0..90.0);
    for c in 0..cycles {
        let killed: Vec<String> = (0..3).map(|j| format!("n{}", (c * 3 + j) % 8)).collect();
        for agent in &killed {
            log.append(EventRecord::new(k, EventKind::Kill, agent));
        }
        let mut last = k;
        for agent in &killed {
            let back = k + 2.0 + rng.random_range(0.0..1.0);
            last = last.max(back);
            log.append(EventRecord::new(back, EventKind::Reconnect, agent));
        }
        // A couple of post-recovery completions so retention has data.
        for j in 0..rng.random_range(1..4u8) {
            let id = format!("post{seed}_{c}_{j}");
            let send = last + 0.5 + j as f64;
            log.append(EventRecord::new(send, EventKind::Send, "driver").with_request(&id));
            let done = send + 0.05;
            log.append(EventRecord::new(done, EventKind::Done, "driver").with_request(&id));
            truth.completed.push((id, send, done));
        }
        truth.cycles.push((k, last));
        k += rng.random_range(100.0..160.0);
    }

    (log, truth)
}

/// Brute-force summary: same statistics as LatencySummary, recomputed from
/// scratch with explicit loops.
#[derive(Debug, Clone, PartialEq)]
pub struct BruteSummary {
    pub mean: f64,
    pub min: f64,
    pub max: f64,
    pub std_dev: f64,
    pub median: f64,
    pub p95: f64,
    pub n: usize,
}

pub fn brute_force_summary(values: &[f64]) -> BruteSummary {
    assert!(!values.is_empty());
    let n = values.len();
    let mut total = 0.0;
    for v in values {
        total += *v;
    }
    let mean = total / n as f64;
    let mut sq = 0.0;
    for v in values {
        sq += (*v - mean) * (*v - mean);
    }
    let std_dev = (sq / n as f64).sqrt();
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let median = if n % 2 == 1 {
        sorted[n / 2]
    } else {
        (sorted[n / 2 - 1] + sorted[n / 2]) / 2.0
    };
    // 1-based nearest rank by counting, no shared index helper.
    let mut idx = 0usize;
    while idx * 100 < 95 * n {
        idx += 1;
    }
    let p95 = sorted[idx - 1];
    BruteSummary { mean, min: sorted[0], max: sorted[n - 1], std_dev, median, p95, n }
}

/// Brute-force per-request latencies from a raw log scan, in send order.
pub fn brute_force_latencies(log: &EventLog) -> Vec<f64> {
    let records = log.records();
    let mut out = Vec::new();
    let mut seen: Vec<&str> = Vec::new();
    for rec in &records {
        if rec.kind != EventKind::Send {
            continue;
        }
        let Some(id) = rec.request_id.as_deref() else { continue };
        if seen.contains(&id) {
            continue;
        }
        seen.push(id);
        let mut done = None;
        for other in &records {
            if other.kind == EventKind::Done && other.request_id.as_deref() == Some(id) {
                done = Some(other.t);
                break;
            }
        }
        if let Some(done_t) = done {
            out.push(done_t - rec.t);
        }
    }
    out
}

pub fn brute_force_duration_minutes(log: &EventLog) -> f64 {
    let records = log.records();
    let mut min_send: Option<f64> = None;
    let mut max_done: Option<f64> = None;
    for rec in &records {
        if rec.kind == EventKind::Send && min_send.is_none_or(|m| rec.t < m) {
            min_send = Some(rec.t);
        }
        if rec.kind == EventKind::Done && max_done.is_none_or(|m| rec.t > m) {
            max_done = Some(rec.t);
        }
    }
    match (min_send, max_done) {
        (Some(a), Some(b)) => (b - a) / 60.0,
        _ => 0.0,
    }
}

/// Brute-force per-cycle TTR and retention from truth timestamps plus a raw
/// done-event scan.
pub fn brute_force_cycles(log: &EventLog, truth: &SyntheticTruth) -> Vec<(f64, Option<f64>)> {
    let records = log.records();
    let mut out = Vec::new();
    for (i, &(k, r)) in truth.cycles.iter().enumerate() {
        let ttr = r - k;
        let mut post_end = r + 60.0;
        if let Some(&(nk, _)) = truth.cycles.get(i + 1) {
            if nk < post_end {
                post_end = nk;
            }
        }
        let mut pre = 0u64;
        let mut post = 0u64;
        for rec in &records {
            if rec.kind != EventKind::Done {
                continue;
            }
            if rec.t >= k - 60.0 && rec.t < k {
                pre += 1;
            }
            if rec.t > r && rec.t <= post_end {
                post += 1;
            }
        }
        let retention = if pre == 0 { None } else { Some(post as f64 / pre as f64) };
        out.push((ttr, retention));
    }
    out
}
