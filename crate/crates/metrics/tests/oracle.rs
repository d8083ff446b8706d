//! Oracle equivalence: on seeded synthetic logs, every production statistic
//! equals the naive brute-force recomputation exactly, bit for bit on the
//! same f64 representation.

use agentwire_metrics::testkit::{
    brute_force_cycles, brute_force_duration_minutes, brute_force_latencies,
    brute_force_summary, synthetic_log,
};
use agentwire_metrics::{
    recovery_report, request_outcomes, run_duration_minutes, summarize_latencies,
};

#[test]
fn fifty_seeded_logs_match_brute_force_bit_for_bit() {
    for seed in 0..50u64 {
        let (log, truth) = synthetic_log(seed);

        let outcomes = request_outcomes(&log);
        let latencies = outcomes.latencies();
        let brute_lat = brute_force_latencies(&log);
        assert_eq!(latencies, brute_lat, "seed {seed}: latency extraction");
        assert_eq!(outcomes.failed.len(), truth.failed.len(), "seed {seed}: failures");

        let s = summarize_latencies(&latencies).unwrap();
        let b = brute_force_summary(&brute_lat);
        assert_eq!(s.mean.to_bits(), b.mean.to_bits(), "seed {seed}: mean");
        assert_eq!(s.min.to_bits(), b.min.to_bits(), "seed {seed}: min");
        assert_eq!(s.max.to_bits(), b.max.to_bits(), "seed {seed}: max");
        assert_eq!(s.median.to_bits(), b.median.to_bits(), "seed {seed}: median");
        assert_eq!(s.std_dev.to_bits(), b.std_dev.to_bits(), "seed {seed}: std_dev");
        assert_eq!(s.p95.to_bits(), b.p95.to_bits(), "seed {seed}: p95");
        assert_eq!(s.n, b.n, "seed {seed}: n");

        assert_eq!(
            run_duration_minutes(&log).to_bits(),
            brute_force_duration_minutes(&log).to_bits(),
            "seed {seed}: duration"
        );

        let reports = recovery_report(&log);
        let brute = brute_force_cycles(&log, &truth);
        assert_eq!(reports.len(), brute.len(), "seed {seed}: cycle count");
        for (rep, (ttr, retention)) in reports.iter().zip(&brute) {
            assert_eq!(
                rep.ttr_seconds.unwrap().to_bits(),
                ttr.to_bits(),
                "seed {seed}: ttr"
            );
            match (rep.retention, retention) {
                (None, None) => {}
                (Some(a), Some(b)) => {
                    assert_eq!(a.to_bits(), b.to_bits(), "seed {seed}: retention")
                }
                other => panic!("seed {seed}: retention NA mismatch {other:?}"),
            }
        }
    }
}

#[test]
fn jsonl_round_trip_preserves_every_statistic() {
    for seed in [3u64, 17, 41] {
        let (log, _) = synthetic_log(seed);
        let text = log.to_jsonl_string();
        let back = agentwire_core::eventlog::EventLog::read_jsonl(text.as_bytes()).unwrap();
        let a = summarize_latencies(&request_outcomes(&log).latencies()).unwrap();
        let b = summarize_latencies(&request_outcomes(&back).latencies()).unwrap();
        assert_eq!(a.mean.to_bits(), b.mean.to_bits());
        assert_eq!(a.std_dev.to_bits(), b.std_dev.to_bits());
        assert_eq!(a.p95.to_bits(), b.p95.to_bits());
    }
}
