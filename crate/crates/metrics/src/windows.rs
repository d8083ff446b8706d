//! Fault windows around each kill cycle, time-to-recovery, and post-fault
//! retention.
//!
//! For a cycle with kill time k and recovery time r (the last affected
//! agent's reconnection): pre window [k-60, k), recovery [k, r], post
//! (r, r+60] truncated at the next cycle's kill. A request belongs to a
//! window when its done event falls inside it. Retention is post successes
//! over pre successes and is NA (excluded from aggregates) when the pre
//! window saw none.

use agentwire_core::eventlog::{EventKind, EventLog};
use serde::{Deserialize, Serialize};

use crate::error::MetricError;

pub const WINDOW_SECS: f64 = 60.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FaultWindows {
    /// [start, end): steady state before the kill.
    pub pre: (f64, f64),
    /// [kill, recovery]: the outage itself.
    pub recovery: (f64, f64),
    /// (recovery, end]: steady state after recovery, truncated at next kill.
    pub post: (f64, f64),
}

impl FaultWindows {
    pub fn in_pre(&self, t: f64) -> bool {
        t >= self.pre.0 && t < self.pre.1
    }

    pub fn in_recovery(&self, t: f64) -> bool {
        t >= self.recovery.0 && t <= self.recovery.1
    }

    pub fn in_post(&self, t: f64) -> bool {
        t > self.post.0 && t <= self.post.1
    }
}

pub fn fault_windows(
    kill_t: f64,
    recover_t: f64,
    next_kill: Option<f64>,
) -> Result<FaultWindows, MetricError> {
    fault_windows_with(kill_t, recover_t, next_kill, WINDOW_SECS)
}

/// Window math with an explicit width, for time-scaled runs where the
/// nominal 60 s windows shrink by the same factor as everything else.
pub fn fault_windows_with(
    kill_t: f64,
    recover_t: f64,
    next_kill: Option<f64>,
    window_secs: f64,
) -> Result<FaultWindows, MetricError> {
    if recover_t < kill_t {
        return Err(MetricError::Data(format!(
            "recovery at {recover_t} precedes kill at {kill_t}"
        )));
    }
    let mut post_end = recover_t + window_secs;
    if let Some(nk) = next_kill {
        post_end = post_end.min(nk);
    }
    Ok(FaultWindows {
        pre: (kill_t - window_secs, kill_t),
        recovery: (kill_t, recover_t),
        post: (recover_t, post_end),
    })
}

pub fn ttr(kill_t: f64, recover_t: f64) -> Result<f64, MetricError> {
    if recover_t < kill_t {
        return Err(MetricError::Data(format!(
            "recovery at {recover_t} precedes kill at {kill_t}"
        )));
    }
    Ok(recover_t - kill_t)
}

/// None means NA: no pre-window baseline to compare against.
pub fn retention(pre_n: u64, post_n: u64) -> Option<f64> {
    if pre_n == 0 {
        return None;
    }
    Some(post_n as f64 / pre_n as f64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KillCycle {
    pub kill_t: f64,
    pub killed: Vec<String>,
    /// Last affected agent's reconnection; None if any never rejoined.
    pub recover_t: Option<f64>,
}

/// Groups kill events that share a timestamp into cycles and pairs each
/// cycle with the last reconnection of its killed agents.
pub fn kill_cycles(log: &EventLog) -> Vec<KillCycle> {
    let records = log.records();
    let mut cycles: Vec<KillCycle> = Vec::new();
    for rec in &records {
        if rec.kind != EventKind::Kill {
            continue;
        }
        match cycles.last_mut() {
            Some(c) if c.kill_t == rec.t => c.killed.push(rec.agent.clone()),
            _ => cycles.push(KillCycle {
                kill_t: rec.t,
                killed: vec![rec.agent.clone()],
                recover_t: None,
            }),
        }
    }
    for cycle in cycles.iter_mut() {
        let mut last = f64::NEG_INFINITY;
        let mut all = true;
        for agent in &cycle.killed {
            let rejoin = records
                .iter()
                .find(|r| {
                    r.kind == EventKind::Reconnect && &r.agent == agent && r.t >= cycle.kill_t
                })
                .map(|r| r.t);
            match rejoin {
                Some(t) => last = last.max(t),
                None => all = false,
            }
        }
        if all && last.is_finite() {
            cycle.recover_t = Some(last);
        }
    }
    cycles
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CycleReport {
    pub kill_t: f64,
    pub recover_t: Option<f64>,
    pub ttr_seconds: Option<f64>,
    pub pre_success_count: u64,
    pub post_success_count: u64,
    /// None is NA: pre window had zero successes.
    pub retention: Option<f64>,
}

/// Per-cycle recovery report straight from the log. Successes are done
/// events whose timestamp falls in the respective window.
pub fn recovery_report(log: &EventLog) -> Vec<CycleReport> {
    recovery_report_with_window(log, WINDOW_SECS)
}

/// Recovery report with an explicit window width (scaled runs).
pub fn recovery_report_with_window(log: &EventLog, window_secs: f64) -> Vec<CycleReport> {
    let records = log.records();
    let cycles = kill_cycles(log);
    let mut reports = Vec::with_capacity(cycles.len());
    for (i, cycle) in cycles.iter().enumerate() {
        let Some(recover_t) = cycle.recover_t else {
            reports.push(CycleReport {
                kill_t: cycle.kill_t,
                recover_t: None,
                ttr_seconds: None,
                pre_success_count: 0,
                post_success_count: 0,
                retention: None,
            });
            continue;
        };
        let next_kill = cycles.get(i + 1).map(|c| c.kill_t);
        let windows = fault_windows_with(cycle.kill_t, recover_t, next_kill, window_secs)
            .expect("recover_t >= kill_t by construction");
        let mut pre = 0u64;
        let mut post = 0u64;
        for rec in &records {
            if rec.kind != EventKind::Done {
                continue;
            }
            if windows.in_pre(rec.t) {
                pre += 1;
            } else if windows.in_post(rec.t) {
                post += 1;
            }
        }
        reports.push(CycleReport {
            kill_t: cycle.kill_t,
            recover_t: Some(recover_t),
            ttr_seconds: Some(recover_t - cycle.kill_t),
            pre_success_count: pre,
            post_success_count: post,
            retention: retention(pre, post),
        });
    }
    reports
}

#[cfg(test)]
mod tests {
    use super::*;
    use agentwire_core::eventlog::EventRecord;

    #[test]
    fn ttr_matches_quoted_example() {
        assert_eq!(ttr(100.0, 108.0).unwrap(), 8.0);
    }

    #[test]
    fn recovery_before_kill_is_a_data_error() {
        assert!(ttr(100.0, 99.0).is_err());
        assert!(fault_windows(100.0, 99.0, None).is_err());
    }

    #[test]
    fn retention_ratio_and_na() {
        assert_eq!(retention(10, 9), Some(0.9));
        assert_eq!(retention(0, 5), None);
    }

    #[test]
    fn windows_are_disjoint_and_post_truncates() {
        let w = fault_windows(100.0, 108.0, Some(130.0)).unwrap();
        assert_eq!(w.pre, (40.0, 100.0));
        assert_eq!(w.recovery, (100.0, 108.0));
        assert_eq!(w.post, (108.0, 130.0));
        assert!(w.in_pre(99.999) && !w.in_pre(100.0));
        assert!(w.in_recovery(100.0) && w.in_recovery(108.0));
        assert!(!w.in_post(108.0) && w.in_post(108.001) && w.in_post(130.0) && !w.in_post(130.1));

        let w = fault_windows(100.0, 108.0, Some(500.0)).unwrap();
        assert_eq!(w.post, (108.0, 168.0));
    }

    #[test]
    fn cycles_group_simultaneous_kills_and_take_last_reconnect() {
        let log = EventLog::new();
        for agent in ["w1", "w2", "w3"] {
            log.append(EventRecord::new(120.0, EventKind::Kill, agent));
        }
        log.append(EventRecord::new(122.0, EventKind::Reconnect, "w1"));
        log.append(EventRecord::new(122.5, EventKind::Reconnect, "w3"));
        log.append(EventRecord::new(122.1, EventKind::Reconnect, "w2"));
        log.append(EventRecord::new(240.0, EventKind::Kill, "w4"));
        log.append(EventRecord::new(242.0, EventKind::Reconnect, "w4"));
        let cycles = kill_cycles(&log);
        assert_eq!(cycles.len(), 2);
        assert_eq!(cycles[0].killed.len(), 3);
        assert_eq!(cycles[0].recover_t, Some(122.5));
        assert_eq!(cycles[1].recover_t, Some(242.0));
    }

    #[test]
    fn unrecovered_cycle_reports_na() {
        let log = EventLog::new();
        log.append(EventRecord::new(120.0, EventKind::Kill, "w1"));
        let reports = recovery_report(&log);
        assert_eq!(reports.len(), 1);
        assert_eq!(reports[0].ttr_seconds, None);
        assert_eq!(reports[0].retention, None);
    }

    #[test]
    fn report_counts_dones_inside_windows() {
        let log = EventLog::new();
        // pre window [60, 120): three successes, one outside.
        for t in [20.0, 70.0, 90.0, 119.9] {
            log.append(EventRecord::new(t, EventKind::Done, "d").with_request(format!("p{t}")));
        }
        log.append(EventRecord::new(120.0, EventKind::Kill, "w1"));
        log.append(EventRecord::new(122.0, EventKind::Reconnect, "w1"));
        // post window (122, 182]: two successes; one during recovery.
        for t in [121.0, 123.0, 182.0, 183.0] {
            log.append(EventRecord::new(t, EventKind::Done, "d").with_request(format!("q{t}")));
        }
        let reports = recovery_report(&log);
        assert_eq!(reports[0].pre_success_count, 3);
        assert_eq!(reports[0].post_success_count, 2);
        assert_eq!(reports[0].retention, Some(2.0 / 3.0));
        assert_eq!(reports[0].ttr_seconds, Some(2.0));
    }
}
