//! Run-report document: one scenario run reduced to its reportable numbers.
//! Serialization is deterministic (sorted keys via the BTree-backed JSON
//! values, stable field order here).

use agentwire_core::eventlog::EventLog;
use agentwire_core::meter::MetricsSnapshot;
use serde::{Deserialize, Serialize};

use crate::bootstrap::bootstrap_ci_mean;
use crate::latency::{
    load_balance_variance, request_outcomes, run_duration_minutes, summarize_latencies,
    LatencySummary,
};
use crate::windows::{recovery_report_with_window, CycleReport, WINDOW_SECS};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub scenario: String,
    pub protocol: String,
    pub seed: u64,
    pub completed: u64,
    pub failed: u64,
    pub success_rate: f64,
    pub duration_min: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub latency: Option<LatencySummary>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub latency_mean_ci95: Option<(f64, f64)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub load_balance_variance: Option<f64>,
    pub bytes: MetricsSnapshot,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub recovery: Vec<CycleReport>,
    /// Method notes (population std dev, nearest-rank percentiles, ...).
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

pub struct ReportInputs<'a> {
    pub scenario: &'a str,
    pub protocol: &'a str,
    pub seed: u64,
    pub log: &'a EventLog,
    pub snapshot: MetricsSnapshot,
    /// Full worker roster for load-balance variance; None skips the metric.
    pub workers: Option<&'a [String]>,
    /// Resamples for the latency-mean CI; None skips the CI.
    pub ci_resamples: Option<usize>,
    /// Fault-window width; None means the nominal 60 s.
    pub window_secs: Option<f64>,
}

impl RunReport {
    pub fn build(inputs: ReportInputs<'_>) -> RunReport {
        let outcomes = request_outcomes(inputs.log);
        let latencies = outcomes.latencies();
        let latency = summarize_latencies(&latencies).ok();
        let latency_mean_ci95 = inputs
            .ci_resamples
            .and_then(|b| bootstrap_ci_mean(&latencies, b, 0.95, inputs.seed).ok());
        let mut notes = vec![
            "std_dev is population (divide by n)".to_string(),
            "percentiles are nearest-rank on sorted values".to_string(),
        ];
        if latencies.is_empty() {
            notes.push("no completed requests; duration reported as 0".to_string());
        }
        RunReport {
            scenario: inputs.scenario.to_string(),
            protocol: inputs.protocol.to_string(),
            seed: inputs.seed,
            completed: outcomes.completed.len() as u64,
            failed: outcomes.failed.len() as u64,
            success_rate: outcomes.success_rate(),
            duration_min: run_duration_minutes(inputs.log),
            latency,
            latency_mean_ci95,
            load_balance_variance: inputs
                .workers
                .map(|w| load_balance_variance(inputs.log, Some(w))),
            bytes: inputs.snapshot,
            recovery: recovery_report_with_window(
                inputs.log,
                inputs.window_secs.unwrap_or(WINDOW_SECS),
            ),
            notes,
        }
    }
}

/// CSV of per-request latencies for external analysis: request_id,latency_s.
pub fn latencies_csv(log: &EventLog) -> String {
    let outcomes = request_outcomes(log);
    let mut out = String::from("request_id,latency_s\n");
    for (id, latency) in &outcomes.completed {
        out.push_str(id);
        out.push(',');
        out.push_str(&format!("{latency}"));
        out.push('\n');
    }
    out
}
