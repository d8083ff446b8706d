//! Metrics over event logs: end-to-end latency and its summary statistics,
//! run duration, fault windows with time-to-recovery and retention, load
//! balance variance, and BCa bootstrap confidence intervals. Everything here
//! is a pure function of the log (plus a seed for the bootstrap), so every
//! number is reproducible and independently recomputable.

pub mod bootstrap;
pub mod error;
pub mod latency;
pub mod report;
pub mod testkit;
pub mod windows;

pub use bootstrap::{bootstrap_ci, bootstrap_ci_mean, DEFAULT_BOOTSTRAP_RESAMPLES};
pub use error::MetricError;
pub use latency::{
    e2e_latency, load_balance_variance, request_outcomes, run_duration_minutes,
    summarize_latencies, LatencySummary, RequestOutcomes,
};
pub use report::RunReport;
pub use windows::{
    fault_windows, fault_windows_with, kill_cycles, recovery_report, recovery_report_with_window,
    retention, ttr, CycleReport, FaultWindows, KillCycle, WINDOW_SECS,
};
