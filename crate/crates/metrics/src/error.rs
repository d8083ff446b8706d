//! Metric computation failures. These are analysis errors, distinct from the
//! transport taxonomy: malformed logs and empty inputs, not wire faults.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MetricError {
    #[error("empty input: {0}")]
    EmptyInput(&'static str),
    #[error("data error: {0}")]
    Data(String),
}
