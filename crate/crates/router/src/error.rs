//! Router failures are configuration problems, not runtime conditions.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum RouterError {
    #[error("router configuration error: {0}")]
    Config(String),
    #[error("rationale lint: {0}")]
    Rationale(String),
}
