//! Benchmark failures: unreadable corpus files are I/O errors, everything
//! else (bad mode wiring, missing prior) is configuration.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("corpus I/O: {0}")]
    Io(#[from] std::io::Error),
    #[error("benchmark configuration error: {0}")]
    Config(String),
}
