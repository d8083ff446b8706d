//! Caller-side retry with capped exponential backoff and full jitter. The
//! adapter itself never retries; this wrapper re-stamps the attempt index
//! into the envelope so the wire tap classes retried frames as overhead.

use std::time::Duration;

use agentwire_core::{Envelope, ErrorKind, PalError};
use rand::Rng;
use rand_chacha::ChaCha20Rng;

use crate::adapter::ProtocolAdapter;

#[derive(Clone, Copy, Debug)]
pub struct RetryPolicy {
    /// Retries after the first attempt; 3 means at most 4 attempts total.
    pub max_retries: u32,
    pub base_delay_secs: f64,
    pub backoff_factor: f64,
}

impl Default for RetryPolicy {
    fn default() -> Self {
        RetryPolicy { max_retries: 3, base_delay_secs: 0.1, backoff_factor: 2.0 }
    }
}

/// Transport-level failures are worth another attempt; local encode/decode
/// and capability errors are not.
pub fn is_retryable(kind: ErrorKind) -> bool {
    matches!(kind, ErrorKind::Timeout | ErrorKind::Conn | ErrorKind::Http)
}

/// Upper bound of the jitter window before retry number `attempt + 1`.
pub fn backoff_cap(policy: RetryPolicy, attempt: u32) -> f64 {
    policy.base_delay_secs * policy.backoff_factor.powi(attempt as i32)
}

pub async fn send_with_retry(
    adapter: &mut dyn ProtocolAdapter,
    e: &Envelope,
    policy: RetryPolicy,
    rng: &mut ChaCha20Rng,
) -> Result<Envelope, PalError> {
    let mut attempt: u32 = 0;
    loop {
        let mut try_env = e.clone();
        try_env.meta.retry_count = attempt;
        match adapter.send(&try_env).await {
            Ok(reply) => return Ok(reply),
            Err(err) => {
                if attempt >= policy.max_retries || !is_retryable(err.kind) {
                    return Err(err);
                }
                let cap = backoff_cap(policy, attempt);
                let delay = rng.random_range(0.0..cap);
                tokio::time::sleep(Duration::from_secs_f64(delay)).await;
                attempt += 1;
            }
        }
    }
}
