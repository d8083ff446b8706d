//! Bias-corrected and accelerated (BCa) bootstrap confidence intervals.
//!
//! The bias term z0 comes from the bootstrap distribution's position of the
//! sample statistic; the acceleration term from jackknife skewness. Endpoint
//! quantiles are nearest-rank over the sorted bootstrap replicates, so two
//! runs with the same seed produce the same interval down to the bit.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha20Rng;
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::MetricError;

pub const DEFAULT_BOOTSTRAP_RESAMPLES: usize = 10_000;

/// BCa interval for an arbitrary statistic. Constant data short-circuits to
/// the degenerate interval (v, v).
pub fn bootstrap_ci<F>(
    values: &[f64],
    resamples: usize,
    level: f64,
    seed: u64,
    stat: F,
) -> Result<(f64, f64), MetricError>
where
    F: Fn(&[f64]) -> f64,
{
    if values.is_empty() {
        return Err(MetricError::EmptyInput("bootstrap_ci"));
    }
    if !(0.0..1.0).contains(&level) || level <= 0.0 {
        return Err(MetricError::Data(format!("confidence level {level} outside (0, 1)")));
    }
    if resamples < 2 {
        return Err(MetricError::Data("need at least 2 resamples".into()));
    }
    let n = values.len();
    let first = values[0];
    if values.iter().all(|&v| v == first) {
        let v = stat(values);
        return Ok((v, v));
    }

    let theta_hat = stat(values);

    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut thetas = Vec::with_capacity(resamples);
    let mut scratch = vec![0.0f64; n];
    for _ in 0..resamples {
        for slot in scratch.iter_mut() {
            *slot = values[rng.random_range(0..n)];
        }
        thetas.push(stat(&scratch));
    }
    let mut sorted = thetas.clone();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("bootstrap statistics are finite"));

    let normal = Normal::new(0.0, 1.0).expect("standard normal");
    let below = thetas.iter().filter(|&&t| t < theta_hat).count();
    let b = resamples as f64;
    // Clamp away from 0 and 1 so z0 stays finite on lopsided distributions.
    let p0 = ((below as f64) / b).clamp(1.0 / (2.0 * b), 1.0 - 1.0 / (2.0 * b));
    let z0 = normal.inverse_cdf(p0);

    // Jackknife acceleration.
    let mut jack = Vec::with_capacity(n);
    let mut loo = Vec::with_capacity(n - 1);
    for i in 0..n {
        loo.clear();
        loo.extend_from_slice(&values[..i]);
        loo.extend_from_slice(&values[i + 1..]);
        jack.push(stat(&loo));
    }
    let jack_mean = jack.iter().sum::<f64>() / n as f64;
    let (mut num, mut den) = (0.0, 0.0);
    for j in &jack {
        let d = jack_mean - j;
        num += d * d * d;
        den += d * d;
    }
    let accel = if den > 0.0 { num / (6.0 * den.powf(1.5)) } else { 0.0 };

    let alpha = 1.0 - level;
    let lo = bca_endpoint(&sorted, &normal, z0, accel, alpha / 2.0);
    let hi = bca_endpoint(&sorted, &normal, z0, accel, 1.0 - alpha / 2.0);
    Ok((lo, hi))
}

fn bca_endpoint(sorted: &[f64], normal: &Normal, z0: f64, accel: f64, q: f64) -> f64 {
    let zq = normal.inverse_cdf(q);
    let denom = 1.0 - accel * (z0 + zq);
    let adjusted = if denom.abs() < 1e-12 {
        // Degenerate acceleration; fall back to the percentile endpoint.
        q
    } else {
        normal.cdf(z0 + (z0 + zq) / denom)
    };
    nearest_rank_quantile(sorted, adjusted)
}

fn nearest_rank_quantile(sorted: &[f64], q: f64) -> f64 {
    let b = sorted.len();
    let idx = ((q * b as f64).ceil() as usize).clamp(1, b);
    sorted[idx - 1]
}

/// 95%-style interval for the sample mean.
pub fn bootstrap_ci_mean(
    values: &[f64],
    resamples: usize,
    level: f64,
    seed: u64,
) -> Result<(f64, f64), MetricError> {
    bootstrap_ci(values, resamples, level, seed, |v| {
        v.iter().sum::<f64>() / v.len() as f64
    })
}
