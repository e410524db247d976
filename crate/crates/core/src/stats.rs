//! Seeding and summary statistics shared by the Monte-Carlo drivers.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

/// Generator for trial `index` of a run seeded with `seed`.
pub fn trial_rng(seed: u64, index: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed ^ index)
}

/// Generator on a separate ChaCha stream, for draws that must not collide
/// with any trial stream (probe sets, dictionaries, noise calibration).
pub fn aux_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream + 1);
    rng
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Summary {
    pub mean: f64,
    pub std_error: f64,
    pub count: usize,
}

impl Summary {
    /// Normal-approximation 95% interval for the mean.
    pub fn ci95(&self) -> (f64, f64) {
        (self.mean - 1.96 * self.std_error, self.mean + 1.96 * self.std_error)
    }
}

/// Mean and standard error of the mean, summed in input order.
pub fn summarize(values: &[f64]) -> Summary {
    let count = values.len();
    if count == 0 {
        return Summary { mean: f64::NAN, std_error: f64::NAN, count };
    }
    let mean = values.iter().sum::<f64>() / count as f64;
    let var = if count > 1 { values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (count - 1) as f64 } else { 0.0 };
    Summary { mean, std_error: (var / count as f64).sqrt(), count }
}

pub fn median(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.total_cmp(b));
    let mid = v.len() / 2;
    if v.len() % 2 == 1 {
        v[mid]
    } else {
        0.5 * (v[mid - 1] + v[mid])
    }
}

/// Wilson score interval for a binomial proportion at 95%.
pub fn wilson95(successes: u64, trials: u64) -> (f64, f64) {
    if trials == 0 {
        return (0.0, 1.0);
    }
    let z = 1.96f64;
    let n = trials as f64;
    let p = successes as f64 / n;
    let denom = 1.0 + z * z / n;
    let centre = (p + z * z / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z * z / (4.0 * n * n)).sqrt() / denom;
    ((centre - half).max(0.0), (centre + half).min(1.0))
}

/// One-sided exact sign test: probability of at least `positive` successes
/// out of `positive + negative` fair coin flips. Ties are dropped by the caller.
pub fn sign_test_p(positive: u64, negative: u64) -> f64 {
    let n = positive + negative;
    if n == 0 {
        return 1.0;
    }
    let ln_half_n = n as f64 * 0.5f64.ln();
    let mut ln_c = 0.0;
    let mut p = 0.0;
    for i in 0..=n {
        if i >= positive {
            p += (ln_c + ln_half_n).exp();
        }
        if i < n {
            ln_c += ((n - i) as f64).ln() - ((i + 1) as f64).ln();
        }
    }
    p.min(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn summary_basics() {
        let s = summarize(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(s.mean, 2.5);
        assert!((s.std_error - (5.0f64 / 3.0 / 4.0).sqrt()).abs() < 1e-12);
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert_eq!(median(&[4.0, 1.0, 2.0, 3.0]), 2.5);
    }

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let a: u64 = trial_rng(7, 3).random();
        let b: u64 = trial_rng(7, 3).random();
        let c: u64 = aux_rng(7, 0).random();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn wilson_contains_estimate() {
        let (lo, hi) = wilson95(5, 1000);
        assert!(lo < 0.005 && 0.005 < hi);
        let (lo, hi) = wilson95(0, 1000);
        assert_eq!(lo, 0.0);
        assert!(hi < 0.004);
    }

    #[test]
    fn sign_test_tails() {
        assert_eq!(sign_test_p(0, 0), 1.0);
        assert!((sign_test_p(0, 10) - 1.0).abs() < 1e-12);
        assert!((sign_test_p(10, 0) - 0.5f64.powi(10)).abs() < 1e-15);
        assert!((sign_test_p(9, 1) - 11.0 / 1024.0).abs() < 1e-12);
        assert!((sign_test_p(2, 2) - 11.0 / 16.0).abs() < 1e-12);
    }
}
