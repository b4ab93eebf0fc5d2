//! Exact-or-sampled values and the deterministic parallel sampling they use.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// A value that is either exact (`std_error == None`) or a Monte-Carlo
/// estimate with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub std_error: Option<f64>,
}

impl Estimate {
    pub fn exact(value: f64) -> Self {
        Self {
            value,
            std_error: None,
        }
    }

    pub fn sampled(value: f64, std_error: f64) -> Self {
        Self {
            value,
            std_error: Some(std_error),
        }
    }

    pub fn is_exact(&self) -> bool {
        self.std_error.is_none()
    }

    /// Whether `other` lies within `k` standard errors of this estimate.
    pub fn agrees_with(&self, other: f64, k: f64) -> bool {
        let se = self.std_error.unwrap_or(0.0);
        (self.value - other).abs() <= k * se
    }
}

/// Standard error of a proportion from the Wilson score interval at `z = 1`
/// (its half-width). Stays positive when no or all trials succeed.
pub fn wilson_std_error(successes: u64, trials: u64) -> f64 {
    let n = trials as f64;
    let p = successes as f64 / n;
    (p * (1.0 - p) / n + 1.0 / (4.0 * n * n)).sqrt() / (1.0 + 1.0 / n)
}

const CHUNK: u64 = 1 << 14;

/// Runs `samples` draws split into fixed chunks, each with its own ChaCha
/// stream, and folds the per-chunk results in chunk order. The result does
/// not depend on the number of worker threads.
pub(crate) fn sample_chunks<T, F>(samples: u64, seed: u64, per_chunk: F) -> Vec<T>
where
    T: Send,
    F: Fn(&mut ChaCha8Rng, u64) -> T + Sync,
{
    let chunks = samples.div_ceil(CHUNK);
    (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(c + 1);
            let len = CHUNK.min(samples - c * CHUNK);
            per_chunk(&mut rng, len)
        })
        .collect()
}
