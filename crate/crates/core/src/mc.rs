//! Seeded Monte-Carlo harness.
//!
//! Trials are cut into fixed-size batches. Batch `i` draws from a ChaCha8
//! generator seeded with the run seed on stream `i`, so the random numbers a
//! batch sees do not depend on which worker runs it. Batch results are
//! collected in index order and reduced sequentially, which makes every
//! estimate bit-identical for any thread count.

use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};

/// Seed used when none is given.
pub const DEFAULT_SEED: u64 = 0x5EED_CAFE;

/// Trials per batch.
pub const BATCH_SIZE: usize = 512;

/// Trial count, seed and worker count for an estimator.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct McConfig {
    pub trials: usize,
    pub seed: u64,
    /// Worker threads; 0 uses the global rayon pool.
    pub threads: usize,
}

impl Default for McConfig {
    fn default() -> Self {
        McConfig { trials: 100_000, seed: DEFAULT_SEED, threads: 0 }
    }
}

impl McConfig {
    pub fn new(trials: usize, seed: u64) -> Self {
        McConfig { trials, seed, threads: 0 }
    }

    pub fn with_threads(mut self, threads: usize) -> Self {
        self.threads = threads;
        self
    }

    /// Same trial count and worker count on an unrelated seed.
    pub fn derived(&self, salt: u64) -> Self {
        let seed = self.seed ^ salt.wrapping_mul(0x9E37_79B9_7F4A_7C15).rotate_left(17);
        McConfig { seed, ..*self }
    }
}

/// Sample mean with its standard error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub mean: f64,
    pub std_err: f64,
    pub trials: usize,
}

/// The generator for batch `batch` of a run seeded with `seed`.
pub fn batch_rng(seed: u64, batch: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(batch);
    rng
}

/// Runs `f(rng, n)` once per batch, where `n` is the number of trials in the
/// batch, and returns the per-batch results in batch order.
pub fn run_batches<T, F>(cfg: &McConfig, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(&mut ChaCha8Rng, usize) -> Result<T> + Sync,
{
    if cfg.trials == 0 {
        return Err(Error::invalid("Monte-Carlo run needs at least one trial"));
    }
    let batches = cfg.trials.div_ceil(BATCH_SIZE);
    let job = |b: usize| {
        let n = BATCH_SIZE.min(cfg.trials - b * BATCH_SIZE);
        let mut rng = batch_rng(cfg.seed, b as u64);
        f(&mut rng, n)
    };
    if cfg.threads == 0 {
        (0..batches).into_par_iter().map(job).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.threads)
            .build()
            .map_err(|e| Error::invalid(format!("cannot start worker pool: {e}")))?;
        pool.install(|| (0..batches).into_par_iter().map(job).collect())
    }
}

#[derive(Clone)]
struct Moments {
    n: f64,
    mean: Vec<f64>,
    m2: Vec<f64>,
}

impl Moments {
    fn new(width: usize) -> Self {
        Moments { n: 0.0, mean: vec![0.0; width], m2: vec![0.0; width] }
    }

    fn push(&mut self, x: &[f64]) {
        self.n += 1.0;
        for ((m, s), &v) in self.mean.iter_mut().zip(self.m2.iter_mut()).zip(x) {
            let d = v - *m;
            *m += d / self.n;
            *s += d * (v - *m);
        }
    }

    fn merge(&mut self, other: &Moments) {
        if other.n == 0.0 {
            return;
        }
        let n = self.n + other.n;
        for i in 0..self.mean.len() {
            let d = other.mean[i] - self.mean[i];
            self.mean[i] += d * other.n / n;
            self.m2[i] += other.m2[i] + d * d * self.n * other.n / n;
        }
        self.n = n;
    }
}

/// Estimates the mean of a `width`-component statistic. `f` fills one
/// sample into its output slice.
pub fn run_trials<F>(cfg: &McConfig, width: usize, f: F) -> Result<Vec<Estimate>>
where
    F: Fn(&mut ChaCha8Rng, &mut [f64]) -> Result<()> + Sync,
{
    let parts = run_batches(cfg, |rng, n| {
        let mut acc = Moments::new(width);
        let mut buf = vec![0.0; width];
        for _ in 0..n {
            f(rng, &mut buf)?;
            acc.push(&buf);
        }
        Ok(acc)
    })?;
    let mut total = Moments::new(width);
    for p in &parts {
        total.merge(p);
    }
    let n = total.n;
    Ok((0..width)
        .map(|i| {
            let var = if n > 1.0 { total.m2[i] / (n - 1.0) } else { 0.0 };
            Estimate { mean: total.mean[i], std_err: (var / n).sqrt(), trials: cfg.trials }
        })
        .collect())
}

/// Scalar convenience wrapper around [`run_trials`].
pub fn estimate<F>(cfg: &McConfig, f: F) -> Result<Estimate>
where
    F: Fn(&mut ChaCha8Rng) -> Result<f64> + Sync,
{
    Ok(run_trials(cfg, 1, |rng, out| {
        out[0] = f(rng)?;
        Ok(())
    })?[0])
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn result_independent_of_thread_count() {
        let run = |threads| {
            let cfg = McConfig::new(5000, 11).with_threads(threads);
            estimate(&cfg, |rng| Ok(rng.random::<f64>())).unwrap()
        };
        let a = run(1);
        assert_eq!(a, run(3));
        assert_eq!(a, run(8));
        assert!((a.mean - 0.5).abs() < 4.0 * a.std_err);
    }

    #[test]
    fn zero_trials_rejected() {
        assert!(estimate(&McConfig::new(0, 1), |_| Ok(0.0)).is_err());
    }
}
