use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::StreamFactory;
use crate::error::{Error, Result};

const BATCH: u64 = 4096;

/// Sampling budget shared by all estimators. `threads = 0` uses the global
/// rayon pool.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct McConfig {
    pub samples: u64,
    pub seed: u64,
    pub threads: usize,
}

impl McConfig {
    pub fn new(samples: u64, seed: u64) -> Self {
        Self { samples, seed, threads: 0 }
    }

    pub fn with_threads(mut self, threads: usize) -> Self {
        self.threads = threads;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub(crate) fn validate(&self) -> Result<()> {
        if self.samples == 0 {
            return Err(Error::invalid("samples must be at least 1"));
        }
        Ok(())
    }
}

/// Integer tallies merged by addition; the merge must be exact so that the
/// reduction order is irrelevant.
pub(crate) trait Tally: Default + Send {
    fn merge(&mut self, other: Self);
}

impl Tally for u64 {
    fn merge(&mut self, other: Self) {
        *self += other;
    }
}

impl<const N: usize> Tally for [u64; N]
where
    [u64; N]: Default,
{
    fn merge(&mut self, other: Self) {
        for (a, b) in self.iter_mut().zip(other) {
            *a += b;
        }
    }
}

pub(crate) fn in_pool<T: Send>(threads: usize, job: impl FnOnce() -> T + Send) -> T {
    if threads == 0 {
        return job();
    }
    match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
        Ok(pool) => pool.install(job),
        Err(_) => job(),
    }
}

/// Runs `path(rng_i, tally)` for every sample index `i`, with `rng_i` the
/// stream `(cfg.seed, i)`, and sums the tallies.
pub(crate) fn run_paths<T, F>(cfg: &McConfig, path: F) -> T
where
    T: Tally,
    F: Fn(&mut ChaCha8Rng, &mut T) + Sync,
{
    let factory = StreamFactory::new(cfg.seed);
    let batches = cfg.samples.div_ceil(BATCH);
    in_pool(cfg.threads, || {
        (0..batches)
            .into_par_iter()
            .map(|b| {
                let mut tally = T::default();
                let end = ((b + 1) * BATCH).min(cfg.samples);
                for i in b * BATCH..end {
                    let mut rng = factory.stream(i);
                    path(&mut rng, &mut tally);
                }
                tally
            })
            .reduce(T::default, |mut a, b| {
                a.merge(b);
                a
            })
    })
}

/// Ordered per-sample outputs, one per stream index.
pub(crate) fn map_paths<T, F>(cfg: &McConfig, path: F) -> Vec<T>
where
    T: Send,
    F: Fn(&mut ChaCha8Rng) -> T + Sync,
{
    let factory = StreamFactory::new(cfg.seed);
    in_pool(cfg.threads, || {
        (0..cfg.samples)
            .into_par_iter()
            .map(|i| path(&mut factory.stream(i)))
            .collect()
    })
}
