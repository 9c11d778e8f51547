use rand::Rng;
use serde::Serialize;

use super::parallel::{map_paths, run_paths};
use super::{derive_seed, exponential, uniform_open, MCEstimate, McConfig};
use crate::error::{Error, Result};

/// How a vector of uniform order statistics is produced.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum OrderStatsPath {
    /// Draw `n` uniforms and sort them.
    Sorted,
    /// `U_{i,n} = S_i / S_{n+1}` from `n + 1` exponential spacings.
    Spacings,
}

fn min_scaled_partial_sums(values: impl Iterator<Item = f64>) -> f64 {
    let mut sum = 0.0;
    let mut best = f64::INFINITY;
    for (i, u) in values.enumerate() {
        sum += u;
        let k = (i + 1) as f64;
        best = best.min(2.0 * sum / (k * (k + 1.0)));
    }
    best
}

/// `min_k 2n/(k(k+1)) * sum_{i <= k} U_{i,n}` from sorted uniforms.
pub fn orderstats_functional_sorted<R: Rng + ?Sized>(n: usize, rng: &mut R, buf: &mut Vec<f64>) -> f64 {
    buf.clear();
    buf.extend((0..n).map(|_| uniform_open(rng)));
    buf.sort_unstable_by(f64::total_cmp);
    n as f64 * min_scaled_partial_sums(buf.iter().copied())
}

/// Same functional from the representation `U_{i,n} = S_i / S_{n+1}`.
pub fn orderstats_functional_spacings<R: Rng + ?Sized>(n: usize, rng: &mut R, buf: &mut Vec<f64>) -> f64 {
    buf.clear();
    let mut s = 0.0;
    for _ in 0..n {
        s += exponential(rng);
        buf.push(s);
    }
    let total = s + exponential(rng);
    n as f64 / total * min_scaled_partial_sums(buf.iter().copied())
}

fn functional(path: OrderStatsPath, n: usize, rng: &mut impl Rng, buf: &mut Vec<f64>) -> f64 {
    match path {
        OrderStatsPath::Sorted => orderstats_functional_sorted(n, rng, buf),
        OrderStatsPath::Spacings => orderstats_functional_spacings(n, rng, buf),
    }
}

/// Seed used by the spacings path so that it is independent of the sorted
/// path run with the same configuration.
pub(crate) fn spacings_seed(seed: u64) -> u64 {
    derive_seed(seed, 0x5bac_1265)
}

/// One value of the functional per sample, in stream order.
pub fn functional_samples(n: usize, path: OrderStatsPath, cfg: &McConfig) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::invalid("n must be at least 1"));
    }
    cfg.validate()?;
    let cfg = match path {
        OrderStatsPath::Sorted => *cfg,
        OrderStatsPath::Spacings => cfg.with_seed(spacings_seed(cfg.seed)),
    };
    Ok(map_paths(&cfg, |rng| functional(path, n, rng, &mut Vec::with_capacity(n + 1))))
}

#[derive(Clone, Debug, Serialize)]
pub struct OrderStatsEstimate {
    pub sorted: MCEstimate,
    pub spacings: MCEstimate,
    /// `(sorted - spacings) / combined stderr`.
    pub z: f64,
    /// `|z| <= 4`.
    pub agree: bool,
}

fn estimate_path(t: f64, n: usize, path: OrderStatsPath, cfg: &McConfig) -> MCEstimate {
    let hits: u64 = run_paths(cfg, |rng, hits: &mut u64| {
        let mut buf = Vec::with_capacity(n + 1);
        if functional(path, n, rng, &mut buf) >= t {
            *hits += 1;
        }
    });
    let name = match path {
        OrderStatsPath::Sorted => "Gn_orderstats_sorted",
        OrderStatsPath::Spacings => "Gn_orderstats_spacings",
    };
    MCEstimate::from_bernoulli(name, &[("t", t), ("n", n as f64)], hits, cfg.samples, cfg.seed)
}

/// `P{min_k 2n/(k(k+1)) sum_{i<=k} U_{i,n} >= t}` by both sampling paths.
pub fn estimate_gn_orderstats(t: f64, n: usize, cfg: &McConfig) -> Result<OrderStatsEstimate> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::domain(format!("t = {t} must lie in [0, 1]")));
    }
    if n == 0 {
        return Err(Error::invalid("n must be at least 1"));
    }
    cfg.validate()?;
    let sorted = estimate_path(t, n, OrderStatsPath::Sorted, cfg);
    let spacings = estimate_path(t, n, OrderStatsPath::Spacings, &cfg.with_seed(spacings_seed(cfg.seed)));
    let se = sorted.combined_stderr(&spacings);
    let d = sorted.mean - spacings.mean;
    let z = if se == 0.0 { if d == 0.0 { 0.0 } else { f64::INFINITY } } else { d / se };
    Ok(OrderStatsEstimate { agree: z.abs() <= 4.0, sorted, spacings, z })
}
