use std::io::Write;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{init_poisson, init_uniform, InvariantReport, SystemState};
use crate::curve::{format_f64, Curve};
use crate::error::{Error, Result};
use crate::montecarlo::{derive_seed, in_pool, StreamFactory};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum InitialModel {
    Uniform,
    Poisson,
}

impl InitialModel {
    pub fn name(self) -> &'static str {
        match self {
            InitialModel::Uniform => "uniform",
            InitialModel::Poisson => "poisson",
        }
    }

    fn salt(self) -> u64 {
        match self {
            InitialModel::Uniform => 0x5717_0001,
            InitialModel::Poisson => 0x5717_0002,
        }
    }

    pub fn init(self, n: usize, rng: &mut rand_chacha::ChaCha8Rng) -> Result<SystemState> {
        match self {
            InitialModel::Uniform => init_uniform(n, rng),
            InitialModel::Poisson => init_poisson(n, rng),
        }
    }
}

impl FromStr for InitialModel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform" => Ok(InitialModel::Uniform),
            "poisson" => Ok(InitialModel::Poisson),
            _ => Err(Error::invalid(format!("unknown model {s:?} (expected uniform or poisson)"))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct KCurvePoint {
    pub t: f64,
    /// Mean of `K_n(t)/n` over replicates.
    pub mean: f64,
    /// Sample standard deviation across replicates; zero for one replicate.
    pub stddev: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KCurve {
    pub n: usize,
    pub model: InitialModel,
    pub replicates: usize,
    pub seed: u64,
    pub points: Vec<KCurvePoint>,
}

impl KCurve {
    /// `max_t |mean K_n(t)/n - (1 - t^2)|`, with `1 - t^2` clamped at 0.
    pub fn max_deviation_from_limit(&self) -> f64 {
        self.points
            .iter()
            .map(|p| (p.mean - (1.0 - p.t * p.t).max(0.0)).abs())
            .fold(0.0, f64::max)
    }

    pub fn to_curve(&self) -> Result<Curve> {
        Curve::new(
            format!("K_{}/n ({})", self.n, self.model.name()),
            self.points.iter().map(|p| (p.t, p.mean)).collect(),
        )
    }

    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["t", "mean", "stddev", "n", "replicates", "model", "seed"])?;
        for p in &self.points {
            w.write_record([
                format_f64(p.t),
                format_f64(p.mean),
                format_f64(p.stddev),
                self.n.to_string(),
                self.replicates.to_string(),
                self.model.name().to_string(),
                self.seed.to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

/// The averaged curve together with the invariant report of every replicate.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct KCurveRun {
    pub curve: KCurve,
    pub invariants: Vec<InvariantReport>,
}

impl KCurveRun {
    pub fn all_invariants_hold(&self) -> bool {
        self.invariants.iter().all(InvariantReport::passed)
    }
}

fn validate_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::invalid("empty t grid"));
    }
    if grid.iter().any(|t| !(t.is_finite() && *t >= 0.0)) {
        return Err(Error::invalid("t grid values must be finite and non-negative"));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::invalid("t grid must be strictly increasing"));
    }
    Ok(())
}

/// Runs `replicates` independent systems to completion and averages
/// `K_n(t)/n` on `grid`. Replicate `r` uses stream `r` of a seed derived from
/// `seed` and the model, so the result does not depend on `threads`.
pub fn k_curve(
    n: usize,
    model: InitialModel,
    grid: &[f64],
    replicates: usize,
    seed: u64,
    threads: usize,
) -> Result<KCurveRun> {
    if n == 0 {
        return Err(Error::invalid("n must be at least 1"));
    }
    if replicates == 0 {
        return Err(Error::invalid("replicates must be at least 1"));
    }
    validate_grid(grid)?;
    let factory = StreamFactory::new(derive_seed(seed, model.salt()));
    let runs: Vec<Result<(Vec<usize>, InvariantReport)>> = in_pool(threads, || {
        (0..replicates)
            .into_par_iter()
            .map(|r| {
                let mut state = model.init(n, &mut factory.stream(r as u64))?;
                state.simulate(f64::INFINITY)?;
                Ok((state.k_on_grid(grid), state.check_invariants()))
            })
            .collect()
    });
    let mut counts = Vec::with_capacity(replicates);
    let mut invariants = Vec::with_capacity(replicates);
    for run in runs {
        let (k, inv) = run?;
        counts.push(k);
        invariants.push(inv);
    }
    let reps = replicates as f64;
    let points = grid
        .iter()
        .enumerate()
        .map(|(j, &t)| {
            let vals = counts.iter().map(|k| k[j] as f64 / n as f64);
            let mean = vals.clone().sum::<f64>() / reps;
            let stddev = if replicates > 1 {
                (vals.map(|v| (v - mean) * (v - mean)).sum::<f64>() / (reps - 1.0)).sqrt()
            } else {
                0.0
            };
            KCurvePoint { t, mean, stddev }
        })
        .collect();
    Ok(KCurveRun { curve: KCurve { n, model, replicates, seed, points }, invariants })
}
