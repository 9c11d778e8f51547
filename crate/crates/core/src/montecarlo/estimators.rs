use serde::Serialize;

use super::parallel::run_paths;
use super::{derive_seed, AreaWalk, MCEstimate, McConfig};
use crate::error::{Error, Result};
use crate::exact::{c_sequence, to_f64};

/// Default finite-difference window for partial densities.
pub const DEFAULT_WIDTH: f64 = 0.02;
/// Default distance from 1 below which the infinite-horizon estimator
/// refuses to run.
pub const DEFAULT_GUARD: f64 = 0.05;

fn check_unit(t: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::domain(format!("t = {t} must lie in [0, 1]")));
    }
    Ok(())
}

fn check_n(n: usize) -> Result<()> {
    if n == 0 {
        return Err(Error::invalid("n must be at least 1"));
    }
    Ok(())
}

/// `G_n(t) = P{min_{k <= n} Y_k >= t}`. Each path stops at the first
/// `Y_k < t`.
pub fn estimate_gn(t: f64, n: usize, cfg: &McConfig) -> Result<MCEstimate> {
    check_unit(t)?;
    check_n(n)?;
    cfg.validate()?;
    let hits: u64 = run_paths(cfg, |rng, hits: &mut u64| {
        let mut walk = AreaWalk::new();
        for _ in 0..n {
            if walk.step(rng).1 < t {
                return;
            }
        }
        *hits += 1;
    });
    Ok(MCEstimate::from_bernoulli("Gn", &[("t", t), ("n", n as f64)], hits, cfg.samples, cfg.seed))
}

/// Truncation policy for [`estimate_g`].
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct GOptions {
    /// Walk length `n0`; `None` picks [`default_horizon`].
    pub horizon: Option<usize>,
    /// Refuse `t > 1 - guard`.
    pub guard: f64,
}

impl Default for GOptions {
    fn default() -> Self {
        Self { horizon: None, guard: DEFAULT_GUARD }
    }
}

/// `ceil(50 / (1 - t)^2)`: the truncation bias is governed by
/// `P{inf_{i > n} S_i / i < t}`, which decays like `exp(-c n (1-t)^2)`.
pub fn default_horizon(t: f64) -> usize {
    let raw = 50.0 / ((1.0 - t) * (1.0 - t));
    // Absorb rounding so that e.g. t = 0.8 gives 1250, not 1251.
    (raw * (1.0 - 1e-12)).ceil() as usize
}

/// Infinite-horizon `G(t)` approximated by `G_{n0}(t) >= G(t)`.
///
/// Surviving paths are continued to `2 n0`; the fraction that fails there is
/// recorded as `bias_proxy` (an estimate of `G_{n0} - G_{2 n0}`), and a note
/// is attached when it exceeds a tenth of the standard error.
pub fn estimate_g(t: f64, cfg: &McConfig, opts: GOptions) -> Result<MCEstimate> {
    check_unit(t)?;
    cfg.validate()?;
    if !(opts.guard > 0.0 && opts.guard < 1.0) {
        return Err(Error::invalid(format!("guard = {} must lie in (0, 1)", opts.guard)));
    }
    if t > 1.0 - opts.guard {
        return Err(Error::domain(format!(
            "t = {t} is closer to 1 than the guard {}: the horizon needed to bound the \
             truncation bias grows like 1/(1-t)^2; lower t or the guard",
            opts.guard
        )));
    }
    let horizon = opts.horizon.unwrap_or_else(|| default_horizon(t));
    check_n(horizon)?;
    let [hits, late]: [u64; 2] = run_paths(cfg, |rng, tally: &mut [u64; 2]| {
        let mut walk = AreaWalk::new();
        for _ in 0..horizon {
            if walk.step(rng).1 < t {
                return;
            }
        }
        tally[0] += 1;
        for _ in 0..horizon {
            if walk.step(rng).1 < t {
                tally[1] += 1;
                return;
            }
        }
    });
    let bias_proxy = late as f64 / cfg.samples as f64;
    let mut est = MCEstimate::from_bernoulli(
        "G",
        &[
            ("t", t),
            ("horizon", horizon as f64),
            ("guard", opts.guard),
            ("bias_proxy", bias_proxy),
        ],
        hits,
        cfg.samples,
        cfg.seed,
    );
    let limit = est.stderr / 10.0;
    if bias_proxy > limit {
        est = est.with_note(format!(
            "bias proxy G_n0 - G_2n0 = {bias_proxy:.3e} exceeds stderr/10 = {limit:.3e}; increase the horizon"
        ));
    }
    Ok(est)
}

/// Frequency with which `argmin_{i <= n} Y_i = k` (1-based). Exact float
/// ties keep the smaller index and are counted in `params["ties"]`.
pub fn estimate_argmin_prob(n: usize, k: usize, cfg: &McConfig) -> Result<MCEstimate> {
    check_n(n)?;
    cfg.validate()?;
    if k == 0 || k > n {
        return Err(Error::invalid(format!("argmin index k = {k} must lie in 1..={n}")));
    }
    let [hits, ties]: [u64; 2] = run_paths(cfg, |rng, tally: &mut [u64; 2]| {
        let mut walk = AreaWalk::new();
        let mut best = (1, walk.step(rng).1);
        for i in 2..=n {
            let y = walk.step(rng).1;
            if y < best.1 {
                best = (i, y);
            } else if y == best.1 {
                tally[1] += 1;
            }
        }
        if best.0 == k {
            tally[0] += 1;
        }
    });
    let mut est = MCEstimate::from_bernoulli(
        "argmin",
        &[("n", n as f64), ("k", k as f64), ("ties", ties as f64)],
        hits,
        cfg.samples,
        cfg.seed,
    );
    if ties > 0 {
        est = est.with_note(format!("{ties} exact ties broken toward the smaller index"));
    }
    Ok(est)
}

/// Partial density `g_n^(k)(t)` as the symmetric difference quotient
/// `(F(t - w/2) - F(t + w/2)) / w` with
/// `F(s) = P{argmin = k, Y_k >= s}`, i.e. the probability that the minimum
/// sits at `k` and falls in `[t - w/2, t + w/2)`, divided by `w`.
///
/// With `richardson` the quotients for `w` and `w/2` are combined as
/// `(4 D(w/2) - D(w)) / 3` on the same paths, cancelling the `O(w^2)` term.
pub fn estimate_partial_density(
    n: usize,
    k: usize,
    t: f64,
    width: f64,
    richardson: bool,
    cfg: &McConfig,
) -> Result<MCEstimate> {
    check_n(n)?;
    cfg.validate()?;
    if k == 0 || k > n {
        return Err(Error::invalid(format!("index k = {k} must lie in 1..={n}")));
    }
    if !(t > 0.0 && t < 1.0) {
        return Err(Error::domain(format!("t = {t} must lie in (0, 1)")));
    }
    if !(width > 0.0 && width / 2.0 < t) {
        return Err(Error::invalid(format!("width = {width} must be positive and below 2t")));
    }
    let (lo, hi) = (t - width / 2.0, t + width / 2.0);
    let (inner_lo, inner_hi) = (t - width / 4.0, t + width / 4.0);
    // [outer-window hits, of which also in the inner window]
    let [outer, inner]: [u64; 2] = run_paths(cfg, |rng, tally: &mut [u64; 2]| {
        let mut walk = AreaWalk::new();
        let mut best = (0, f64::INFINITY);
        for i in 1..=n {
            let y = walk.step(rng).1;
            if y < lo {
                return;
            }
            if y < best.1 {
                best = (i, y);
            }
        }
        if best.0 == k && best.1 < hi {
            tally[0] += 1;
            if (inner_lo..inner_hi).contains(&best.1) {
                tally[1] += 1;
            }
        }
    });
    let samples = cfg.samples as f64;
    let params = [
        ("n", n as f64),
        ("k", k as f64),
        ("t", t),
        ("width", width),
        ("richardson", if richardson { 1.0 } else { 0.0 }),
    ];
    let est = if richardson {
        // Per-path contribution: 7/(3w) in the inner window, -1/(3w) in the
        // outer ring, 0 otherwise.
        let ring = (outer - inner) as f64;
        let inner = inner as f64;
        let mean = (7.0 * inner - ring) / (3.0 * width * samples);
        let second = (49.0 * inner + ring) / (9.0 * width * width * samples);
        let var = (second - mean * mean).max(0.0);
        MCEstimate::new("partial_density", &params, mean, (var / samples).sqrt(), cfg.samples, cfg.seed)
            .with_note("Richardson-extrapolated difference quotient; residual bias O(w^4)")
    } else {
        MCEstimate::from_bernoulli("partial_density", &params, outer, cfg.samples, cfg.seed)
            .scaled(1.0 / width)
            .with_note("symmetric difference quotient; discretization bias O(w^2)")
    };
    Ok(est)
}

/// Two independent estimates of the same quantity.
#[derive(Clone, Debug, Serialize)]
pub struct ComparisonReport {
    pub label: String,
    pub lhs: f64,
    pub lhs_stderr: f64,
    pub rhs: f64,
    pub rhs_stderr: f64,
}

impl ComparisonReport {
    pub fn combined_stderr(&self) -> f64 {
        self.lhs_stderr.hypot(self.rhs_stderr)
    }

    pub fn z(&self) -> f64 {
        let d = self.lhs - self.rhs;
        let s = self.combined_stderr();
        if s == 0.0 { if d == 0.0 { 0.0 } else { f64::INFINITY } } else { d / s }
    }

    pub fn passes(&self, sigmas: f64) -> bool {
        (self.lhs - self.rhs).abs() <= sigmas * self.combined_stderr()
    }
}

pub type ChainingReport = ComparisonReport;

/// Compares `g_n^(k)(t)` with `c_k (t e^{-t})^{k-1} g_{n-k+1}^(1)(t)`, the
/// two sides estimated from independent seeds (identical seeds when `k = 1`,
/// where both sides are the same quantity).
pub fn chaining_check(n: usize, k: usize, t: f64, width: f64, cfg: &McConfig) -> Result<ChainingReport> {
    if k == 0 || k >= n {
        return Err(Error::invalid(format!("chaining needs 1 <= k <= n-1, got n = {n}, k = {k}")));
    }
    let c_k = to_f64(&c_sequence(k)?[k - 1]);
    let factor = c_k * (t * (-t).exp()).powi(k as i32 - 1);
    let lhs = estimate_partial_density(n, k, t, width, false, cfg)?;
    let rhs_cfg = if k == 1 { *cfg } else { cfg.with_seed(derive_seed(cfg.seed, 0xC4A1)) };
    let base = estimate_partial_density(n - k + 1, 1, t, width, false, &rhs_cfg)?;
    Ok(ComparisonReport {
        label: format!("g_{n}^({k})({t}) vs c_{k} (t e^-t)^{} g_{}^(1)({t})", k - 1, n - k + 1),
        lhs: lhs.mean,
        lhs_stderr: lhs.stderr,
        rhs: factor * base.mean,
        rhs_stderr: factor * base.stderr,
    })
}

/// Compares `g_{n+1}^(1)(t)` with `G_n(t) e^{-t}`, both sides by Monte
/// Carlo from independent seeds.
pub fn first_partial_density_check(n: usize, t: f64, width: f64, cfg: &McConfig) -> Result<ComparisonReport> {
    let density = estimate_partial_density(n + 1, 1, t, width, false, cfg)?;
    let gn = estimate_gn(t, n, &cfg.with_seed(derive_seed(cfg.seed, 0x1E44A1)))?;
    let decay = (-t).exp();
    Ok(ComparisonReport {
        label: format!("g_{}^(1)({t}) vs G_{n}({t}) e^-t", n + 1),
        lhs: density.mean,
        lhs_stderr: density.stderr,
        rhs: gn.mean * decay,
        rhs_stderr: gn.stderr * decay,
    })
}
