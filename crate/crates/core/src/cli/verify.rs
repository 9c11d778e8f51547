use clap::ValueEnum;
use serde::{Deserialize, Serialize};

use super::commands::l_sum_checks;
use crate::closedform::{g_closed, gprime_closed, f_closed, ode_integrate, tree_q, SeriesEvaluator, DEFAULT_K_MAX};
use crate::error::Result;
use crate::exact::{polytope_volume_exact, polytope_volume_mc, rational, verify_inverse, ConstantTable};
use crate::montecarlo::{
    chaining_check, estimate_argmin_prob, estimate_g, estimate_gn, estimate_gn_orderstats,
    estimate_partial_density, first_partial_density_check, ComparisonReport, GOptions, MCEstimate,
    McConfig, DEFAULT_WIDTH,
};
use crate::sticky::{k_curve, InitialModel};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VerifyLevel {
    /// Reduced sizes, well under a minute.
    Quick,
    /// Full sizes (10^6 samples, n = 10^4 particles).
    Full,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerifyCheck {
    pub name: String,
    pub passed: bool,
    pub value: Option<f64>,
    pub reference: Option<f64>,
    pub tolerance: Option<f64>,
    pub detail: String,
}

impl VerifyCheck {
    pub fn flag(name: impl Into<String>, passed: bool, detail: String) -> Self {
        Self { name: name.into(), passed, value: None, reference: None, tolerance: None, detail }
    }

    /// Passes when `|value - reference| <= tolerance`.
    pub fn close(name: impl Into<String>, value: f64, reference: f64, tolerance: f64, detail: String) -> Self {
        Self {
            name: name.into(),
            passed: (value - reference).abs() <= tolerance,
            value: Some(value),
            reference: Some(reference),
            tolerance: Some(tolerance),
            detail,
        }
    }

    fn estimate(name: &str, est: &MCEstimate, reference: f64, tolerance: f64) -> Self {
        Self::close(name, est.mean, reference, tolerance, format!("stderr {:.3e}, z {:.2}", est.stderr, est.z_score(reference)))
    }

    fn comparison(name: &str, rep: &ComparisonReport, sigmas: f64) -> Self {
        Self::close(
            name,
            rep.lhs,
            rep.rhs,
            sigmas * rep.combined_stderr(),
            format!("{}; z {:.2}", rep.label, rep.z()),
        )
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct VerifyReport {
    pub level: VerifyLevel,
    pub seed: u64,
    pub checks: Vec<VerifyCheck>,
}

impl VerifyReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }
}

struct Sizes {
    constants_n: usize,
    matrices_n: usize,
    samples: u64,
    orderstats_n: usize,
    sticky_n: usize,
    sticky_replicates: usize,
}

fn grid(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    (0..points).map(|i| lo + (hi - lo) * i as f64 / (points - 1) as f64).collect()
}

/// Every check of the toolkit at the chosen size. `samples` overrides the
/// Monte Carlo sample count of the level.
pub fn run_verify(level: VerifyLevel, seed: u64, threads: usize, samples: Option<u64>) -> Result<VerifyReport> {
    let sizes = match level {
        VerifyLevel::Quick => Sizes {
            constants_n: 20,
            matrices_n: 12,
            samples: 20_000,
            orderstats_n: 200,
            sticky_n: 2_000,
            sticky_replicates: 4,
        },
        VerifyLevel::Full => Sizes {
            constants_n: 50,
            matrices_n: 30,
            samples: 1_000_000,
            orderstats_n: 500,
            sticky_n: 10_000,
            sticky_replicates: 20,
        },
    };
    let cfg = McConfig::new(samples.unwrap_or(sizes.samples), seed).with_threads(threads);
    let mut checks = Vec::new();

    // Exact arithmetic.
    let table = ConstantTable::compute(sizes.constants_n)?;
    let cross = table.cross_check()?;
    checks.push(VerifyCheck::flag(
        format!("constants cross-check (n <= {})", sizes.constants_n),
        cross.iter().all(|c| c.agree),
        cross.iter().filter(|c| !c.agree).map(|c| c.name).collect::<Vec<_>>().join("; "),
    ));
    let mut inverse_failure = None;
    let mut sums_failure = None;
    for n in 1..=sizes.matrices_n {
        let report = verify_inverse(n)?;
        if inverse_failure.is_none() {
            inverse_failure = report.first_failure.map(|f| format!("n = {n}: {f}"));
        }
        if sums_failure.is_none() {
            sums_failure = l_sum_checks(n)?.into_iter().find(|c| !c.passed).map(|c| c.name);
        }
    }
    checks.push(VerifyCheck::flag(
        format!("L_n A_n = I (n <= {})", sizes.matrices_n),
        inverse_failure.is_none(),
        inverse_failure.unwrap_or_default(),
    ));
    checks.push(VerifyCheck::flag(
        format!("L_n sums and apex (n <= {})", sizes.matrices_n),
        sums_failure.is_none(),
        sums_failure.unwrap_or_default(),
    ));
    let exact_ok = polytope_volume_exact(2)? == rational(1, 2) && polytope_volume_exact(3)? == rational(1, 6);
    checks.push(VerifyCheck::flag("polytope volumes v_2, v_3 by vertex enumeration", exact_ok, String::new()));
    let vol = polytope_volume_mc(4, &cfg)?;
    checks.push(VerifyCheck::estimate("polytope volume v_4 Monte Carlo", &vol, 1.0 / 27.0, 4.0 * vol.stderr));

    // Closed forms and series.
    let ev = SeriesEvaluator::new(DEFAULT_K_MAX)?;
    let (mut f_excess, mut d_excess) = (f64::NEG_INFINITY, f64::NEG_INFINITY);
    for t in grid(0.0, 0.95, 100) {
        let f = ev.f(tree_q(t))?;
        f_excess = f_excess.max((f.value - f_closed(t)?).abs() - f.tail_bound);
        let d = ev.gprime(t)?;
        d_excess = d_excess.max((d.value - gprime_closed(t)?).abs() - d.tail_bound);
    }
    checks.push(VerifyCheck {
        name: "f series vs closed form".into(),
        passed: f_excess <= 1e-10,
        value: Some(f_excess),
        reference: Some(0.0),
        tolerance: Some(1e-10),
        detail: "max of |series - closed| - tail bound on [0, 0.95]".into(),
    });
    checks.push(VerifyCheck {
        name: "G' series vs ODE right side".into(),
        passed: d_excess <= 1e-10,
        value: Some(d_excess),
        reference: Some(0.0),
        tolerance: Some(1e-10),
        detail: "max of |series - closed| - tail bound on [0, 0.95]".into(),
    });
    let rk4 = ode_integrate(0.99, 1e-3)?;
    let rk4_dev = rk4.max_abs_deviation(|t| g_closed(t).unwrap_or(f64::NAN));
    checks.push(VerifyCheck::close("RK4 vs closed form on [0, 0.99]", rk4_dev, 0.0, 1e-8, "step 1e-3".into()));
    let k_dev = grid(0.0, 1.0, 101)
        .into_iter()
        .map(|t| {
            let s = t * t;
            let g = g_closed(s).unwrap_or(f64::NAN);
            (s.exp() * g * g - (1.0 - s)).abs()
        })
        .fold(0.0, f64::max);
    checks.push(VerifyCheck::close("K(t) = e^(t^2) G(t^2)^2 = 1 - t^2", k_dev, 0.0, 1e-12, String::new()));

    // Monte Carlo anchors.
    let g1 = estimate_gn(0.5, 1, &cfg)?;
    checks.push(VerifyCheck::estimate("G_1(0.5) MC vs e^-0.5", &g1, (-0.5f64).exp(), 4.0 * g1.stderr));
    let a32 = estimate_argmin_prob(3, 2, &cfg)?;
    checks.push(VerifyCheck::estimate("argmin(3, 2) MC vs 1/6", &a32, 1.0 / 6.0, 4.0 * a32.stderr));
    let a43 = estimate_argmin_prob(4, 3, &cfg)?;
    checks.push(VerifyCheck::estimate("argmin(4, 3) MC vs 3/32", &a43, 3.0 / 32.0, 4.0 * a43.stderr));
    let g_half = g_closed(0.5)?;
    let g = estimate_g(0.5, &cfg, GOptions::default())?;
    checks.push(VerifyCheck::estimate("G(0.5) MC vs closed form", &g, g_half, (4.0 * g.stderr).max(0.005)));
    let os = estimate_gn_orderstats(0.5, sizes.orderstats_n, &cfg)?;
    checks.push(VerifyCheck::estimate(
        &format!("order statistics G_{}(0.5) vs G(0.5)", sizes.orderstats_n),
        &os.sorted,
        g_half,
        (4.0 * os.sorted.stderr).max(0.01),
    ));
    checks.push(VerifyCheck::close(
        "order statistics sorted vs spacings",
        os.sorted.mean,
        os.spacings.mean,
        4.0 * os.sorted.combined_stderr(&os.spacings),
        format!("z {:.2}", os.z),
    ));

    // Partial densities.
    let pd = estimate_partial_density(2, 1, 0.5, DEFAULT_WIDTH, false, &cfg)?;
    checks.push(VerifyCheck::estimate(
        "g_2^(1)(0.5) MC vs e^-1",
        &pd,
        (-1.0f64).exp(),
        4.0 * pd.stderr + DEFAULT_WIDTH * DEFAULT_WIDTH,
    ));
    for (n, k, t) in [(4, 2, 0.4), (5, 3, 0.3)] {
        let rep = chaining_check(n, k, t, DEFAULT_WIDTH, &cfg)?;
        checks.push(VerifyCheck::comparison(&format!("chaining g_{n}^({k})({t})"), &rep, 3.0));
    }
    for t in [0.3, 0.5] {
        let rep = first_partial_density_check(2, t, DEFAULT_WIDTH, &cfg)?;
        checks.push(VerifyCheck::comparison(&format!("g_3^(1)({t}) vs G_2({t}) e^-t"), &rep, 3.0));
    }

    // Sticky particles.
    let k_grid: Vec<f64> = (1..=9).map(|i| i as f64 / 10.0).collect();
    let mut worst: f64 = 0.0;
    let mut invariant_failures = Vec::new();
    for model in [InitialModel::Uniform, InitialModel::Poisson] {
        let run = k_curve(sizes.sticky_n, model, &k_grid, sizes.sticky_replicates, seed, threads)?;
        worst = worst.max(run.curve.max_deviation_from_limit());
        for (i, r) in run.invariants.iter().enumerate() {
            if !r.passed() {
                invariant_failures.push(format!("{} replicate {i}", model.name()));
            }
        }
    }
    checks.push(VerifyCheck::close(
        "K_n curve vs 1−t²",
        worst,
        0.0,
        0.02,
        format!("n = {}, {} replicates per model, both models", sizes.sticky_n, sizes.sticky_replicates),
    ));
    checks.push(VerifyCheck::flag("sticky invariants", invariant_failures.is_empty(), invariant_failures.join("; ")));

    // Asymptotic proxies.
    let mut last = f64::INFINITY;
    let mut monotone = true;
    for n in [1, 2, 3, 5, 8, 13, 21, 34] {
        let m = estimate_gn(0.5, n, &cfg)?.mean;
        monotone &= m <= last;
        last = m;
    }
    checks.push(VerifyCheck::flag("G_n(0.5) non-increasing in n (common random numbers)", monotone, String::new()));
    let mut top: f64 = 0.0;
    for i in 1..=7 {
        top = top.max(estimate_partial_density(30, 30, i as f64 / 10.0, DEFAULT_WIDTH, false, &cfg)?.mean);
    }
    checks.push(VerifyCheck {
        name: "g_30^(30)(t) < 0.01 for t <= 0.7".into(),
        passed: top < 0.01,
        value: Some(top),
        reference: Some(0.0),
        tolerance: Some(0.01),
        detail: "largest estimate on t = 0.1, ..., 0.7".into(),
    });
    // The vanishing of g_n^(n) is asymptotic; at t = 0.7 the decay in n is
    // visible but n = 30 has not yet reached 0.01.
    let mut trend = Vec::new();
    for n in [10, 20, 30, 60] {
        trend.push(estimate_partial_density(n, n, 0.7, DEFAULT_WIDTH, false, &cfg)?);
    }
    let decreasing = trend.windows(2).all(|w| w[1].mean < w[0].mean);
    checks.push(VerifyCheck::flag(
        "g_n^(n)(0.7) decreasing over n = 10, 20, 30, 60",
        decreasing,
        trend.iter().map(|e| format!("{:.4}", e.mean)).collect::<Vec<_>>().join(", "),
    ));

    Ok(VerifyReport { level, seed, checks })
}
