use serde::Serialize;
use serde_json::json;

use super::verify::{run_verify, VerifyCheck};
use super::{parse_t_grid, Command, Estimator, Output, RunConfig};
use crate::closedform::{
    f_closed, g_closed, g_partial_closed, gprime_closed, k_closed, tree_q, SeriesEvaluator,
};
use crate::curve::format_f64;
use crate::error::{Error, Result};
use crate::exact::{
    argmin_last_but_one_probability, build_a, build_l, c_sequence, format_rational, polytope_vertex,
    polytope_volume_mc, to_f64, triangular, v_sequence, verify_inverse, ConstantTable, ExactMatrix,
    ExactRational, VRoute,
};
use crate::montecarlo::{
    chaining_check, estimate_argmin_prob, estimate_g, estimate_gn, estimate_gn_orderstats,
    estimate_partial_density, first_partial_density_check, ComparisonReport, GOptions, MCEstimate,
    McConfig,
};
use crate::sticky::k_curve;

const MC_DEFAULT_SAMPLES: u64 = 100_000;
/// Extra absolute slack for the truncated-horizon estimate of `G`.
const G_BIAS_SLACK: f64 = 0.005;

pub(crate) fn execute(config: &RunConfig) -> Result<Output> {
    let g = &config.global;
    match &config.command {
        Command::Constants { n, inject_disagreement } => constants(*n, *inject_disagreement),
        Command::Matrices { n } => matrices(*n),
        Command::Gfun { t_grid, k_max } => gfun(&parse_t_grid(t_grid)?, *k_max),
        Command::Mc { estimator, t, n, k, horizon, width, richardson } => {
            let cfg = McConfig::new(config.samples_or(MC_DEFAULT_SAMPLES), g.seed).with_threads(g.threads);
            mc(*estimator, *t, *n, *k, *horizon, *width, *richardson, &cfg)
        }
        Command::Orderstats { t, n } => {
            let cfg = McConfig::new(config.samples_or(MC_DEFAULT_SAMPLES), g.seed).with_threads(g.threads);
            orderstats(*t, *n, &cfg)
        }
        Command::Sticky { n, model, t_grid, replicates } => {
            let run = k_curve(*n, *model, &parse_t_grid(t_grid)?, *replicates, g.seed, g.threads)?;
            let mut csv = Vec::new();
            run.curve.write_csv(&mut csv)?;
            let failures = run
                .invariants
                .iter()
                .enumerate()
                .filter(|(_, r)| !r.passed())
                .map(|(i, r)| format!("sticky invariants, replicate {i}: {r:?}"))
                .collect();
            Ok(Output {
                meta: vec![format!("max |mean K_n/n - (1 - t^2)|: {}", format_f64(run.curve.max_deviation_from_limit()))],
                csv,
                json: json!({
                    "curve": run.curve,
                    "max_deviation_from_limit": run.curve.max_deviation_from_limit(),
                    "invariants": run.invariants,
                }),
                failures,
            })
        }
        Command::Verify { level } => {
            let report = run_verify(*level, g.seed, g.threads, g.samples)?;
            checks_output(&report.checks, json!(report))
        }
    }
}

fn checks_output(checks: &[VerifyCheck], json: serde_json::Value) -> Result<Output> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["check", "passed", "value", "reference", "tolerance", "detail"])?;
    let opt = |v: Option<f64>| v.map(format_f64).unwrap_or_default();
    for c in checks {
        w.write_record([
            c.name.clone(),
            c.passed.to_string(),
            opt(c.value),
            opt(c.reference),
            opt(c.tolerance),
            c.detail.clone(),
        ])?;
    }
    Ok(Output {
        meta: Vec::new(),
        csv: w.into_inner().map_err(|e| Error::Io(e.into_error()))?,
        json,
        failures: checks.iter().filter(|c| !c.passed).map(|c| c.name.clone()).collect(),
    })
}

fn constants(n: usize, inject: Option<usize>) -> Result<Output> {
    let mut table = ConstantTable::compute(n)?;
    if let Some(k) = inject {
        table.inject_disagreement(k);
    }
    let checks = table.cross_check()?;
    let mut csv = Vec::new();
    table.write_csv(&mut csv)?;
    Ok(Output {
        meta: checks
            .iter()
            .map(|c| match c.first_mismatch {
                None => format!("check {}: agree", c.name),
                Some(k) => format!("check {}: DISAGREE at n = {k}", c.name),
            })
            .collect(),
        csv,
        json: json!({ "table": table.to_json(), "checks": checks }),
        failures: checks
            .iter()
            .filter(|c| !c.agree)
            .map(|c| format!("{} (first mismatch at n = {})", c.name, c.first_mismatch.unwrap_or(0)))
            .collect(),
    })
}

/// Row sums of `L_n` are 1; column sums are `(0, ..., 0, -l_{n-1}, l_n)`.
pub(crate) fn l_sum_checks(n: usize) -> Result<Vec<VerifyCheck>> {
    let l = build_l(n)?;
    let rows_ok = l.row_sums().iter().all(|s| *s == crate::exact::integer(1));
    let mut want = vec![ExactRational::from_integer(0.into()); n];
    want[n - 1] = triangular(n);
    if n >= 2 {
        want[n - 2] = -triangular(n - 1);
    }
    let cols_ok = l.col_sums() == want;
    let apex_ok = n < 2 || polytope_vertex(n).is_ok();
    Ok(vec![
        VerifyCheck::flag(format!("L_{n} row sums = 1"), rows_ok, String::new()),
        VerifyCheck::flag(format!("L_{n} column sums = (0,..,0,-l_(n-1),l_n)"), cols_ok, String::new()),
        VerifyCheck::flag(format!("L_{n}^(1;n) y* = -1"), apex_ok, String::new()),
    ])
}

fn matrices(n: usize) -> Result<Output> {
    let a = build_a(n)?;
    let l = build_l(n)?;
    let report = verify_inverse(n)?;
    let mut checks = vec![VerifyCheck::flag(
        format!("L_{n} A_{n} = A_{n} L_{n} = I"),
        report.passed(),
        report.first_failure.as_ref().map(ToString::to_string).unwrap_or_default(),
    )];
    checks.extend(l_sum_checks(n)?);
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["matrix", "row", "col", "value"])?;
    for (name, m) in [("A", &a), ("L", &l)] {
        for i in 0..n {
            for j in 0..n {
                w.write_record([name.to_string(), (i + 1).to_string(), (j + 1).to_string(), format_rational(m.get(i, j))])?;
            }
        }
    }
    let as_strings = |m: &ExactMatrix| -> Vec<Vec<String>> {
        (0..m.rows()).map(|i| m.row(i).iter().map(format_rational).collect()).collect()
    };
    Ok(Output {
        meta: checks.iter().map(|c| format!("check {}: {}", c.name, if c.passed { "pass" } else { "FAIL" })).collect(),
        csv: w.into_inner().map_err(|e| Error::Io(e.into_error()))?,
        json: json!({ "n": n, "A": as_strings(&a), "L": as_strings(&l), "checks": checks }),
        failures: checks.iter().filter(|c| !c.passed).map(|c| c.name.clone()).collect(),
    })
}

#[derive(Serialize)]
struct GfunRow {
    t: f64,
    g: f64,
    k: f64,
    f_series: f64,
    f_tail: f64,
    f_closed: f64,
    gprime_series: f64,
    gprime_tail: f64,
    gprime_closed: f64,
}

fn gfun(grid: &[f64], k_max: usize) -> Result<Output> {
    if let Some(t) = grid.iter().find(|t| !(0.0..=1.0).contains(*t)) {
        return Err(Error::domain(format!("t = {t} must lie in [0, 1]")));
    }
    let ev = SeriesEvaluator::new(k_max)?;
    let mut rows = Vec::with_capacity(grid.len());
    let mut failures = Vec::new();
    for &t in grid {
        let k = match k_closed(t) {
            Ok(k) => k,
            Err(e) => {
                failures.push(format!("K identity at t = {t}: {e}"));
                f64::NAN
            }
        };
        let mut row = GfunRow {
            t,
            g: g_closed(t)?,
            k,
            f_series: f64::NAN,
            f_tail: f64::NAN,
            f_closed: f64::NAN,
            gprime_series: f64::NAN,
            gprime_tail: f64::NAN,
            gprime_closed: f64::NAN,
        };
        if t < 1.0 {
            row.f_closed = f_closed(t)?;
            row.gprime_closed = gprime_closed(t)?;
            if let Ok(f) = ev.f(tree_q(t)) {
                (row.f_series, row.f_tail) = (f.value, f.tail_bound);
                if !((f.value - row.f_closed).abs() <= f.tail_bound + 1e-10) {
                    failures.push(format!("f series at t = {t}"));
                }
            }
            if let Ok(d) = ev.gprime(t) {
                (row.gprime_series, row.gprime_tail) = (d.value, d.tail_bound);
                if !((d.value - row.gprime_closed).abs() <= d.tail_bound + 1e-10) {
                    failures.push(format!("G' series at t = {t}"));
                }
            }
        }
        rows.push(row);
    }
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(["t", "G", "K", "f_series", "f_tail", "f_closed", "gprime_series", "gprime_tail", "gprime_closed"])?;
    for r in &rows {
        w.write_record(
            [r.t, r.g, r.k, r.f_series, r.f_tail, r.f_closed, r.gprime_series, r.gprime_tail, r.gprime_closed]
                .map(format_f64),
        )?;
    }
    Ok(Output {
        meta: vec![format!("k_max: {k_max}")],
        csv: w.into_inner().map_err(|e| Error::Io(e.into_error()))?,
        json: json!({ "k_max": k_max, "rows": rows }),
        failures,
    })
}

/// One row of `mc` output: a value with its standard error, and a
/// reference (exact, or a second estimate) when one is available.
#[derive(Clone, Debug, Serialize)]
struct McRow {
    quantity: String,
    value: f64,
    stderr: f64,
    reference: Option<f64>,
    reference_stderr: Option<f64>,
    z: Option<f64>,
    passed: bool,
    samples: u64,
    seed: u64,
    params: String,
    notes: String,
}

fn estimate_row(est: &MCEstimate, reference: Option<f64>, slack: f64) -> McRow {
    let z = reference.map(|r| est.z_score(r));
    let passed = reference.is_none_or(|r| est.within_sigmas(r, 4.0) || (est.mean - r).abs() <= slack);
    McRow {
        quantity: est.estimator.clone(),
        value: est.mean,
        stderr: est.stderr,
        reference,
        reference_stderr: reference.map(|_| 0.0),
        z,
        passed,
        samples: est.samples,
        seed: est.seed,
        params: est.params.iter().map(|(k, v)| format!("{k}={v}")).collect::<Vec<_>>().join(";"),
        notes: est.notes.join("; "),
    }
}

fn comparison_row(rep: &ComparisonReport, cfg: &McConfig, sigmas: f64) -> McRow {
    McRow {
        quantity: rep.label.clone(),
        value: rep.lhs,
        stderr: rep.lhs_stderr,
        reference: Some(rep.rhs),
        reference_stderr: Some(rep.rhs_stderr),
        z: Some(rep.z()),
        passed: rep.passes(sigmas),
        samples: cfg.samples,
        seed: cfg.seed,
        params: String::new(),
        notes: format!("both sides Monte Carlo; pass at {sigmas} combined sigma"),
    }
}

fn rows_output(rows: Vec<McRow>) -> Result<Output> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record([
        "quantity", "value", "stderr", "reference", "reference_stderr", "z", "passed", "samples", "seed", "params", "notes",
    ])?;
    let opt = |v: Option<f64>| v.map(format_f64).unwrap_or_default();
    for r in &rows {
        w.write_record([
            r.quantity.clone(),
            format_f64(r.value),
            format_f64(r.stderr),
            opt(r.reference),
            opt(r.reference_stderr),
            opt(r.z),
            r.passed.to_string(),
            r.samples.to_string(),
            r.seed.to_string(),
            r.params.clone(),
            r.notes.clone(),
        ])?;
    }
    Ok(Output {
        meta: Vec::new(),
        csv: w.into_inner().map_err(|e| Error::Io(e.into_error()))?,
        failures: rows.iter().filter(|r| !r.passed).map(|r| r.quantity.clone()).collect(),
        json: json!({ "rows": rows }),
    })
}

#[allow(clippy::too_many_arguments)]
fn mc(
    estimator: Estimator,
    t: f64,
    n: usize,
    k: Option<usize>,
    horizon: Option<usize>,
    width: f64,
    richardson: bool,
    cfg: &McConfig,
) -> Result<Output> {
    let row = match estimator {
        Estimator::Gn => {
            let est = estimate_gn(t, n, cfg)?;
            estimate_row(&est, (n == 1).then(|| (-t).exp()), 0.0)
        }
        Estimator::G => {
            let est = estimate_g(t, cfg, GOptions { horizon, ..GOptions::default() })?;
            estimate_row(&est, Some(g_closed(t)?), G_BIAS_SLACK)
        }
        Estimator::Argmin => {
            let k = k.unwrap_or(n.saturating_sub(1).max(1));
            let est = estimate_argmin_prob(n, k, cfg)?;
            let reference = if n >= 2 && k == n - 1 {
                Some(to_f64(&argmin_last_but_one_probability(k, &c_sequence(k)?[k - 1])))
            } else if n == 1 {
                Some(1.0)
            } else {
                None
            };
            estimate_row(&est, reference, 0.0)
        }
        Estimator::PartialDensity => {
            let k = k.unwrap_or(1);
            let est = estimate_partial_density(n, k, t, width, richardson, cfg)?;
            let reference = if k < n && n - k == 1 { Some(g_partial_closed(n, k, t, None)?.value) } else { None };
            estimate_row(&est, reference, width * width)
        }
        Estimator::Chaining => comparison_row(&chaining_check(n, k.unwrap_or(1), t, width, cfg)?, cfg, 3.0),
        Estimator::FirstDensity => comparison_row(&first_partial_density_check(n, t, width, cfg)?, cfg, 3.0),
        Estimator::Volume => {
            let est = polytope_volume_mc(n, cfg)?;
            let v = v_sequence(n, VRoute::DirectRecursion)?;
            estimate_row(&est, Some(to_f64(&v[n - 1])), 0.0)
        }
    };
    rows_output(vec![row])
}

fn orderstats(t: f64, n: usize, cfg: &McConfig) -> Result<Output> {
    let est = estimate_gn_orderstats(t, n, cfg)?;
    let mut sorted = estimate_row(&est.sorted, None, 0.0);
    sorted.reference = Some(est.spacings.mean);
    sorted.reference_stderr = Some(est.spacings.stderr);
    sorted.z = Some(est.z);
    sorted.passed = est.agree;
    sorted.notes = "reference is the spacings path; pass at 4 combined sigma".into();
    let spacings = estimate_row(&est.spacings, None, 0.0);
    rows_output(vec![sorted, spacings])
}
