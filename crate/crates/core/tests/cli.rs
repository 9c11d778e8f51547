use std::process::{Command, Output};

use areawalk::cli::RunConfig;

fn areawalk(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_areawalk")).args(args).output().unwrap()
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

/// Data rows of a CSV document with `# ` metadata lines.
fn csv_rows(text: &str) -> Vec<csv::StringRecord> {
    let body: String = text.lines().filter(|l| !l.starts_with('#')).map(|l| format!("{l}\n")).collect();
    csv::Reader::from_reader(body.as_bytes()).records().map(Result::unwrap).collect()
}

#[test]
fn constants_small_table() {
    let out = areawalk(&["constants", "--n", "4"]);
    assert_eq!(out.status.code(), Some(0));
    let rows = csv_rows(&stdout(&out));
    let c: Vec<(&str, &str)> = rows.iter().map(|r| (&r[1], &r[2])).collect();
    assert_eq!(c, [("1", "1"), ("3", "2"), ("3", "1"), ("20", "3")]);
    assert_eq!((&rows[3][5], &rows[3][6]), ("1", "27"));

    let one = areawalk(&["constants", "--n", "1"]);
    assert_eq!(one.status.code(), Some(0));
    assert_eq!(csv_rows(&stdout(&one)).len(), 1);
}

#[test]
fn injected_disagreement_fails_with_one() {
    let out = areawalk(&["constants", "--n", "5", "--inject-disagreement", "3"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("FAIL"));
}

#[test]
fn gfun_default_grid() {
    let out = areawalk(&["gfun"]);
    assert_eq!(out.status.code(), Some(0));
    let rows = csv_rows(&stdout(&out));
    assert_eq!(rows.len(), 101);
    let g = |r: &csv::StringRecord| r[1].parse::<f64>().unwrap();
    assert_eq!(g(&rows[0]), 1.0);
    assert_eq!(g(&rows[100]), 0.0);
    assert_eq!(&rows[100][3], "NaN");
}

#[test]
fn mc_one_step_survival() {
    let out = areawalk(&["mc", "--estimator", "gn", "--t", "0.5", "--n", "1", "--samples", "200000"]);
    assert_eq!(out.status.code(), Some(0));
    let rows = csv_rows(&stdout(&out));
    let value: f64 = rows[0][1].parse().unwrap();
    assert!((value - (-0.5f64).exp()).abs() < 0.005);
}

#[test]
fn sticky_curve_ends_in_one_cluster() {
    let out = areawalk(&["sticky", "--n", "200", "--replicates", "3", "--t-grid", "0,0.5,2"]);
    assert_eq!(out.status.code(), Some(0));
    let rows = csv_rows(&stdout(&out));
    let mean = |i: usize| rows[i][1].parse::<f64>().unwrap();
    assert_eq!(mean(0), 1.0);
    assert_eq!(mean(2), 1.0 / 200.0);
}

#[test]
fn no_timing_output_is_reproducible() {
    let args = |threads| ["mc", "--estimator", "g", "--t", "0.3", "--samples", "5000", "--seed", "4", "--no-timing", "--threads", threads];
    let first = areawalk(&args("2"));
    let again = areawalk(&args("2"));
    assert_eq!(first.status.code(), Some(0));
    assert_eq!(first.stdout, again.stdout);
    assert!(stdout(&first).contains("# wall_time_ms: 0"));
    let single = areawalk(&args("1"));
    assert_eq!(csv_rows(&stdout(&first)), csv_rows(&stdout(&single)));
}

#[test]
fn out_flag_writes_the_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("m.csv");
    let out = areawalk(&["matrices", "--n", "3", "--out", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    // A_3 and L_3, nine entries each.
    assert_eq!(csv_rows(&std::fs::read_to_string(&path).unwrap()).len(), 18);
}

#[test]
fn json_output_reproduces_its_config() {
    let out = areawalk(&["orderstats", "--n", "50", "--samples", "2000", "--format", "json", "--no-timing"]);
    assert_eq!(out.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["tool"], "areawalk");
    let config = RunConfig::from_json(&doc["config"]).unwrap();
    assert_eq!(config.to_json(), doc["config"]);
    assert_eq!(config.global.samples, Some(2000));
    assert_eq!(doc["passed"], true);
}

#[test]
fn usage_and_domain_errors_exit_two() {
    for args in [
        vec!["mc", "--estimator", "nope"],
        vec!["sticky", "--model", "gauss"],
        vec!["mc", "--estimator", "gn", "--t", "-1"],
        vec!["gfun", "--t-grid", "0:1:0.3"],
        vec!["constants", "--n", "0"],
        vec!["matrices", "--out", "/nonexistent/dir/m.csv"],
    ] {
        let out = areawalk(&args);
        assert_eq!(out.status.code(), Some(2), "{args:?}");
    }
}

#[test]
fn quick_verify_reports_every_check() {
    let out = areawalk(&["verify", "--level", "quick", "--no-timing"]);
    let rows = csv_rows(&stdout(&out));
    assert!(rows.len() >= 20, "{} checks", rows.len());
    let failed: Vec<&str> = rows.iter().filter(|r| &r[1] == "false").map(|r| r.get(0).unwrap()).collect();
    // The only failing check is the n = 30 density bound, which the
    // simulated values near t = 0.7 exceed (about 0.03).
    assert_eq!(failed, ["g_30^(30)(t) < 0.01 for t <= 0.7"]);
    assert_eq!(out.status.code(), Some(1));
}
