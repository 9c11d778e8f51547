//! Command-line front end. Each run is described by a [`RunConfig`]; every
//! output starts with a metadata block holding the tool version, the full
//! configuration and the wall time (as `# ` comment lines ahead of the CSV
//! header, or as fields of the JSON document).

mod commands;
mod grid;
mod verify;

use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::closedform::DEFAULT_K_MAX;
use crate::error::{Error, Result};
use crate::montecarlo::DEFAULT_WIDTH;
use crate::sticky::InitialModel;

pub use grid::parse_t_grid;
pub use verify::{run_verify, VerifyCheck, VerifyLevel, VerifyReport};

pub const DEFAULT_SEED: u64 = 20_050_301;
pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Parser, Debug)]
#[command(name = "areawalk", version, about = "Checks of G(t) = sqrt(1-t) e^(-t/2) and K(t) = 1 - t^2")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GlobalArgs {
    /// Base seed of every random stream.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// Monte Carlo samples per estimate (each subcommand has its own default).
    #[arg(long, global = true)]
    pub samples: Option<u64>,
    /// Worker threads; 0 uses all cores.
    #[arg(long, global = true, default_value_t = 0)]
    pub threads: usize,
    /// Output file; standard output when omitted.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Record the wall time as 0 so that repeated runs are byte-identical.
    #[arg(long, global = true)]
    pub no_timing: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Estimator {
    /// G_n(t) = P{min_{k <= n} Y_k >= t}.
    Gn,
    /// G(t) through a truncation horizon.
    G,
    /// P{argmin_{i <= n} Y_i = k}.
    Argmin,
    /// g_n^(k)(t).
    PartialDensity,
    /// g_n^(k)(t) against c_k (t e^-t)^(k-1) g_{n-k+1}^(1)(t).
    Chaining,
    /// g_{n+1}^(1)(t) against G_n(t) e^-t.
    FirstDensity,
    /// vol(P_n) by rejection sampling.
    Volume,
}

#[derive(Subcommand, Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "subcommand", rename_all = "kebab-case")]
pub enum Command {
    /// Exact c_n, b_n, v_n with cross-route agreement checks.
    Constants {
        #[arg(long = "n", default_value_t = 20)]
        n: usize,
        /// Perturb b_n to exercise the failure path.
        #[arg(long, hide = true)]
        #[serde(default, skip_serializing_if = "Option::is_none")]
        inject_disagreement: Option<usize>,
    },
    /// A_n and L_n with the inverse, sum and apex identities.
    Matrices {
        #[arg(long = "n", default_value_t = 6)]
        n: usize,
    },
    /// G, K, f and G' on a grid, series against closed forms.
    Gfun {
        #[arg(long, default_value = "0:1:0.01")]
        t_grid: String,
        #[arg(long, default_value_t = DEFAULT_K_MAX)]
        k_max: usize,
    },
    /// One Monte Carlo estimate, compared with its exact value when known.
    Mc {
        #[arg(long, value_enum, default_value_t = Estimator::Gn)]
        estimator: Estimator,
        #[arg(long, default_value_t = 0.5)]
        t: f64,
        #[arg(long = "n", default_value_t = 1)]
        n: usize,
        #[arg(long)]
        k: Option<usize>,
        #[arg(long)]
        horizon: Option<usize>,
        #[arg(long, default_value_t = DEFAULT_WIDTH)]
        width: f64,
        #[arg(long)]
        richardson: bool,
    },
    /// G_n(t) from uniform order statistics, by sorting and by spacings.
    Orderstats {
        #[arg(long, default_value_t = 0.5)]
        t: f64,
        #[arg(long = "n", default_value_t = 500)]
        n: usize,
    },
    /// Mean cluster-count curve K_n(t)/n of the sticky particle system.
    Sticky {
        #[arg(long = "n", default_value_t = 1000)]
        n: usize,
        #[arg(long, default_value = "uniform")]
        model: InitialModel,
        #[arg(long, default_value = "0:1.2:0.05")]
        t_grid: String,
        #[arg(long, default_value_t = 10)]
        replicates: usize,
    },
    /// Runs every check and reports pass or fail for each.
    Verify {
        #[arg(long, value_enum, default_value_t = VerifyLevel::Quick)]
        level: VerifyLevel,
    },
}

/// Everything that determines a run's output.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    #[serde(flatten)]
    pub global: GlobalArgs,
    pub command: Command,
}

impl From<Cli> for RunConfig {
    fn from(cli: Cli) -> Self {
        Self { global: cli.global, command: cli.command }
    }
}

impl RunConfig {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("config serializes")
    }

    pub fn from_json(value: &serde_json::Value) -> Result<Self> {
        Ok(serde_json::from_value(value.clone())?)
    }

    pub fn samples_or(&self, default: u64) -> u64 {
        self.global.samples.unwrap_or(default)
    }
}

/// Result of a run: whether every check passed, and the names of those
/// that did not.
#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub passed: bool,
    pub failures: Vec<String>,
}

pub(crate) struct Output {
    /// Extra `# ` lines for the CSV metadata block.
    pub meta: Vec<String>,
    pub csv: Vec<u8>,
    pub json: serde_json::Value,
    pub failures: Vec<String>,
}

/// Exit status for an error: 1 when a computation broke down, 2 for usage
/// and I/O problems.
pub fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Numeric(_) | Error::Contract(_) | Error::Simulation { .. } => 1,
        _ => 2,
    }
}

pub fn run(config: &RunConfig) -> Result<Outcome> {
    let start = Instant::now();
    let output = commands::execute(config)?;
    let wall_ms = if config.global.no_timing { 0 } else { start.elapsed().as_millis() as u64 };
    let bytes = render(config, &output, wall_ms)?;
    match &config.global.out {
        Some(path) => std::fs::write(path, bytes)?,
        None => std::io::stdout().lock().write_all(&bytes)?,
    }
    Ok(Outcome { passed: output.failures.is_empty(), failures: output.failures })
}

fn render(config: &RunConfig, output: &Output, wall_ms: u64) -> Result<Vec<u8>> {
    let config_json = config.to_json();
    match config.global.format {
        Format::Csv => {
            let mut out = Vec::new();
            writeln!(out, "# areawalk {TOOL_VERSION}")?;
            writeln!(out, "# config: {}", serde_json::to_string(&config_json)?)?;
            writeln!(out, "# wall_time_ms: {wall_ms}")?;
            for line in &output.meta {
                writeln!(out, "# {line}")?;
            }
            out.extend_from_slice(&output.csv);
            Ok(out)
        }
        Format::Json => {
            let doc = serde_json::json!({
                "tool": "areawalk",
                "version": TOOL_VERSION,
                "config": config_json,
                "wall_time_ms": wall_ms,
                "passed": output.failures.is_empty(),
                "failures": output.failures,
                "result": output.json,
            });
            let mut out = serde_json::to_vec_pretty(&doc)?;
            out.push(b'\n');
            Ok(out)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_roundtrip_for_every_subcommand() {
        let lines = [
            "areawalk constants --n 4",
            "areawalk matrices --n 3 --format json",
            "areawalk gfun --t-grid 0:1:0.25 --k-max 40",
            "areawalk mc --estimator partial-density --t 0.3 --n 4 --k 2 --width 0.01 --richardson --seed 9",
            "areawalk orderstats --samples 1000 --threads 2",
            "areawalk sticky --model poisson --replicates 3 --out x.csv",
            "areawalk verify --level full --no-timing",
        ];
        for line in lines {
            let cli = Cli::try_parse_from(line.split_whitespace()).unwrap();
            let config = RunConfig::from(cli);
            assert_eq!(RunConfig::from_json(&config.to_json()).unwrap(), config, "{line}");
        }
    }

    #[test]
    fn defaults() {
        let cli = Cli::try_parse_from(["areawalk", "sticky"]).unwrap();
        assert_eq!(cli.global.seed, DEFAULT_SEED);
        assert_eq!(cli.global.format, Format::Csv);
        let Command::Sticky { n, model, replicates, .. } = cli.command else { panic!() };
        assert_eq!((n, model, replicates), (1000, InitialModel::Uniform, 10));
    }

    #[test]
    fn usage_errors() {
        assert!(Cli::try_parse_from(["areawalk"]).is_err());
        assert!(Cli::try_parse_from(["areawalk", "sticky", "--model", "gauss"]).is_err());
        assert!(Cli::try_parse_from(["areawalk", "mc", "--estimator", "nope"]).is_err());
    }

    #[test]
    fn exit_codes() {
        assert_eq!(exit_code(&Error::invalid("x")), 2);
        assert_eq!(exit_code(&Error::Numeric("x".into())), 1);
    }
}
