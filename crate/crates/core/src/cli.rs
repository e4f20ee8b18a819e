//! Command-line front end.
//!
//! Exit codes: 0 success, 1 invalid input or config, 2 numerical
//! non-convergence. Suites write `<out>/<suite>.csv` and
//! `<out>/<suite>.json` and print the summary path.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use serde_json::{json, Value};

use crate::error::{Error, Result};
use crate::experiments::config::{parse_override, ExperimentConfig, FitConfig, Suite, SCHEMA_VERSION};
use crate::experiments::fit::run_fit;
use crate::experiments::output::{Cell, SuiteOutput, Table};
use crate::experiments::run_suite;
use crate::network::{barron_cost_upper, NetworkDocument};
use crate::norms::SpectralEstimator;

/// Environment variable capping worker threads.
pub const THREADS_ENV: &str = "BARRON_GAUGE_THREADS";
const DEFAULT_OUT: &str = "barron-gauge-out";

#[derive(Debug, Parser)]
#[command(
    name = "barron-gauge",
    version,
    about = "Barron and spectral Barron norm bounds for two-layer ReLU^s networks",
    after_help = concat!(
        "Config files are JSON objects using schema version 1; unspecified keys keep ",
        "their defaults. See crates/core/configs/ for an example per subcommand.\n",
        "Set BARRON_GAUGE_THREADS to cap worker threads."
    )
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// JSON config (a network document for `barron` and `spectral`).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory for CSV and JSON files.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Override a config key, `key=value` (repeatable).
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Decay envelope of profile transforms [config schema v1]
    Decay(Common),
    /// Per-neuron spectral moments over a (b, delta) grid [config schema v1]
    Moment(Common),
    /// Spectral Barron upper bound of a network document [config schema v1]
    Spectral(Common),
    /// Path-cost Barron upper bound of a network document [config schema v1]
    Barron(Common),
    /// Embedding ratios of random networks across dimensions [config schema v1]
    Embed(Common),
    /// Log growth of the triangular hat's truncated moment [config schema v1]
    Tight(Common),
    /// Monte-Carlo approximation rate [config schema v1]
    McRate(Common),
    /// Exploratory probe of fractional powers [config schema v1]
    Remark2(Common),
    /// Path-norm regularised fit [config schema v1]
    Fit(Common),
}

/// Parses `argv` (program name first), runs the command and returns the
/// exit code. Messages go to `out` and `err`.
pub fn dispatch<I, S>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{}", e.render());
                    0
                }
                _ => {
                    let _ = write!(err, "{}", e.render());
                    1
                }
            };
        }
    };
    let pool = match thread_pool() {
        Ok(p) => p,
        Err(e) => return report(err, &e),
    };
    let mut buf = Vec::new();
    let result = pool.install(|| run(cli.command, &mut buf));
    let _ = out.write_all(&buf);
    match result {
        Ok(code) => code,
        Err(e) => report(err, &e),
    }
}

fn report(err: &mut dyn Write, e: &Error) -> i32 {
    let _ = writeln!(err, "error: {e}");
    if e.is_validation() {
        1
    } else if matches!(e, Error::NotConverged(_)) {
        2
    } else {
        1
    }
}

fn thread_pool() -> Result<rayon::ThreadPool> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var(THREADS_ENV) {
        let n: usize = v
            .trim()
            .parse()
            .ok()
            .filter(|n| *n > 0)
            .ok_or_else(|| Error::invalid(format!("{THREADS_ENV} must be a positive integer, got '{v}'")))?;
        builder = builder.num_threads(n);
    }
    builder
        .build()
        .map_err(|e| Error::invalid(format!("cannot build thread pool: {e}")))
}

fn read_json(path: &Path) -> Result<Value> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::invalid(format!("cannot read config {}: {e}", path.display())))?;
    Ok(serde_json::from_str(&text)?)
}

fn overrides(c: &Common) -> Result<Vec<(String, Value)>> {
    let mut list = c
        .overrides
        .iter()
        .map(|s| parse_override(s))
        .collect::<Result<Vec<_>>>()?;
    if let Some(seed) = c.seed {
        list.push(("seed".to_string(), Value::from(seed)));
    }
    Ok(list)
}

fn out_dir(c: &Common, configured: Option<&PathBuf>) -> PathBuf {
    c.out
        .clone()
        .or_else(|| configured.cloned())
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT))
}

fn finish(result: &SuiteOutput, dir: &Path, out: &mut dyn Write) -> Result<i32> {
    let path = result.write(dir)?;
    writeln!(out, "{}", path.display())?;
    Ok(if result.converged { 0 } else { 2 })
}

fn run(command: Command, out: &mut dyn Write) -> Result<i32> {
    let (suite, c) = match command {
        Command::Decay(c) => (Suite::Decay, c),
        Command::Moment(c) => (Suite::Moment, c),
        Command::Embed(c) => (Suite::Embed, c),
        Command::Tight(c) => (Suite::Tight, c),
        Command::McRate(c) => (Suite::McRate, c),
        Command::Remark2(c) => (Suite::Remark2, c),
        Command::Barron(c) => return run_barron(&c, out),
        Command::Spectral(c) => return run_spectral(&c, out),
        Command::Fit(c) => return run_fit_command(&c, out),
    };
    let file = c.config.as_deref().map(read_json).transpose()?;
    let cfg = ExperimentConfig::resolve(suite, file, &overrides(&c)?)?;
    let result = run_suite(suite, &cfg)?;
    finish(&result, &out_dir(&c, cfg.output.as_ref()), out)
}

fn network_arg(c: &Common) -> Result<&Path> {
    c.config
        .as_deref()
        .ok_or_else(|| Error::invalid("--config <network.json> is required"))
}

fn run_barron(c: &Common, out: &mut dyn Write) -> Result<i32> {
    if !c.overrides.is_empty() {
        return Err(Error::invalid("barron takes no --set overrides"));
    }
    let (net, domain) = NetworkDocument::read(network_arg(c)?)?;
    let cost = barron_cost_upper(&net, &domain)?;
    writeln!(out, "{cost:?}")?;
    Ok(0)
}

fn run_spectral(c: &Common, out: &mut dyn Write) -> Result<i32> {
    let (net, domain) = NetworkDocument::read(network_arg(c)?)?;
    let mut opts = json!({"schema_version": SCHEMA_VERSION, "delta": 0.5, "tol": 1e-6});
    for (k, v) in overrides(c)? {
        if k == "seed" {
            continue;
        }
        if !opts.as_object().expect("object").contains_key(&k) {
            return Err(Error::invalid(format!("unknown spectral option '{k}' (expected delta or tol)")));
        }
        opts[k] = v;
    }
    let num = |k: &str| {
        opts[k]
            .as_f64()
            .ok_or_else(|| Error::invalid(format!("{k} must be a number")))
    };
    let (delta, tol) = (num("delta")?, num("tol")?);
    let bound = SpectralEstimator::new(tol)?.spectral_upper(&net, &domain, delta)?;
    writeln!(out, "{:?}", bound.value)?;
    if let Some(dir) = &c.out {
        let mut table = Table::new(&["delta", "spectral_upper", "err", "converged"]);
        table.push(vec![
            Cell::Float(delta),
            Cell::Float(bound.value),
            Cell::Float(bound.err),
            Cell::Bool(bound.converged),
        ]);
        let mut result = SuiteOutput::new("spectral", opts.clone(), table);
        result.converged = bound.converged;
        result.constant("barron_cost", barron_cost_upper(&net, &domain)?);
        finish(&result, dir, out)?;
    }
    Ok(if bound.converged { 0 } else { 2 })
}

fn run_fit_command(c: &Common, out: &mut dyn Write) -> Result<i32> {
    let file = c.config.as_deref().map(read_json).transpose()?;
    let cfg = FitConfig::resolve(file, &overrides(c)?)?;
    let result = run_fit(&cfg)?;
    finish(&result, &out_dir(c, cfg.output.as_ref()), out)
}
