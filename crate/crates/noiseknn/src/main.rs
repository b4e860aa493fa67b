use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{CommandFactory, Parser, Subcommand};
use noiseknn::commands;
use noiseknn::core::distributions::{GammaParams, RiskMode};
use noiseknn::spec::{parse_exponent, parse_risk_mode, read_spec, read_sweep_config};
use noiseknn::sweep::SweepOptions;
use serde_json::Value;

/// Adaptive k-NN classification under unknown class-conditional label noise.
///
/// Every invocation prints exactly one JSON document on stdout; diagnostics go
/// to stderr. Exit status: 0 success, 2 usage error, 1 runtime error.
#[derive(Parser)]
#[command(name = "noiseknn", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

fn parse_delta(s: &str) -> Result<f64, String> {
    match s.parse::<f64>() {
        Ok(d) if d > 0.0 && d < 1.0 => Ok(d),
        Ok(d) => Err(format!("delta must lie in (0, 1), got {d}")),
        Err(e) => Err(e.to_string()),
    }
}

#[derive(Subcommand)]
enum Command {
    /// Draw a data file from a distribution spec.
    Gen {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        n: usize,
        #[arg(long, env = "NOISEKNN_SEED", default_value_t = 0)]
        seed: u64,
        /// Data file to write.
        #[arg(long)]
        out: PathBuf,
        /// Write the clean labels instead of the corrupted ones.
        #[arg(long)]
        clean: bool,
    },
    /// Lepski k-NN regression estimates at query points.
    Regress {
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        queries: PathBuf,
        #[arg(long, value_parser = parse_delta)]
        delta: f64,
        /// Write the result here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Lower-confidence-bound estimates of the supremum and infimum.
    Supest {
        #[arg(long)]
        data: PathBuf,
        #[arg(long, value_parser = parse_delta)]
        delta: f64,
    },
    /// Estimate both label-noise rates.
    NoiseEst {
        #[arg(long)]
        data: PathBuf,
        #[arg(long, value_parser = parse_delta)]
        delta: f64,
    },
    /// Fit the plug-in classifier and label query points.
    Classify {
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        queries: PathBuf,
        #[arg(long, value_parser = parse_delta)]
        delta: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a sample-size sweep and write trials.csv and summary.json.
    Sweep {
        #[arg(long)]
        config: PathBuf,
        /// Output directory.
        #[arg(long)]
        out: PathBuf,
        /// Concurrent trials [default: available parallelism].
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        jobs: Option<u64>,
        /// Overrides the config: `exact` or `mc:<count>`.
        #[arg(long, value_parser = parse_risk_mode)]
        risk_mode: Option<RiskMode>,
        /// Overrides the config's base seed.
        #[arg(long, env = "NOISEKNN_SEED")]
        seed: Option<u64>,
        /// Overrides the config's delta.
        #[arg(long, value_parser = parse_delta)]
        delta: Option<f64>,
        /// Write wall_ms = 0 so that repeated runs give identical files.
        #[arg(long)]
        no_timing: bool,
    },
    /// Rate exponent and active branch for given assumption parameters.
    Exponent {
        /// Read the exponents from a spec file instead.
        #[arg(long, conflicts_with_all = ["alpha", "beta", "d", "gamma", "tau"])]
        spec: Option<PathBuf>,
        #[arg(long, required_unless_present = "spec")]
        alpha: Option<f64>,
        #[arg(long, required_unless_present = "spec")]
        beta: Option<f64>,
        #[arg(long, required_unless_present = "spec")]
        d: Option<f64>,
        /// A number or `inf`.
        #[arg(long, value_parser = parse_exponent, required_unless_present = "spec")]
        gamma: Option<f64>,
        /// A number or `inf`.
        #[arg(long, value_parser = parse_exponent, required_unless_present = "spec")]
        tau: Option<f64>,
    },
}

fn usage_error(message: String) -> ExitCode {
    let err = Cli::command().error(ErrorKind::ValueValidation, message);
    let _ = err.print();
    ExitCode::from(2)
}

fn require_files(paths: &[&Path]) -> Result<(), String> {
    match paths.iter().find(|p| !p.is_file()) {
        Some(p) => Err(format!("{} is not a readable file", p.display())),
        None => Ok(()),
    }
}

fn require_parent(path: &Path) -> Result<(), String> {
    match path.parent() {
        Some(dir) if !dir.as_os_str().is_empty() && !dir.is_dir() => {
            Err(format!("directory {} of {} does not exist", dir.display(), path.display()))
        }
        _ => Ok(()),
    }
}

/// Paths are checked before any work starts.
fn validate_paths(cmd: &Command) -> Result<(), String> {
    match cmd {
        Command::Gen { spec, out, .. } => {
            require_files(&[spec])?;
            require_parent(out)
        }
        Command::Regress { data, queries, out, .. } | Command::Classify { data, queries, out, .. } => {
            require_files(&[data, queries])?;
            out.as_deref().map_or(Ok(()), require_parent)
        }
        Command::Supest { data, .. } | Command::NoiseEst { data, .. } => require_files(&[data]),
        Command::Sweep { config, out, .. } => {
            require_files(&[config])?;
            if out.exists() && !out.is_dir() {
                return Err(format!("{} exists and is not a directory", out.display()));
            }
            require_parent(out)
        }
        Command::Exponent { spec, .. } => spec.as_deref().map_or(Ok(()), |s| require_files(&[s])),
    }
}

/// Writes `doc` to `out` when given and returns the document for stdout.
fn route(doc: Value, out: Option<&Path>) -> noiseknn::Result<Value> {
    match out {
        None => Ok(doc),
        Some(path) => {
            let count = doc.get("predictions").or(doc.get("estimates")).and_then(Value::as_array).map_or(0, Vec::len);
            noiseknn::data::write_file(path, &noiseknn::report::to_pretty(&doc))?;
            Ok(serde_json::json!({ "out": path.display().to_string(), "queries": count }))
        }
    }
}

fn run(cmd: Command) -> noiseknn::Result<Value> {
    match cmd {
        Command::Gen { spec, n, seed, out, clean } => commands::gen(&spec, n, seed, clean, &out),
        Command::Regress { data, queries, delta, out } => route(commands::regress(&data, &queries, delta)?, out.as_deref()),
        Command::Supest { data, delta } => commands::supest(&data, delta),
        Command::NoiseEst { data, delta } => commands::noise_est(&data, delta),
        Command::Classify { data, queries, delta, out } => route(commands::classify(&data, &queries, delta)?, out.as_deref()),
        Command::Sweep { config, out, jobs, risk_mode, seed, delta, no_timing } => {
            let mut cfg = read_sweep_config(&config)?;
            if let Some(mode) = risk_mode {
                cfg.risk_mode = mode;
            }
            if let Some(seed) = seed {
                cfg.base_seed = seed;
            }
            if let Some(delta) = delta {
                cfg.delta = delta;
            }
            let opts = SweepOptions { jobs: jobs.unwrap_or(0) as usize, timing: !no_timing };
            commands::sweep(&cfg, &opts, &out)
        }
        Command::Exponent { spec, alpha, beta, d, gamma, tau } => {
            let g = match spec {
                Some(path) => read_spec(&path)?.gamma,
                None => GammaParams::new(
                    alpha.expect("required by clap"),
                    beta.expect("required by clap"),
                    d.expect("required by clap"),
                    gamma.expect("required by clap"),
                    tau.expect("required by clap"),
                )?,
            };
            Ok(commands::exponent(&g))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Err(message) = validate_paths(&cli.command) {
        return usage_error(message);
    }
    match run(cli.command) {
        Ok(doc) => {
            println!("{doc}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
