//! Command-line front end. Every command is a pure function of the model
//! file bytes and the flags.

mod check;
mod commands;

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::dynamics::{RunConfig, DEFAULT_BURNIN};
use crate::error::{Error, Result};
use crate::models::{load_model, ModelSpec};
use crate::su11::C64;

pub use check::{run_suites, Assertion, Suite, SuiteReport};

pub const EXIT_OK: i32 = 0;
pub const EXIT_CHECK_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

#[derive(Parser, Debug)]
#[command(name = "furstenberg", version, about = "Random Moebius dynamics on the unit disc")]
#[command(allow_negative_numbers = true)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Retained orbit states as CSV `n,re_z,im_z,abs_z2`.
    Orbit {
        #[command(flatten)]
        run: RunArgs,
    },
    /// Histogram of |z|² with the ρ_λ overlay, plus a JSON sidecar.
    Hist {
        #[command(flatten)]
        run: RunArgs,
        #[arg(long, default_value_t = 100)]
        bins: usize,
    },
    /// Lyapunov exponent estimates and the second-order prediction as JSON.
    Lyap {
        #[command(flatten)]
        run: RunArgs,
    },
    /// Lyapunov estimates over an (ε, δ) grid as CSV.
    Scan {
        #[command(flatten)]
        run: RunArgs,
        /// Comma-separated ε values.
        #[arg(long, value_delimiter = ',', required = true)]
        epsilon_grid: Vec<f64>,
        /// Comma-separated δ values.
        #[arg(long, value_delimiter = ',', required = true)]
        delta_grid: Vec<f64>,
    },
    /// Model constants as JSON.
    Constants {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Runs invariant suites and prints a JSON report.
    Check {
        /// Suites to run (algebra, moebius, expansions, density, balance); all by default.
        #[arg(long, value_delimiter = ',')]
        suite: Vec<Suite>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
        /// Scales λ in the density suite; any value other than 1 must fail.
        #[arg(long, hide = true, default_value_t = 1.0)]
        debug_lambda_scale: f64,
    },
}

#[derive(Args, Debug, Clone)]
pub struct RunArgs {
    #[arg(long)]
    pub model: PathBuf,
    /// Overrides the model file's ε.
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Overrides the model file's δ.
    #[arg(long)]
    pub delta: Option<f64>,
    /// Total iterations per replica, burn-in included.
    #[arg(long, default_value_t = 100_000)]
    pub steps: u64,
    /// Discarded prefix; 0 for `orbit`, min(1000, steps − 1) otherwise.
    #[arg(long)]
    pub burnin: Option<u64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Initial point as `re` or `re,im`.
    #[arg(long, default_value = "0", value_parser = parse_z0)]
    pub z0: C64,
    #[arg(long)]
    pub replicas: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

fn parse_z0(text: &str) -> std::result::Result<C64, String> {
    let parts: Vec<&str> = text.split(',').collect();
    let num = |s: &str| s.trim().parse::<f64>().map_err(|e| format!("bad number `{s}`: {e}"));
    match parts.as_slice() {
        [re] => Ok(C64::new(num(re)?, 0.0)),
        [re, im] => Ok(C64::new(num(re)?, num(im)?)),
        _ => Err(format!("expected `re` or `re,im`, got `{text}`")),
    }
}

impl RunArgs {
    fn model(&self) -> Result<ModelSpec> {
        let spec = load_model(&self.model)?;
        Ok(spec.with_params(self.epsilon.unwrap_or(spec.epsilon), self.delta.unwrap_or(spec.delta)))
    }

    fn config(&self, default_burnin: u64, default_replicas: u64) -> Result<RunConfig> {
        let cfg = RunConfig {
            seed: self.seed,
            steps: self.steps,
            burnin: self.burnin.unwrap_or(default_burnin.min(self.steps.saturating_sub(1))),
            replicas: self.replicas.unwrap_or(default_replicas),
            z0: self.z0,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    fn default_config(&self, default_replicas: u64) -> Result<RunConfig> {
        self.config(DEFAULT_BURNIN, default_replicas)
    }
}

/// Writer for `--out`, or stdout.
fn output(out: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match out {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

/// Fixed 17-significant-digit formatting for float columns.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Exit code for a library error.
pub fn exit_code(err: &Error) -> i32 {
    if err.is_numeric() || matches!(err, Error::Anomaly) {
        EXIT_NUMERIC
    } else {
        EXIT_USAGE
    }
}

fn error_json(err: &Error) -> String {
    let kind = match err {
        Error::Anomaly => "anomaly",
        Error::Escape { .. } => "escape",
        Error::DegenerateVector(_) => "degenerate_vector",
        Error::Io(_) => "io",
        Error::Json(_) => "model_file",
        Error::InvalidModel(_) => "invalid_model",
        Error::InvalidArgument(_) => "invalid_argument",
        _ => "error",
    };
    serde_json::json!({ "error": kind, "message": err.to_string() }).to_string()
}

/// Applies `THREADS` to the global rayon pool; results never depend on it.
fn configure_threads() {
    if let Some(n) = std::env::var("THREADS").ok().and_then(|v| v.trim().parse::<usize>().ok()) {
        if n > 0 {
            let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
        }
    }
}

/// Runs a parsed command and returns the process exit code.
pub fn execute(cli: Cli) -> i32 {
    configure_threads();
    let result = match cli.command {
        Command::Orbit { run } => commands::orbit(&run),
        Command::Hist { run, bins } => commands::hist(&run, bins),
        Command::Lyap { run } => commands::lyap(&run),
        Command::Scan { run, epsilon_grid, delta_grid } => commands::scan(&run, &epsilon_grid, &delta_grid),
        Command::Constants { model, out } => commands::constants(&model, out.as_deref()),
        Command::Check { suite, seed, out, debug_lambda_scale } => {
            return match check::check(&suite, seed, debug_lambda_scale, out.as_deref()) {
                Ok(true) => EXIT_OK,
                Ok(false) => EXIT_CHECK_FAILED,
                Err(e) => {
                    eprintln!("{}", error_json(&e));
                    exit_code(&e)
                }
            };
        }
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("{}", error_json(&e));
            exit_code(&e)
        }
    }
}

/// Parses `std::env::args` and runs; clap reports usage errors with exit 2.
pub fn main_entry() -> i32 {
    match Cli::try_parse() {
        Ok(cli) => execute(cli),
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            code
        }
    }
}
