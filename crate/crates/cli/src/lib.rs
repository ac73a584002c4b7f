//! Command-line front end for `pronylab`.
//!
//! Every command reads a JSON document (a file path, inline JSON given to
//! `--input`, or stdin) and writes JSON or CSV to `--output` (default
//! stdout). Schemas are listed in the README.

pub mod commands;
pub mod input;
pub mod tables;

use std::io::Write;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};

#[derive(Debug, Parser)]
#[command(name = "pronylab", version, about = "Prony systems, Prony varieties and error geometry")]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args)]
pub struct Common {
    /// JSON input: a path or an inline document. Read from stdin if absent.
    #[arg(long, global = true)]
    pub input: Option<String>,
    /// Where to write the primary output (default: stdout).
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Where to write the JSON summary of a scan.
    #[arg(long, global = true)]
    pub summary: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Relative singular-value threshold for Hankel rank decisions.
    #[arg(long, global = true, allow_negative_numbers = true)]
    pub tol_rank: Option<f64>,
    /// Roots with |Im z| <= tol_real (1 + |Re z|) count as real.
    #[arg(long, global = true, default_value_t = 1e-8, allow_negative_numbers = true)]
    pub tol_real: f64,
    /// Number of error-set samples.
    #[arg(long, global = true, default_value_t = 1000)]
    pub samples: usize,
    #[arg(long, global = true)]
    pub quiet: bool,
}

#[derive(Debug, Clone, Subcommand)]
pub enum Command {
    /// Solve the Prony system for {"d", "moments"}.
    Solve,
    /// Moments of {"amplitudes", "nodes", "count"?}.
    Moments,
    /// Trace the Prony curve of {"moments"} (2d - 1 fixed moments) as CSV.
    VarietyTrace(TraceArgs),
    /// Sample the error set of {"amplitudes", "nodes", "eps"} as CSV.
    ErrorScan,
    /// Worst-case error scaling for the symmetric cluster family.
    Scaling(ScalingArgs),
    /// Gauss quadrature from {"moments"}.
    Quadrature,
    /// Exponential fit of {"samples"}.
    Expfit,
    /// Waring decomposition of a binary form {"coefficients"}.
    Waring,
}

#[derive(Debug, Clone, Args)]
pub struct TraceArgs {
    #[arg(long, allow_negative_numbers = true)]
    pub t_min: Option<f64>,
    #[arg(long, allow_negative_numbers = true)]
    pub t_max: Option<f64>,
    #[arg(long)]
    pub steps: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct ScalingArgs {
    #[arg(long)]
    pub d: Option<usize>,
    /// Comma-separated, strictly decreasing.
    #[arg(long, value_delimiter = ',')]
    pub h_list: Option<Vec<f64>>,
    /// Error exponent: eps = h^p.
    #[arg(long)]
    pub p: Option<f64>,
}

/// Process exit codes.
pub mod exit {
    pub const OK: i32 = 0;
    pub const FAILURE: i32 = 1;
    pub const COMPLEX: i32 = 2;
    pub const UNSOLVABLE: i32 = 3;
}

/// Runs a parsed command line, writing primary output to `--output` or
/// `stdout` and diagnostics to `stderr`; returns the exit code.
pub fn run(cli: &Cli, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32 {
    match commands::dispatch(cli, stdout) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e:#}");
            commands::exit_code(&e)
        }
    }
}

/// Caps the global thread pool from `PRONYLAB_THREADS`.
pub fn init_threads() -> anyhow::Result<()> {
    if let Ok(v) = std::env::var("PRONYLAB_THREADS") {
        let n: usize = v
            .parse()
            .map_err(|_| anyhow::anyhow!("PRONYLAB_THREADS must be a positive integer, got {v:?}"))?;
        rayon::ThreadPoolBuilder::new().num_threads(n).build_global()?;
    }
    Ok(())
}
