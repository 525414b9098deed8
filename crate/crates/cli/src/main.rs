mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use viswalk::numtheory::ExactRational;

use crate::output::Format;

/// Visible lattice points along random and periodic walks.
#[derive(Parser, Debug)]
#[command(name = "viswalk", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
struct OutputArgs {
    #[arg(long, value_enum, default_value = "json")]
    format: Format,

    /// Write here instead of stdout (default: $VISWALK_OUT_DIR/<command>.<format> when set).
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Exact b_k polynomials and enclosures of c_k(alpha).
    Constants {
        /// Largest window length; rows are produced for 1..=K.
        #[arg(long, value_parser = commands::parse_k)]
        k: u32,
        /// Step-right probability, as p/q or a decimal.
        #[arg(long, default_value = "1/2", value_parser = parse_alpha)]
        alpha: ExactRational,
        #[arg(long, default_value_t = 1e-9, value_parser = parse_tolerance)]
        tolerance: f64,
        /// Also give the exact constant for visibility at level M.
        #[arg(long, value_parser = commands::parse_level)]
        level: Option<u64>,
        /// Include limits for runs of exactly k visible points.
        #[arg(long)]
        runs_exact: bool,
        /// Include the limit for changes of visibility.
        #[arg(long)]
        changes: bool,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Monte Carlo walks compared against the limits.
    Simulate {
        #[arg(long, default_value = "1/2", value_parser = parse_alpha)]
        alpha: ExactRational,
        #[arg(long)]
        steps: u64,
        #[arg(long, default_value_t = 4, value_parser = commands::parse_kmax)]
        kmax: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u32).range(1..=4096))]
        streams: u32,
        #[arg(long, value_parser = commands::parse_level)]
        level: Option<u64>,
        /// Rows deviating by more than this multiple of n^(-1/4) are flagged.
        #[arg(long, default_value_t = 3.0)]
        flag_multiple: f64,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Exact visible-point density of an eventually periodic binary expansion.
    Rational {
        /// Expansion such as "0.1000(0110)".
        #[arg(long)]
        x: String,
        /// Also walk this many steps and compare.
        #[arg(long)]
        check_steps: Option<u64>,
        #[command(flatten)]
        out: OutputArgs,
    },
    /// Run acceptance suites; exit status 1 if any criterion fails.
    Verify {
        #[arg(long, default_value = "all", value_parser = ["exact", "oracle", "statistical", "all"])]
        suite: String,
        /// Criteria not started within this many seconds are skipped and fail.
        #[arg(long)]
        budget: Option<f64>,
        #[command(flatten)]
        out: OutputArgs,
    },
}

fn parse_alpha(s: &str) -> Result<ExactRational, String> {
    let a: ExactRational = s.parse().map_err(|e: viswalk::Error| e.to_string())?;
    if a.is_negative() || a > ExactRational::one() {
        return Err(format!("alpha = {a} is outside [0, 1]"));
    }
    Ok(a)
}

fn parse_tolerance(s: &str) -> Result<f64, String> {
    let t: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if !(t.is_finite() && t > 0.0) {
        return Err(format!("tolerance must be a positive number, got {s}"));
    }
    Ok(t)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {}", e.message);
            ExitCode::from(e.status)
        }
    }
}
