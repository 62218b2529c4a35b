//! `fluct`: exact occupation-number statistics from the command line.
//!
//! Exit codes: 0 on success, 1 for usage or parameter errors, 2 when an
//! internal check (oracle comparison, normalization, identity, z-band) fails.

mod commands;
mod table;

use std::fmt;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fluct_core::figures::TemperatureGrid;

use crate::table::Format;

#[derive(Parser, Debug)]
#[command(name = "fluct", version, about = "Occupation-number statistics of N particles sharing M energy quanta")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Output {
    /// Output format; tables default to csv, identity reports to json.
    #[arg(long, value_enum)]
    pub format: Option<Format>,
    /// Write to this file (atomically) instead of stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Precision {
    Exact,
    Float,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Number of microstates C(M+N-1, N-1).
    Microstates {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        m: u64,
        #[command(flatten)]
        output: Output,
    },
    /// Moments <n_j^m> for m = 0..=order-max, or large-N density moments with --t.
    Moments {
        #[arg(long)]
        n: u64,
        #[arg(long, conflicts_with = "t")]
        m: Option<u64>,
        #[arg(long)]
        t: Option<f64>,
        #[arg(long = "levels", alias = "level", value_delimiter = ',')]
        levels: Option<Vec<u64>>,
        #[arg(long, default_value_t = 4)]
        order_max: u32,
        /// Compare every value with brute-force enumeration.
        #[arg(long)]
        check_oracle: bool,
        #[arg(long, value_enum)]
        precision: Option<Precision>,
        #[command(flatten)]
        output: Output,
    },
    /// Distribution of the occupation number n_j.
    Pdf {
        #[arg(long)]
        n: u64,
        #[arg(long, conflicts_with = "t")]
        m: Option<u64>,
        #[arg(long)]
        t: Option<f64>,
        #[arg(long)]
        level: u64,
        /// Add the binomial large-N limit as a column.
        #[arg(long)]
        compare_limit: bool,
        #[arg(long)]
        check_oracle: bool,
        #[arg(long, value_enum)]
        precision: Option<Precision>,
        #[command(flatten)]
        output: Output,
    },
    /// Joint distribution of several occupation numbers.
    Jointpdf {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        m: u64,
        #[arg(long = "levels", alias = "level", value_delimiter = ',', required = true)]
        levels: Vec<u64>,
        /// One count per level; omit for the whole table.
        #[arg(long, value_delimiter = ',')]
        counts: Option<Vec<u64>>,
        /// Add the multinomial limit (levels must be 0..p-1).
        #[arg(long)]
        compare_limit: bool,
        #[arg(long)]
        check_oracle: bool,
        #[arg(long, value_enum)]
        precision: Option<Precision>,
        #[command(flatten)]
        output: Output,
    },
    /// Large-N covariance matrix of (n_0, ..., n_M).
    Covariance {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        m: u64,
        /// Defaults to M/N.
        #[arg(long)]
        t: Option<f64>,
        #[command(flatten)]
        output: Output,
    },
    /// Total fluctuation sqrt(tr Cov) / sum <n_l> against T.
    Fluctuation {
        #[arg(long, value_delimiter = ',', required = true)]
        n: Vec<u64>,
        #[arg(long, conflicts_with = "t")]
        t_grid: Option<TemperatureGrid>,
        #[arg(long, value_delimiter = ',')]
        t: Option<Vec<f64>>,
        #[command(flatten)]
        output: Output,
    },
    /// Monte Carlo means with z-scores against the exact values.
    Mc {
        #[arg(long)]
        n: u64,
        #[arg(long)]
        m: u64,
        #[arg(long, default_value_t = 100_000)]
        samples: u64,
        #[arg(long, default_value_t = 42)]
        seed: u64,
        #[arg(long = "levels", alias = "level", value_delimiter = ',')]
        levels: Option<Vec<u64>>,
        #[command(flatten)]
        output: Output,
    },
    /// Run the identity checks.
    Identities {
        /// Run every identity over its full grid (the default).
        #[arg(long)]
        all: bool,
        #[command(flatten)]
        output: Output,
    },
    /// Write figure data (CSV per panel plus manifest.json) into a directory.
    Figures {
        /// Figure 1 to 7; all figures when omitted.
        #[arg(long)]
        figure: Option<u8>,
        /// Output directory.
        #[arg(long, required = true)]
        out: PathBuf,
    },
}

/// An internal check failed; exits with status 2.
#[derive(Debug)]
pub struct CheckFailed(pub String);

impl fmt::Display for CheckFailed {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for CheckFailed {}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match commands::run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) if e.downcast_ref::<CheckFailed>().is_some() => {
            eprintln!("check failed: {e:#}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
