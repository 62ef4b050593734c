//! `qonsager`: run verification suites and emit operator matrices and overlap
//! tensors as JSON.
//!
//! Exit codes: 0 when every assertion passes, 1 when any fails, 2 for usage
//! and configuration errors.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use qonsager::suite::Suite;
use qonsager::Precision;

#[derive(Parser, Debug)]
#[command(name = "qonsager", version, about = "Verify q-difference realizations of the q-Onsager algebra")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

/// Options shared by all subcommands.
#[derive(clap::Args, Debug, Clone)]
pub struct Common {
    /// JSON run configuration.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Seed for random parameter draws (overrides the config).
    #[arg(long)]
    pub seed: Option<u64>,
    /// Working precision for the classical orthogonality sums.
    #[arg(long, value_enum)]
    pub precision: Option<PrecisionArg>,
    /// Tolerance override, `KEY=VAL`; repeatable.
    #[arg(long = "tol", value_name = "KEY=VAL")]
    pub tol: Vec<String>,
    /// Spins `2j_1,..,2j_N` for a random draw when the config has no parameters.
    #[arg(long, value_delimiter = ',')]
    pub spins: Vec<u32>,
}

#[derive(Copy, Clone, Debug, ValueEnum)]
pub enum PrecisionArg {
    Standard,
    Extended,
}

impl From<PrecisionArg> for Precision {
    fn from(p: PrecisionArg) -> Self {
        match p {
            PrecisionArg::Standard => Precision::Standard,
            PrecisionArg::Extended => Precision::Extended,
        }
    }
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum OpArg {
    #[value(name = "W0", alias = "w0")]
    W0,
    #[value(name = "W1", alias = "w1")]
    W1,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum BasisArg {
    Monomial,
    #[value(name = "F")]
    F,
    #[value(name = "Ftilde")]
    Ftilde,
    #[value(name = "G")]
    G,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum OverlapKind {
    #[value(name = "C")]
    C,
    #[value(name = "D")]
    D,
    #[value(name = "Dtilde")]
    Dtilde,
    #[value(name = "fusion-check")]
    FusionCheck,
    #[value(name = "appendixB-check")]
    AppendixBCheck,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run verification suites and print a JSON report.
    Verify {
        #[command(flatten)]
        common: Common,
        /// Suite to run; repeatable. Defaults to the config's list, then `all`.
        #[arg(long = "suite")]
        suites: Vec<String>,
    },
    /// Print an operator matrix in the chosen basis.
    Matrix {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        op: OpArg,
        #[arg(long, default_value_t = 1)]
        level: usize,
        #[arg(long, value_enum, default_value = "monomial")]
        basis: BasisArg,
    },
    /// Print an overlap tensor or a closed-form discrepancy report.
    Overlaps {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum)]
        kind: OverlapKind,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            let usage = e.downcast_ref::<config::ConfigError>().is_some();
            ExitCode::from(if usage { 2 } else { 1 })
        }
    }
}

pub fn parse_suites(names: &[String]) -> Result<Vec<Suite>, config::ConfigError> {
    names.iter().map(|n| n.parse::<Suite>().map_err(|e| config::ConfigError(e.to_string()))).collect()
}
