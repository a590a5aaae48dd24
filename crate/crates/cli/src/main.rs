//! `ssl-lab`: simulation sweeps, theory evaluation, CSV fitting and SVG
//! reports for semi-supervised learning on the two-component Gaussian mixture.

mod chart;
mod error;
mod fit;
mod manifest;
mod report;
mod simulate;
mod theory;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use error::CliError;

#[derive(Debug, Parser)]
#[command(name = "ssl-lab", version, about = "Semi-supervised learning on the symmetric 2-GMM")]
struct Cli {
    /// Base seed for every random stream of the run.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Output directory.
    #[arg(long, global = true, env = "SSL_LAB_OUT_DIR")]
    out: Option<PathBuf>,

    /// JSON config (or a manifest from an earlier run). Flags take precedence.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Worker threads; defaults to the available parallelism.
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Suppress progress messages on standard error.
    #[arg(long, global = true)]
    quiet: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a Monte Carlo sweep and write results CSV plus manifest.
    Simulate(simulate::SimulateArgs),
    /// Print the theoretical rates for one problem size as JSON.
    Theory(theory::TheoryArgs),
    /// Fit estimators to a labelled CSV table.
    Fit(fit::FitArgs),
    /// Render results CSVs as SVG charts.
    Report(report::ReportArgs),
}

/// Options shared by every subcommand.
#[derive(Debug, Clone)]
pub struct Globals {
    pub seed: Option<u64>,
    pub out: PathBuf,
    pub config: Option<PathBuf>,
    pub threads: Option<usize>,
    pub quiet: bool,
}

impl Globals {
    pub fn note(&self, msg: impl AsRef<str>) {
        if !self.quiet {
            eprintln!("{}", msg.as_ref());
        }
    }
}

const DEFAULT_OUT: &str = "ssl-lab-out";

fn main() -> ExitCode {
    let cli = Cli::parse();
    if cli.threads == Some(0) {
        eprintln!("error: --threads must be at least 1");
        return ExitCode::from(2);
    }
    let globals = Globals {
        seed: cli.seed,
        out: cli.out.unwrap_or_else(|| PathBuf::from(DEFAULT_OUT)),
        config: cli.config,
        threads: cli.threads,
        quiet: cli.quiet,
    };
    let result = match cli.command {
        Command::Simulate(args) => simulate::run(&args, &globals),
        Command::Theory(args) => theory::run(&args, &globals),
        Command::Fit(args) => fit::run(&args, &globals),
        Command::Report(args) => report::run(&args, &globals),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

pub(crate) type CliResult<T> = Result<T, CliError>;
