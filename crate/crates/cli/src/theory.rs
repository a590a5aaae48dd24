use clap::Args;

use ssl_gmm::theory::{rate_report, BoundConstants, ProblemSize, DEFAULT_REGIME_THRESHOLD};

use crate::error::CliError;
use crate::{CliResult, Globals};

#[derive(Debug, Clone, Args)]
pub struct TheoryArgs {
    #[arg(long)]
    pub s: f64,
    #[arg(long)]
    pub d: usize,
    #[arg(long = "n-l", visible_alias = "nl")]
    pub n_l: usize,
    #[arg(long = "n-u", visible_alias = "nu")]
    pub n_u: usize,
    /// Dominance factor separating the SL-, UL-dominant and balanced regimes.
    #[arg(long, default_value_t = DEFAULT_REGIME_THRESHOLD)]
    pub regime_threshold: f64,
    #[arg(long, default_value_t = 1.0)]
    pub c0: f64,
    #[arg(long, default_value_t = 1.0)]
    pub c1: f64,
    #[arg(long, default_value_t = 1.0)]
    pub c2: f64,
    #[arg(long, default_value_t = 1.0)]
    pub c3: f64,
    #[arg(long, default_value_t = 1.0)]
    pub c4: f64,
}

/// Prints the rate report as JSON. Pure arithmetic, so nothing is written to
/// the output directory.
pub fn run(args: &TheoryArgs, _globals: &Globals) -> CliResult<()> {
    let p = ProblemSize::new(args.s, args.d, args.n_l, args.n_u).map_err(CliError::usage)?;
    let c = BoundConstants {
        c0: args.c0,
        c1: args.c1,
        c2: args.c2,
        c3: args.c3,
        c4: args.c4,
        ..BoundConstants::default()
    };
    let report = rate_report(&p, &c, args.regime_threshold).map_err(CliError::usage)?;
    let json = serde_json::to_string_pretty(&report).map_err(CliError::runtime)?;
    println!("{json}");
    Ok(())
}
