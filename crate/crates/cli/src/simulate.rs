use clap::Args;

use ssl_gmm::data_io::write_results;
use ssl_gmm::estimators::UlBackend;
use ssl_gmm::experiments::{preset, run_sweep_with_threads, SnrMode, SweepAxis, SweepConfig, TrialConfig, PRESET_NAMES};
use ssl_gmm::{Method, MixtureModel};

use crate::error::CliError;
use crate::manifest::{load_config, ManifestWriter};
use crate::{CliResult, Globals};

pub const RESULTS_FILE: &str = "results.csv";

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    /// Compiled-in configuration: fig1a, fig1b or fig3.
    #[arg(long)]
    pub preset: Option<String>,
    /// Signal-to-noise ratio `‖θ*‖`; θ* points along the first axis.
    #[arg(long)]
    pub s: Option<f64>,
    /// Ambient dimension.
    #[arg(long)]
    pub d: Option<usize>,
    #[arg(long = "n-l", visible_alias = "nl")]
    pub n_l: Option<usize>,
    #[arg(long = "n-u", visible_alias = "nu")]
    pub n_u: Option<usize>,
    #[arg(long = "n-val")]
    pub n_val: Option<usize>,
    #[arg(long = "n-test")]
    pub n_test: Option<usize>,
    /// Comma-separated method names, e.g. `sl,ulplus,sslw`.
    #[arg(long, value_delimiter = ',')]
    pub methods: Option<Vec<Method>>,
    #[arg(long)]
    pub replicates: Option<usize>,
    /// Sweep axis: snr, nu_over_nl, n_l or n_u.
    #[arg(long)]
    pub axis: Option<SweepAxis>,
    /// Comma-separated axis values. Defaults to the single current value.
    #[arg(long, value_delimiter = ',')]
    pub grid: Option<Vec<f64>>,
    /// Comma-separated SSL-W weight grid.
    #[arg(long = "t-grid", value_delimiter = ',')]
    pub t_grid: Option<Vec<f64>>,
    /// SNR used by SSL-S: `oracle` or `plugin`.
    #[arg(long = "ssl-s-snr", value_parser = parse_snr_mode)]
    pub ssl_s_snr: Option<SnrMode>,
    /// Unsupervised estimator behind UL+: `spectral` or `em`.
    #[arg(long = "ul-backend", value_parser = parse_backend)]
    pub ul_backend: Option<UlBackend>,
}

fn parse_snr_mode(s: &str) -> Result<SnrMode, String> {
    match s.to_ascii_lowercase().as_str() {
        "oracle" => Ok(SnrMode::Oracle),
        "plugin" | "plug-in" => Ok(SnrMode::PlugIn),
        _ => Err(format!("unknown SNR mode `{s}` (expected oracle or plugin)")),
    }
}

fn parse_backend(s: &str) -> Result<UlBackend, String> {
    match s.to_ascii_lowercase().as_str() {
        "spectral" => Ok(UlBackend::Spectral),
        "em" => Ok(UlBackend::Em),
        _ => Err(format!("unknown UL backend `{s}` (expected spectral or em)")),
    }
}

fn default_config() -> SweepConfig {
    let model = MixtureModel::along_first_axis(1.0, 2).expect("valid default model");
    SweepConfig {
        trial: TrialConfig::new(model, 20, 2000, vec![Method::Sl, Method::UlPlus, Method::SslW]),
        axis: SweepAxis::Snr,
        grid: Vec::new(),
        replicates: 20,
    }
}

fn axis_value(axis: SweepAxis, trial: &TrialConfig) -> f64 {
    match axis {
        SweepAxis::Snr => trial.model.snr(),
        SweepAxis::Ratio => trial.n_u as f64 / trial.n_l.max(1) as f64,
        SweepAxis::NLabeled => trial.n_l as f64,
        SweepAxis::NUnlabeled => trial.n_u as f64,
    }
}

/// Config file or preset first, then flags on top.
pub fn resolve(args: &SimulateArgs, globals: &Globals) -> CliResult<SweepConfig> {
    let mut cfg = match (&globals.config, &args.preset) {
        (Some(_), Some(_)) => return Err(CliError::usage("--config and --preset are mutually exclusive")),
        (Some(path), None) => load_config(path, "simulate")?,
        (None, Some(name)) => preset(name).ok_or_else(|| {
            CliError::usage(format!("unknown preset `{name}` (available: {})", PRESET_NAMES.join(", ")))
        })?,
        (None, None) => default_config(),
    };

    let t = &mut cfg.trial;
    if args.s.is_some() || args.d.is_some() {
        let s = args.s.unwrap_or(t.model.snr());
        t.model = match args.d {
            Some(d) => MixtureModel::along_first_axis(s, d),
            None => t.model.with_snr(s),
        }
        .map_err(CliError::usage)?;
    }
    if let Some(v) = args.n_l {
        t.n_l = v;
    }
    if let Some(v) = args.n_u {
        t.n_u = v;
    }
    if let Some(v) = args.n_val {
        t.n_val = v;
    }
    if let Some(v) = args.n_test {
        t.n_test = v;
    }
    if let Some(m) = &args.methods {
        t.methods = m.clone();
    }
    if let Some(g) = &args.t_grid {
        t.fit.t_grid = g.clone();
    }
    if let Some(m) = args.ssl_s_snr {
        t.fit.ssl_s_snr = m;
    }
    if let Some(b) = args.ul_backend {
        t.fit.solver.ul_backend = b;
    }
    if let Some(seed) = globals.seed {
        t.base_seed = seed;
    }
    if let Some(r) = args.replicates {
        cfg.replicates = r;
    }
    if let Some(a) = args.axis {
        if a != cfg.axis {
            // The inherited grid belongs to the old axis.
            cfg.grid.clear();
        }
        cfg.axis = a;
    }
    if let Some(g) = &args.grid {
        cfg.grid = g.clone();
    }
    if cfg.grid.is_empty() {
        cfg.grid = vec![axis_value(cfg.axis, &cfg.trial)];
    }
    cfg.validate().map_err(CliError::usage)?;
    Ok(cfg)
}

pub fn run(args: &SimulateArgs, globals: &Globals) -> CliResult<()> {
    let cfg = resolve(args, globals)?;
    let manifest = ManifestWriter::begin("simulate", globals, cfg.trial.base_seed, cfg.clone())?;
    globals.note(format!(
        "simulate: {} replicates x {} grid values along {} ({} methods)",
        cfg.replicates,
        cfg.grid.len(),
        cfg.axis,
        cfg.trial.methods.len()
    ));
    let sweep = run_sweep_with_threads(&cfg, globals.threads).map_err(CliError::runtime)?;
    let path = globals.out.join(RESULTS_FILE);
    write_results(&sweep, &path).map_err(|e| CliError::runtime(format!("cannot write {}: {e}", path.display())))?;
    manifest.finish()?;
    globals.note(format!("wrote {}", path.display()));
    Ok(())
}
