use std::fs;
use std::path::{Path, PathBuf};

use clap::Args;
use serde::{Deserialize, Serialize};

use ssl_gmm::data_io::read_results;
use ssl_gmm::experiments::{error_gap, Metric, SweepResult};
use ssl_gmm::Method;

use crate::chart::{render, Chart, Point, Series};
use crate::error::CliError;
use crate::manifest::{load_config, ManifestWriter};
use crate::{CliResult, Globals};

#[derive(Debug, Clone, Args)]
pub struct ReportArgs {
    /// Results CSVs written by `simulate`.
    pub inputs: Vec<PathBuf>,
    /// Metric to plot: excess, estimation or test_error.
    #[arg(long, value_parser = parse_metric)]
    pub metric: Option<Metric>,
    #[arg(long)]
    pub log_x: bool,
    #[arg(long)]
    pub log_y: bool,
    /// Also plot `mean(A) - mean(B)` per grid value.
    #[arg(long, num_args = 2, value_names = ["A", "B"])]
    pub gap: Option<Vec<Method>>,
}

fn parse_metric(s: &str) -> Result<Metric, String> {
    s.parse().map_err(|e: ssl_gmm::Error| e.to_string())
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ReportConfig {
    #[serde(default)]
    pub inputs: Vec<PathBuf>,
    #[serde(default)]
    pub metric: Metric,
    #[serde(default)]
    pub log_x: bool,
    #[serde(default)]
    pub log_y: bool,
    #[serde(default)]
    pub gap: Option<(Method, Method)>,
}

fn resolve(args: &ReportArgs, globals: &Globals) -> CliResult<ReportConfig> {
    let mut cfg: ReportConfig = match &globals.config {
        Some(path) => load_config(path, "report")?,
        None => ReportConfig::default(),
    };
    if !args.inputs.is_empty() {
        cfg.inputs = args.inputs.clone();
    }
    if let Some(m) = args.metric {
        cfg.metric = m;
    }
    cfg.log_x |= args.log_x;
    cfg.log_y |= args.log_y;
    if let Some(g) = &args.gap {
        cfg.gap = Some((g[0], g[1]));
    }
    if cfg.inputs.is_empty() {
        return Err(CliError::usage("no results CSV given"));
    }
    if let Some(missing) = cfg.inputs.iter().find(|p| !p.is_file()) {
        return Err(CliError::usage(format!("{} does not exist", missing.display())));
    }
    Ok(cfg)
}

fn axis_label(axis: &str) -> String {
    match axis {
        "snr" => "SNR s = ‖θ*‖".into(),
        "nu_over_nl" => "n_u / n_l".into(),
        "n_l" => "labelled samples n_l".into(),
        "n_u" => "unlabelled samples n_u".into(),
        other => other.into(),
    }
}

fn metric_label(metric: Metric) -> &'static str {
    match metric {
        Metric::Excess => "excess risk",
        Metric::Estimation => "estimation error",
        Metric::TestError => "test error",
    }
}

fn stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "results".into())
}

fn metric_chart(sweep: &SweepResult, cfg: &ReportConfig, name: &str) -> CliResult<Chart> {
    let series = sweep
        .methods()
        .into_iter()
        .map(|m| {
            let rows = sweep.series(m).map_err(CliError::runtime)?;
            Ok(Series {
                name: m.display_name().into(),
                points: rows
                    .iter()
                    .map(|r| Point {
                        x: r.axis_value,
                        y: cfg.metric.of(r),
                        spread: cfg.metric.spread(r),
                    })
                    .collect(),
            })
        })
        .collect::<CliResult<Vec<_>>>()?;
    Ok(Chart {
        title: format!("{} ({name})", metric_label(cfg.metric)),
        x_label: axis_label(&sweep.axis),
        y_label: format!("mean {} ± std", metric_label(cfg.metric)),
        log_x: cfg.log_x,
        log_y: cfg.log_y,
        series,
    })
}

fn gap_chart(sweep: &SweepResult, cfg: &ReportConfig, a: Method, b: Method) -> CliResult<Chart> {
    let gap = error_gap(sweep, a, b, cfg.metric).map_err(CliError::runtime)?;
    let name = format!("{} − {}", a.display_name(), b.display_name());
    Ok(Chart {
        title: format!("{} gap: {name}", metric_label(cfg.metric)),
        x_label: axis_label(&sweep.axis),
        y_label: format!("{} difference", metric_label(cfg.metric)),
        log_x: cfg.log_x,
        // Gaps change sign, so the y axis stays linear.
        log_y: false,
        series: vec![Series {
            name,
            points: gap.into_iter().map(|(x, y)| Point { x, y, spread: 0.0 }).collect(),
        }],
    })
}

fn write_chart(chart: &Chart, path: &Path) -> CliResult<()> {
    let svg = render(chart).map_err(|e| CliError::runtime(format!("{}: {e}", path.display())))?;
    fs::write(path, svg).map_err(|e| CliError::runtime(format!("cannot write {}: {e}", path.display())))
}

pub fn run(args: &ReportArgs, globals: &Globals) -> CliResult<()> {
    let cfg = resolve(args, globals)?;
    let mut sweeps = Vec::with_capacity(cfg.inputs.len());
    for path in &cfg.inputs {
        let sweep = read_results(path).map_err(|e| CliError::runtime(format!("cannot read {}: {e}", path.display())))?;
        if sweep.rows.is_empty() {
            return Err(CliError::runtime(format!("{} has no result rows", path.display())));
        }
        sweeps.push((stem(path), sweep));
    }

    let manifest = ManifestWriter::begin("report", globals, globals.seed.unwrap_or(0), cfg.clone())?;
    for (name, sweep) in &sweeps {
        let path = globals.out.join(format!("{name}_{}.svg", cfg.metric));
        write_chart(&metric_chart(sweep, &cfg, name)?, &path)?;
        globals.note(format!("wrote {}", path.display()));
        if let Some((a, b)) = cfg.gap {
            let path = globals.out.join(format!("{name}_{}_gap_{a}_{b}.svg", cfg.metric));
            write_chart(&gap_chart(sweep, &cfg, a, b)?, &path)?;
            globals.note(format!("wrote {}", path.display()));
        }
    }
    manifest.finish()
}
