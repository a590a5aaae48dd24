use std::collections::BTreeMap;
use std::fs;
use std::path::PathBuf;

use clap::Args;
use serde::{Deserialize, Serialize};

use ssl_gmm::data_io::{load_csv, pca_project, split, standardize, SplitSpec};
use ssl_gmm::estimators::SnrSource;
use ssl_gmm::experiments::{compatibility_score, fit_methods, Compatibility, FitInputs, FitSettings, RunningStats};
use ssl_gmm::rng::derive_seed;
use ssl_gmm::Method;

use crate::error::CliError;
use crate::manifest::{load_config, ManifestWriter};
use crate::{CliResult, Globals};

pub const FIT_CSV: &str = "fit.csv";
pub const FIT_JSON: &str = "fit.json";

const PCA_TOL: f64 = 1e-10;
const PCA_MAX_ITER: usize = 100_000;

#[derive(Debug, Clone, Args)]
pub struct FitArgs {
    /// Input CSV with a header row.
    #[arg(long)]
    pub data: Option<PathBuf>,
    /// Name of the label column.
    #[arg(long)]
    pub label: Option<String>,
    /// Label value mapped to +1.
    #[arg(long)]
    pub positive: Option<String>,
    #[arg(long = "n-l", visible_alias = "nl")]
    pub n_l: Option<usize>,
    /// Validation rows; 1000 unless the table is too small.
    #[arg(long = "n-val")]
    pub n_val: Option<usize>,
    /// Test rows; 1000 unless the table is too small.
    #[arg(long = "n-test")]
    pub n_test: Option<usize>,
    /// Project onto this many principal components after standardising.
    #[arg(long)]
    pub pca: Option<usize>,
    #[arg(long, value_delimiter = ',')]
    pub methods: Option<Vec<Method>>,
    /// Number of labelled subsets drawn.
    #[arg(long)]
    pub replicates: Option<usize>,
}

/// Fully resolved fit run; the `resolved` section of its manifest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FitConfig {
    pub data: Option<PathBuf>,
    #[serde(default = "default_label")]
    pub label: String,
    #[serde(default = "default_positive")]
    pub positive: String,
    #[serde(default = "default_n_l")]
    pub n_l: usize,
    #[serde(default)]
    pub n_val: Option<usize>,
    #[serde(default)]
    pub n_test: Option<usize>,
    #[serde(default)]
    pub pca: Option<usize>,
    #[serde(default = "default_methods")]
    pub methods: Vec<Method>,
    #[serde(default = "default_replicates")]
    pub replicates: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default)]
    pub fit: FitSettings,
}

fn default_label() -> String {
    "label".into()
}

fn default_positive() -> String {
    "1".into()
}

fn default_n_l() -> usize {
    20
}

fn default_methods() -> Vec<Method> {
    vec![Method::Sl, Method::UlPlus, Method::SslS, Method::SslW, Method::SelfTrain]
}

fn default_replicates() -> usize {
    1
}

impl Default for FitConfig {
    fn default() -> Self {
        Self {
            data: None,
            label: default_label(),
            positive: default_positive(),
            n_l: default_n_l(),
            n_val: None,
            n_test: None,
            pca: None,
            methods: default_methods(),
            replicates: default_replicates(),
            seed: 0,
            fit: FitSettings::default(),
        }
    }
}

#[derive(Debug, Clone, Serialize)]
struct MethodSummary {
    method: Method,
    replicates: usize,
    mean_test_error: Option<f64>,
    std_test_error: Option<f64>,
    failures: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    last_failure: Option<String>,
}

#[derive(Debug, Clone, Serialize)]
struct FitSummary {
    dataset: String,
    rows: usize,
    dim: usize,
    n_l: usize,
    n_u: usize,
    n_val: usize,
    n_test: usize,
    methods: Vec<MethodSummary>,
    compatibility: Option<Compatibility>,
    #[serde(skip_serializing_if = "Option::is_none")]
    compatibility_error: Option<String>,
}

fn resolve(args: &FitArgs, globals: &Globals) -> CliResult<FitConfig> {
    let mut cfg: FitConfig = match &globals.config {
        Some(path) => load_config(path, "fit")?,
        None => FitConfig::default(),
    };
    if let Some(v) = &args.data {
        cfg.data = Some(v.clone());
    }
    if let Some(v) = &args.label {
        cfg.label = v.clone();
    }
    if let Some(v) = &args.positive {
        cfg.positive = v.clone();
    }
    if let Some(v) = args.n_l {
        cfg.n_l = v;
    }
    if args.n_val.is_some() {
        cfg.n_val = args.n_val;
    }
    if args.n_test.is_some() {
        cfg.n_test = args.n_test;
    }
    if args.pca.is_some() {
        cfg.pca = args.pca;
    }
    if let Some(m) = &args.methods {
        cfg.methods = m.clone();
    }
    if let Some(r) = args.replicates {
        cfg.replicates = r;
    }
    if let Some(seed) = globals.seed {
        cfg.seed = seed;
    }
    if cfg.data.is_none() {
        return Err(CliError::usage("no input: pass --data or a config with `data`"));
    }
    if cfg.methods.is_empty() {
        return Err(CliError::usage("at least one method is required"));
    }
    if cfg.replicates == 0 {
        return Err(CliError::usage("--replicates must be at least 1"));
    }
    if cfg.n_l == 0 {
        return Err(CliError::usage("--n-l must be at least 1"));
    }
    cfg.fit.validate().map_err(CliError::usage)?;
    Ok(cfg)
}

/// Holdout sizes: explicit values win, otherwise 1000 each, shrunk to a
/// quarter of the rows left after the labelled subset on small tables.
fn holdout_sizes(cfg: &FitConfig, n: usize) -> (usize, usize) {
    let auto = 1000usize.min(n.saturating_sub(cfg.n_l) / 4);
    (cfg.n_val.unwrap_or(auto), cfg.n_test.unwrap_or(auto))
}

pub fn run(args: &FitArgs, globals: &Globals) -> CliResult<()> {
    let cfg = resolve(args, globals)?;
    let path = cfg.data.clone().expect("checked in resolve");
    let raw = load_csv(&path, &cfg.label, &cfg.positive)
        .map_err(|e| CliError::usage(format!("cannot load {}: {e}", path.display())))?;
    if raw.len() < 2 {
        return Err(CliError::usage(format!("{} has fewer than two rows", path.display())));
    }
    if let Some(k) = cfg.pca {
        if k == 0 || k > raw.dim() {
            return Err(CliError::usage(format!("--pca must lie in 1..={}, got {k}", raw.dim())));
        }
    }
    let (n_val, n_test) = holdout_sizes(&cfg, raw.len());
    if cfg.n_l + n_val + n_test > raw.len() {
        return Err(CliError::usage(format!(
            "n_l + n_val + n_test = {} exceeds the {} rows of {}",
            cfg.n_l + n_val + n_test,
            raw.len(),
            path.display()
        )));
    }

    let manifest = ManifestWriter::begin("fit", globals, cfg.seed, cfg.clone())?;
    let (mut table, _) = standardize(&raw).map_err(CliError::runtime)?;
    if let Some(k) = cfg.pca {
        table = pca_project(&table, k, PCA_TOL, PCA_MAX_ITER, cfg.seed).map_err(CliError::runtime)?.0;
    }
    globals.note(format!(
        "fit: {} rows, {} features, n_l = {}, n_val = {n_val}, n_test = {n_test}, {} replicate(s)",
        table.len(),
        table.dim(),
        cfg.n_l,
        cfg.replicates
    ));

    let mut stats: BTreeMap<Method, (RunningStats, usize, Option<String>)> = BTreeMap::new();
    let mut n_u = 0;
    for r in 0..cfg.replicates {
        let spec = SplitSpec {
            n_l: cfg.n_l,
            n_val,
            n_test,
            seed: derive_seed(cfg.seed, r as u64),
        };
        let parts = split(&table, &spec).map_err(CliError::runtime)?;
        n_u = parts.unlabeled.len();
        let inputs = FitInputs {
            labeled: &parts.labeled,
            unlabeled: &parts.unlabeled,
            validation: &parts.validation,
            snr: SnrSource::PlugIn,
        };
        for (method, outcome) in fit_methods(&inputs, &cfg.methods, &cfg.fit) {
            let entry = stats.entry(method).or_default();
            let error = outcome.and_then(|f| {
                parts
                    .test
                    .misclassification_rate(f.output.theta.view())
                    .map_err(|e| e.to_string())
            });
            match error {
                Ok(e) => entry.0.push(e),
                Err(msg) => {
                    entry.1 += 1;
                    entry.2 = Some(msg);
                }
            }
        }
    }

    let (compatibility, compatibility_error) = match compatibility_score(&table.to_labeled(), &cfg.fit.logistic) {
        Ok(c) => (Some(c), None),
        Err(e) => (None, Some(e.to_string())),
    };
    let methods: Vec<MethodSummary> = cfg
        .methods
        .iter()
        .map(|m| {
            let (s, failures, last_failure) = stats.get(m).cloned().unwrap_or_default();
            let have = s.count() > 0;
            MethodSummary {
                method: *m,
                replicates: s.count(),
                mean_test_error: have.then(|| s.mean()),
                std_test_error: have.then(|| s.std()),
                failures,
                last_failure,
            }
        })
        .collect();
    let summary = FitSummary {
        dataset: table.provenance.clone(),
        rows: table.len(),
        dim: table.dim(),
        n_l: cfg.n_l,
        n_u,
        n_val,
        n_test,
        methods,
        compatibility,
        compatibility_error,
    };

    write_fit_csv(&summary, globals)?;
    let json = serde_json::to_string_pretty(&summary).map_err(CliError::runtime)?;
    let json_path = globals.out.join(FIT_JSON);
    fs::write(&json_path, format!("{json}\n"))
        .map_err(|e| CliError::runtime(format!("cannot write {}: {e}", json_path.display())))?;
    manifest.finish()?;
    println!("{json}");
    Ok(())
}

fn write_fit_csv(summary: &FitSummary, globals: &Globals) -> CliResult<()> {
    let path = globals.out.join(FIT_CSV);
    let fmt = |v: Option<f64>| v.map_or_else(String::new, |x| format!("{x}"));
    let mut text = String::from("method,replicates,mean_test_error,std_test_error,failures\n");
    for m in &summary.methods {
        text.push_str(&format!(
            "{},{},{},{},{}\n",
            m.method,
            m.replicates,
            fmt(m.mean_test_error),
            fmt(m.std_test_error),
            m.failures
        ));
    }
    fs::write(&path, text).map_err(|e| CliError::runtime(format!("cannot write {}: {e}", path.display())))
}
