use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimators::{default_t_grid, LogisticParams, SolverParams};
use crate::gmm::{Method, MixtureModel};

/// SNR fed to SSL-S in simulations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SnrMode {
    /// The true `‖θ*‖` of the simulated model.
    #[default]
    Oracle,
    /// `√((λ̂ - 1)_+)` from the unlabelled sample.
    PlugIn,
}

/// Seven log-spaced ridge strengths from `1e-4` to `10`.
pub fn default_ridge_grid() -> Vec<f64> {
    (0..7).map(|k| 10f64.powf(-4.0 + 5.0 * k as f64 / 6.0)).collect()
}

/// Quantile levels `k/7`, `k = 0..6`, of the stage-one margins.
pub fn default_self_train_quantiles() -> Vec<f64> {
    (0..7).map(|k| k as f64 / 7.0).collect()
}

/// Hyperparameter grids and solver settings shared by every fit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FitSettings {
    pub t_grid: Vec<f64>,
    pub ridge_grid: Vec<f64>,
    /// Quantile levels in `[0, 1]` turned into pseudolabel margin thresholds.
    pub self_train_quantiles: Vec<f64>,
    pub ssl_s_snr: SnrMode,
    pub solver: SolverParams,
    /// Tolerance and iteration cap for every logistic fit. Its `ridge` is
    /// replaced by the values in `ridge_grid`.
    pub logistic: LogisticParams,
}

impl Default for FitSettings {
    fn default() -> Self {
        Self {
            t_grid: default_t_grid(),
            ridge_grid: default_ridge_grid(),
            self_train_quantiles: default_self_train_quantiles(),
            ssl_s_snr: SnrMode::Oracle,
            solver: SolverParams::default(),
            logistic: LogisticParams::default(),
        }
    }
}

impl FitSettings {
    pub fn validate(&self) -> Result<()> {
        check_grid("t_grid", &self.t_grid, |t| (0.0..=1.0).contains(&t))?;
        check_grid("ridge_grid", &self.ridge_grid, |r| r.is_finite() && r >= 0.0)?;
        check_grid("self_train_quantiles", &self.self_train_quantiles, |q| {
            (0.0..=1.0).contains(&q)
        })?;
        Ok(())
    }
}

fn check_grid(name: &'static str, grid: &[f64], ok: impl Fn(f64) -> bool) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::param(name, "must not be empty"));
    }
    if let Some(bad) = grid.iter().find(|&&v| !ok(v)) {
        return Err(Error::param(name, format!("value {bad} is out of range")));
    }
    Ok(())
}

fn default_holdout() -> usize {
    1000
}

/// Everything one simulated trial needs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrialConfig {
    pub model: MixtureModel,
    pub n_l: usize,
    pub n_u: usize,
    #[serde(default = "default_holdout")]
    pub n_val: usize,
    #[serde(default = "default_holdout")]
    pub n_test: usize,
    pub methods: Vec<Method>,
    #[serde(default)]
    pub base_seed: u64,
    #[serde(default)]
    pub fit: FitSettings,
}

impl TrialConfig {
    pub fn new(model: MixtureModel, n_l: usize, n_u: usize, methods: Vec<Method>) -> Self {
        Self {
            model,
            n_l,
            n_u,
            n_val: default_holdout(),
            n_test: default_holdout(),
            methods,
            base_seed: 0,
            fit: FitSettings::default(),
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.base_seed = seed;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if self.methods.is_empty() {
            return Err(Error::param("methods", "at least one method is required"));
        }
        self.fit.validate()
    }
}

/// The quantity varied across a sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SweepAxis {
    #[serde(rename = "snr")]
    Snr,
    /// `n_u / n_l` at fixed `n_u`; `n_l = round(n_u / ratio)`, at least 1.
    #[serde(rename = "nu_over_nl")]
    Ratio,
    #[serde(rename = "n_l")]
    NLabeled,
    #[serde(rename = "n_u")]
    NUnlabeled,
}

impl SweepAxis {
    pub const ALL: [SweepAxis; 4] = [SweepAxis::Snr, SweepAxis::Ratio, SweepAxis::NLabeled, SweepAxis::NUnlabeled];

    pub fn as_str(self) -> &'static str {
        match self {
            SweepAxis::Snr => "snr",
            SweepAxis::Ratio => "nu_over_nl",
            SweepAxis::NLabeled => "n_l",
            SweepAxis::NUnlabeled => "n_u",
        }
    }

    /// The configuration of the grid cell at `value`.
    pub fn apply(self, base: &TrialConfig, value: f64) -> Result<TrialConfig> {
        let mut cfg = base.clone();
        match self {
            SweepAxis::Snr => cfg.model = base.model.with_snr(value)?,
            SweepAxis::Ratio => {
                if !(value.is_finite() && value > 0.0) {
                    return Err(Error::param("grid", format!("ratio {value} must be positive")));
                }
                cfg.n_l = ((base.n_u as f64 / value).round() as usize).max(1);
            }
            SweepAxis::NLabeled => cfg.n_l = count(value)?,
            SweepAxis::NUnlabeled => cfg.n_u = count(value)?,
        }
        Ok(cfg)
    }
}

fn count(value: f64) -> Result<usize> {
    if value.is_finite() && value >= 0.0 && value.fract() == 0.0 {
        Ok(value as usize)
    } else {
        Err(Error::param("grid", format!("{value} is not a sample count")))
    }
}

impl fmt::Display for SweepAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SweepAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase().replace('-', "_");
        match key.as_str() {
            "snr" | "s" => Ok(SweepAxis::Snr),
            "nu_over_nl" | "ratio" => Ok(SweepAxis::Ratio),
            "n_l" | "nl" => Ok(SweepAxis::NLabeled),
            "n_u" | "nu" => Ok(SweepAxis::NUnlabeled),
            _ => Err(Error::param("axis", format!("unknown sweep axis `{s}`"))),
        }
    }
}

/// A grid of trial configurations with a replicate count.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub trial: TrialConfig,
    pub axis: SweepAxis,
    pub grid: Vec<f64>,
    pub replicates: usize,
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        self.trial.validate()?;
        if self.grid.is_empty() {
            return Err(Error::param("grid", "must not be empty"));
        }
        if self.replicates == 0 {
            return Err(Error::param("replicates", "must be at least 1"));
        }
        for &v in &self.grid {
            self.axis.apply(&self.trial, v)?;
        }
        Ok(())
    }
}
