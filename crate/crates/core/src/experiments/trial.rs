use ndarray::Array1;
use serde::{Deserialize, Serialize};

use super::config::{SnrMode, TrialConfig};
use super::fitting::{fit_methods, FitInputs};
use crate::error::Result;
use crate::estimators::{SnrSource, SwitchBranch};
use crate::gmm::{
    estimation_error, excess_risk, sample_labeled, sample_unlabeled, EstimatorOutput, Method,
};
use crate::rng::derive_seed;

/// Sub-stream indices under a trial seed.
const LABELED_STREAM: u64 = 1;
const UNLABELED_STREAM: u64 = 2;
const VALIDATION_STREAM: u64 = 3;
const TEST_STREAM: u64 = 4;
const SOLVER_STREAM: u64 = 5;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodMetrics {
    pub excess: f64,
    pub estimation: f64,
    /// Empirical error on the test sample; `None` when `n_test = 0`.
    pub test_error: Option<f64>,
    /// UL+ only: whether the sign fix pointed away from `θ*`.
    pub wrong_sign: Option<bool>,
    pub branch: Option<SwitchBranch>,
    pub t: Option<f64>,
    pub threshold: Option<f64>,
    pub ridge: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodRecord {
    pub method: Method,
    pub outcome: std::result::Result<MethodMetrics, String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialResult {
    pub trial_index: u64,
    pub seed: u64,
    pub records: Vec<MethodRecord>,
}

impl TrialResult {
    pub fn metrics(&self, method: Method) -> Option<&MethodMetrics> {
        self.records
            .iter()
            .find(|r| r.method == method)
            .and_then(|r| r.outcome.as_ref().ok())
    }
}

/// Seed of trial `trial_index`, independent of grid cell and scheduling.
pub fn trial_seed(base_seed: u64, trial_index: u64) -> u64 {
    derive_seed(base_seed, trial_index)
}

/// Samples the four datasets of one trial and evaluates every configured
/// method against the true `θ*`.
///
/// Methods identified only up to sign (UL, EM) are scored with whichever of
/// `±θ̂` is closer to `θ*`.
pub fn run_trial(cfg: &TrialConfig, trial_index: u64) -> Result<TrialResult> {
    cfg.validate()?;
    let seed = trial_seed(cfg.base_seed, trial_index);
    let model = &cfg.model;
    let labeled = sample_labeled(model, cfg.n_l, derive_seed(seed, LABELED_STREAM));
    let unlabeled = sample_unlabeled(model, cfg.n_u, derive_seed(seed, UNLABELED_STREAM));
    let validation = sample_unlabeled(model, cfg.n_val, derive_seed(seed, VALIDATION_STREAM));
    let test = sample_labeled(model, cfg.n_test, derive_seed(seed, TEST_STREAM));

    let mut settings = cfg.fit.clone();
    settings.solver.eig_seed = derive_seed(seed, SOLVER_STREAM);
    let snr = match settings.ssl_s_snr {
        SnrMode::Oracle => SnrSource::Oracle(model.snr()),
        SnrMode::PlugIn => SnrSource::PlugIn,
    };
    let inputs = FitInputs {
        labeled: &labeled,
        unlabeled: &unlabeled,
        validation: &validation,
        snr,
    };

    let theta_star = model.theta_star();
    let records = fit_methods(&inputs, &cfg.methods, &settings)
        .into_iter()
        .map(|(method, fitted)| {
            let outcome = fitted.and_then(|f| {
                let scored = oriented(&f.output, theta_star);
                let metrics = MethodMetrics {
                    excess: excess_risk(scored.view(), theta_star.view()).map_err(|e| e.to_string())?,
                    estimation: estimation_error(scored.view(), theta_star.view()).map_err(|e| e.to_string())?,
                    test_error: if test.is_empty() {
                        None
                    } else {
                        Some(test.misclassification_rate(scored.view()).map_err(|e| e.to_string())?)
                    },
                    wrong_sign: (method == Method::UlPlus).then(|| f.output.theta.dot(theta_star) < 0.0),
                    branch: f.branch,
                    t: f.t,
                    threshold: f.threshold,
                    ridge: f.ridge,
                };
                Ok(metrics)
            });
            MethodRecord { method, outcome }
        })
        .collect();

    Ok(TrialResult {
        trial_index,
        seed,
        records,
    })
}

fn oriented(output: &EstimatorOutput, theta_star: &Array1<f64>) -> Array1<f64> {
    if output.method.is_sign_ambiguous() && output.theta.dot(theta_star) < 0.0 {
        output.theta.mapv(|v| -v)
    } else {
        output.theta.clone()
    }
}
