use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::SweepConfig;
use super::trial::{run_trial, TrialResult};
use crate::error::{Error, Result};
use crate::estimators::SwitchBranch;
use crate::gmm::Method;

/// Welford accumulator for mean and sample standard deviation.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RunningStats {
    n: usize,
    mean: f64,
    m2: f64,
}

impl RunningStats {
    pub fn push(&mut self, x: f64) {
        self.n += 1;
        let delta = x - self.mean;
        self.mean += delta / self.n as f64;
        self.m2 += delta * (x - self.mean);
    }

    pub fn count(&self) -> usize {
        self.n
    }

    /// `NaN` when empty.
    pub fn mean(&self) -> f64 {
        if self.n == 0 {
            f64::NAN
        } else {
            self.mean
        }
    }

    /// Sample standard deviation (`n - 1` denominator); 0 for one value.
    pub fn std(&self) -> f64 {
        match self.n {
            0 => f64::NAN,
            1 => 0.0,
            n => (self.m2 / (n - 1) as f64).max(0.0).sqrt(),
        }
    }
}

impl FromIterator<f64> for RunningStats {
    fn from_iter<I: IntoIterator<Item = f64>>(iter: I) -> Self {
        let mut s = RunningStats::default();
        for x in iter {
            s.push(x);
        }
        s
    }
}

/// Summary of one method at one grid value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub axis_value: f64,
    pub method: Method,
    /// Number of replicates that produced an estimate.
    pub replicates: usize,
    pub mean_excess: f64,
    pub std_excess: f64,
    pub mean_estimation: f64,
    pub std_estimation: f64,
    pub mean_test_error: f64,
    pub std_test_error: f64,
    /// Method-specific statistics, e.g. `mse`, `wrong_sign_rate`, `mean_t`,
    /// `branch_sl`, `failures`.
    pub extra: BTreeMap<String, f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub axis: String,
    pub rows: Vec<SweepRow>,
}

impl SweepResult {
    pub fn empty(axis: impl Into<String>) -> Self {
        Self {
            axis: axis.into(),
            rows: Vec::new(),
        }
    }

    /// Grid values in increasing order, deduplicated.
    pub fn values(&self) -> Vec<f64> {
        let mut v: Vec<f64> = self.rows.iter().map(|r| r.axis_value).collect();
        v.sort_by(f64::total_cmp);
        v.dedup();
        v
    }

    /// Methods in order of first appearance.
    pub fn methods(&self) -> Vec<Method> {
        let mut out = Vec::new();
        for r in &self.rows {
            if !out.contains(&r.method) {
                out.push(r.method);
            }
        }
        out
    }

    pub fn row(&self, axis_value: f64, method: Method) -> Option<&SweepRow> {
        self.rows
            .iter()
            .find(|r| r.method == method && r.axis_value == axis_value)
    }

    /// Rows of `method` sorted by axis value.
    pub fn series(&self, method: Method) -> Result<Vec<&SweepRow>> {
        let mut rows: Vec<&SweepRow> = self.rows.iter().filter(|r| r.method == method).collect();
        if rows.is_empty() {
            return Err(Error::MissingMethod(method));
        }
        rows.sort_by(|a, b| a.axis_value.total_cmp(&b.axis_value));
        Ok(rows)
    }
}

/// Runs the sweep on the global rayon pool.
pub fn run_sweep(spec: &SweepConfig) -> Result<SweepResult> {
    spec.validate()?;
    let configs = spec
        .grid
        .iter()
        .map(|&v| spec.axis.apply(&spec.trial, v))
        .collect::<Result<Vec<_>>>()?;
    let reps = spec.replicates;
    let jobs: Vec<(usize, u64)> = (0..configs.len())
        .flat_map(|cell| (0..reps as u64).map(move |rep| (cell, rep)))
        .collect();
    // Collecting an indexed parallel iterator preserves job order, so the
    // aggregation below sees trials in the same order for any pool size.
    let trials: Vec<TrialResult> = jobs
        .par_iter()
        .map(|&(cell, rep)| run_trial(&configs[cell], rep))
        .collect::<Result<Vec<_>>>()?;

    let mut rows = Vec::new();
    for (cell, chunk) in trials.chunks(reps).enumerate() {
        for &method in &spec.trial.methods {
            rows.push(summarise(spec.grid[cell], method, chunk));
        }
    }
    Ok(SweepResult {
        axis: spec.axis.as_str().to_string(),
        rows,
    })
}

/// Runs the sweep on a dedicated pool of `threads` workers (`None` uses the
/// available parallelism). The result does not depend on the worker count.
pub fn run_sweep_with_threads(spec: &SweepConfig, threads: Option<usize>) -> Result<SweepResult> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        if n == 0 {
            return Err(Error::param("threads", "must be at least 1"));
        }
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| Error::param("threads", e.to_string()))?;
    pool.install(|| run_sweep(spec))
}

fn summarise(axis_value: f64, method: Method, trials: &[TrialResult]) -> SweepRow {
    let metrics: Vec<_> = trials.iter().filter_map(|t| t.metrics(method)).collect();
    let excess: RunningStats = metrics.iter().map(|m| m.excess).collect();
    let estimation: RunningStats = metrics.iter().map(|m| m.estimation).collect();
    let test: RunningStats = metrics.iter().filter_map(|m| m.test_error).collect();
    let mse: RunningStats = metrics.iter().map(|m| m.estimation * m.estimation).collect();

    let mut extra = BTreeMap::new();
    if !metrics.is_empty() {
        extra.insert("mse".to_string(), mse.mean());
    }
    let failures = trials.len() - metrics.len();
    if failures > 0 {
        extra.insert("failures".to_string(), failures as f64);
    }
    let mut mean_of = |key: &str, values: Vec<f64>| {
        if !values.is_empty() {
            extra.insert(key.to_string(), values.into_iter().collect::<RunningStats>().mean());
        }
    };
    mean_of(
        "wrong_sign_rate",
        metrics.iter().filter_map(|m| m.wrong_sign.map(f64::from)).collect(),
    );
    mean_of("mean_t", metrics.iter().filter_map(|m| m.t).collect());
    mean_of("mean_threshold", metrics.iter().filter_map(|m| m.threshold).collect());
    mean_of("mean_ridge", metrics.iter().filter_map(|m| m.ridge).collect());
    for branch in [SwitchBranch::Zero, SwitchBranch::Supervised, SwitchBranch::UnsupervisedPlus] {
        let hits: Vec<f64> = metrics
            .iter()
            .filter_map(|m| m.branch.map(|b| f64::from(b == branch)))
            .collect();
        mean_of(&format!("branch_{}", branch.as_str()), hits);
    }

    SweepRow {
        axis_value,
        method,
        replicates: metrics.len(),
        mean_excess: excess.mean(),
        std_excess: excess.std(),
        mean_estimation: estimation.mean(),
        std_estimation: estimation.std(),
        mean_test_error: test.mean(),
        std_test_error: test.std(),
        extra,
    }
}
