use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::sweep::{SweepResult, SweepRow};
use crate::error::{Error, Result};
use crate::estimators::{fit_logistic, fit_spherical_lda, LogisticParams};
use crate::gmm::{LabeledDataset, Method};
use crate::theory::oracle_gap;

/// Which per-cell mean a comparison reads.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    #[default]
    Excess,
    Estimation,
    TestError,
}

impl Metric {
    pub fn of(self, row: &SweepRow) -> f64 {
        match self {
            Metric::Excess => row.mean_excess,
            Metric::Estimation => row.mean_estimation,
            Metric::TestError => row.mean_test_error,
        }
    }

    pub fn spread(self, row: &SweepRow) -> f64 {
        match self {
            Metric::Excess => row.std_excess,
            Metric::Estimation => row.std_estimation,
            Metric::TestError => row.std_test_error,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Metric::Excess => "excess",
            Metric::Estimation => "estimation",
            Metric::TestError => "test_error",
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "excess" => Ok(Metric::Excess),
            "estimation" => Ok(Metric::Estimation),
            "test_error" | "test" => Ok(Metric::TestError),
            _ => Err(Error::param("metric", format!("unknown metric `{s}`"))),
        }
    }
}

/// `(axis value, mean_a - mean_b)` per grid cell; positive where `b` is better.
pub fn error_gap(sweep: &SweepResult, a: Method, b: Method, metric: Metric) -> Result<Vec<(f64, f64)>> {
    best_of_gap(sweep, &[a], b, metric)
}

/// Like [`error_gap`] with the baseline taken as the per-cell best of
/// `baseline`.
pub fn best_of_gap(sweep: &SweepResult, baseline: &[Method], b: Method, metric: Metric) -> Result<Vec<(f64, f64)>> {
    if baseline.is_empty() {
        return Err(Error::param("baseline", "at least one method is required"));
    }
    for &m in baseline.iter().chain([&b]) {
        sweep.series(m)?;
    }
    sweep
        .values()
        .into_iter()
        .map(|v| {
            let best = baseline
                .iter()
                .map(|&m| cell(sweep, v, m, metric))
                .collect::<Result<Vec<_>>>()?
                .into_iter()
                .fold(f64::INFINITY, f64::min);
            Ok((v, best - cell(sweep, v, b, metric)?))
        })
        .collect()
}

fn cell(sweep: &SweepResult, value: f64, method: Method, metric: Metric) -> Result<f64> {
    sweep
        .row(value, method)
        .map(|r| metric.of(r))
        .ok_or(Error::MissingMethod(method))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SwitchPoint {
    pub value: f64,
    /// `false` when one of SL and UL+ is better on the whole grid; `value` is
    /// then the grid end where the two are closest.
    pub crossed: bool,
}

/// Grid cell at which the better of SL and UL+ changes identity.
///
/// Of the two cells straddling the first change, the one where the two
/// errors are closer is returned; ties go to the smaller grid value.
pub fn switching_point_oracle(sweep: &SweepResult, metric: Metric) -> Result<SwitchPoint> {
    let sl = sweep.series(Method::Sl)?;
    let ulp = sweep.series(Method::UlPlus)?;
    let values = sweep.values();
    let diffs: Vec<f64> = values
        .iter()
        .map(|&v| Ok(cell(sweep, v, Method::Sl, metric)? - cell(sweep, v, Method::UlPlus, metric)?))
        .collect::<Result<_>>()?;
    debug_assert!(sl.len() == ulp.len());
    let sl_wins = |d: f64| d <= 0.0;
    let first = sl_wins(diffs[0]);
    let pick = |i: usize, j: usize| if diffs[j].abs() < diffs[i].abs() { j } else { i };
    match diffs.iter().position(|&d| sl_wins(d) != first) {
        Some(j) => Ok(SwitchPoint {
            value: values[pick(j - 1, j)],
            crossed: true,
        }),
        None => Ok(SwitchPoint {
            value: values[pick(0, values.len() - 1)],
            crossed: false,
        }),
    }
}

/// Least-squares slope of `ln y` against `ln x`.
pub fn log_log_slope(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::DimensionMismatch {
            expected: x.len(),
            got: y.len(),
        });
    }
    if x.len() < 3 {
        return Err(Error::param("series", "a scaling fit needs at least 3 points"));
    }
    if x.iter().chain(y).any(|&v| !(v > 0.0 && v.is_finite())) {
        return Err(Error::param("series", "all values must be positive and finite"));
    }
    let lx: Vec<f64> = x.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = y.iter().map(|v| v.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxy: f64 = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = lx.iter().map(|a| (a - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::param("series", "axis values must not all be equal"));
    }
    Ok(sxy / sxx)
}

/// Log-log slope of a method's mean error across the sweep axis.
pub fn scaling_fit(sweep: &SweepResult, method: Method, metric: Metric) -> Result<f64> {
    let rows = sweep.series(method)?;
    let x: Vec<f64> = rows.iter().map(|r| r.axis_value).collect();
    let y: Vec<f64> = rows.iter().map(|r| metric.of(r)).collect();
    log_log_slope(&x, &y)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleGapPoint {
    pub axis_value: f64,
    pub mse_sl: f64,
    pub mse_ulplus: f64,
    pub t_star: f64,
    pub combined: f64,
    pub gap: f64,
}

/// Oracle-weighting gain per cell from the measured SL and UL+ mean squared
/// estimation errors.
pub fn oracle_gap_series(sweep: &SweepResult) -> Result<Vec<OracleGapPoint>> {
    let mse = |v: f64, m: Method| -> Result<f64> {
        sweep
            .row(v, m)
            .and_then(|r| r.extra.get("mse").copied())
            .ok_or(Error::MissingMethod(m))
    };
    sweep
        .values()
        .into_iter()
        .map(|v| {
            let (x, y) = (mse(v, Method::Sl)?, mse(v, Method::UlPlus)?);
            let (gap, combined) = oracle_gap(x, y)?;
            Ok(OracleGapPoint {
                axis_value: v,
                mse_sl: x,
                mse_ulplus: y,
                t_star: y / (x + y),
                combined,
                gap,
            })
        })
        .collect()
}

/// Training error at or below which a dataset counts as nearly separable.
pub const SEPARABLE_ERROR: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Compatibility {
    pub rho: f64,
    pub inverse: f64,
    pub err_bayes: f64,
    pub err_ul: f64,
    /// Whether the nearly-separable rule `ρ = err_bayes` applied.
    pub separable_fallback: bool,
}

/// `ρ = (m + err_B) / (2√d)` with `m = (err_UL - err_B) / err_B`, or
/// `ρ = err_B` when `err_B ≤ 0.01`.
pub fn compatibility_from_errors(err_bayes: f64, err_ul: f64, d: usize) -> Result<Compatibility> {
    for (name, v) in [("err_bayes", err_bayes), ("err_ul", err_ul)] {
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::param(name, format!("must lie in [0, 1], got {v}")));
        }
    }
    if d == 0 {
        return Err(Error::param("d", "must be at least 1"));
    }
    let separable_fallback = err_bayes <= SEPARABLE_ERROR;
    let rho = if separable_fallback {
        err_bayes
    } else {
        let m = (err_ul - err_bayes) / err_bayes;
        (m + err_bayes) / (2.0 * (d as f64).sqrt())
    };
    if !(rho > 0.0) {
        return Err(Error::Validity(format!(
            "compatibility {rho} has no inverse (err_bayes = {err_bayes}, err_ul = {err_ul})"
        )));
    }
    Ok(Compatibility {
        rho,
        inverse: 1.0 / rho,
        err_bayes,
        err_ul,
        separable_fallback,
    })
}

/// Compatibility of a labelled dataset: the linear Bayes proxy is ridge
/// logistic regression on all rows, the UL proxy is spherical LDA; both are
/// scored by training error.
pub fn compatibility_score(data: &LabeledDataset, params: &LogisticParams) -> Result<Compatibility> {
    let bayes = fit_logistic(data, params)?;
    let ul = fit_spherical_lda(data)?;
    let err_bayes = data.misclassification_rate(bayes.theta.view())?;
    let err_ul = data.misclassification_rate(ul.theta.view())?;
    compatibility_from_errors(err_bayes, err_ul, data.dim())
}
