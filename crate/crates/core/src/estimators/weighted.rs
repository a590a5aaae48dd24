use ndarray::ArrayView1;
use serde::{Deserialize, Serialize};

use super::spectral::fix_sign;
use super::supervised::fit_sl;
use super::{fit_unsupervised, SolverParams};
use crate::error::{Error, Result};
use crate::gmm::{check_dim, norm, EstimatorOutput, LabeledDataset, Method, UnlabeledDataset};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WeightSelection {
    pub t: f64,
    /// Average margin for margin-selected weights; the combined MSE for
    /// [`oracle_weight`].
    pub criterion_value: f64,
}

/// 21 equispaced weights `{0, 0.05, ..., 1}`.
pub fn default_t_grid() -> Vec<f64> {
    (0..=20).map(|i| i as f64 / 20.0).collect()
}

/// `t θ_SL + (1 - t) θ_UL+`.
pub fn weighted(theta_sl: &EstimatorOutput, theta_ulp: &EstimatorOutput, t: f64) -> Result<EstimatorOutput> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::param("t", format!("must lie in [0, 1], got {t}")));
    }
    check_dim(theta_sl.dim(), theta_ulp.dim())?;
    let theta = &theta_sl.theta * t + &theta_ulp.theta * (1.0 - t);
    EstimatorOutput::new(theta, Method::SslW)
}

/// Mean absolute normalised margin `(1/n) Σ |⟨θ, x⟩| / ‖θ‖`.
pub fn avg_margin(theta: ArrayView1<f64>, validation: &UnlabeledDataset) -> Result<f64> {
    check_dim(validation.dim(), theta.len())?;
    if validation.is_empty() {
        return Err(Error::EmptyDataset("margin needs validation rows"));
    }
    let n = norm(theta);
    if n == 0.0 {
        return Err(Error::param("theta", "margin of the zero vector is undefined"));
    }
    let total: f64 = validation.x().dot(&theta).iter().map(|v| v.abs()).sum();
    Ok(total / (n * validation.len() as f64))
}

/// Picks the weight in `t_grid` with the largest validation margin, skipping
/// weights that give the zero vector. Ties go to the smallest `t`.
pub fn select_weight(
    theta_sl: &EstimatorOutput,
    theta_ulp: &EstimatorOutput,
    validation: &UnlabeledDataset,
    t_grid: &[f64],
) -> Result<(EstimatorOutput, WeightSelection)> {
    if t_grid.is_empty() {
        return Err(Error::param("t_grid", "must not be empty"));
    }
    if let Some(bad) = t_grid.iter().find(|t| !(0.0..=1.0).contains(*t)) {
        return Err(Error::param("t_grid", format!("{bad} is outside [0, 1]")));
    }
    let mut order: Vec<f64> = t_grid.to_vec();
    order.sort_by(f64::total_cmp);

    let mut best: Option<(EstimatorOutput, WeightSelection)> = None;
    for t in order {
        let candidate = weighted(theta_sl, theta_ulp, t)?;
        if candidate.is_zero() {
            continue;
        }
        let margin = avg_margin(candidate.theta.view(), validation)?;
        if best.as_ref().is_none_or(|(_, sel)| margin > sel.criterion_value) {
            best = Some((
                candidate,
                WeightSelection {
                    t,
                    criterion_value: margin,
                },
            ));
        }
    }
    best.ok_or(Error::AllCandidatesZero)
}

/// SSL-W with the weight chosen by average margin on an unlabelled
/// validation set.
pub fn fit_ssl_w(
    labeled: &LabeledDataset,
    unlabeled: &UnlabeledDataset,
    validation: &UnlabeledDataset,
    t_grid: &[f64],
    params: &SolverParams,
) -> Result<(EstimatorOutput, WeightSelection)> {
    let sl = fit_sl(labeled)?;
    let ul = fit_unsupervised(unlabeled, params)?;
    let ulp = fix_sign(&ul, &sl)?;
    select_weight(&sl, &ulp, validation, t_grid)
}

/// MSE-optimal weight for independent estimators, one of them unbiased:
/// `t* = mse_ul / (mse_sl + mse_ul)`. The criterion value is the combined MSE
/// `mse_sl mse_ul / (mse_sl + mse_ul)`.
pub fn oracle_weight(mse_sl: f64, mse_ul: f64) -> Result<WeightSelection> {
    for (name, v) in [("mse_sl", mse_sl), ("mse_ul", mse_ul)] {
        if !(v.is_finite() && v >= 0.0) {
            return Err(Error::param(name, format!("must be finite and >= 0, got {v}")));
        }
    }
    let total = mse_sl + mse_ul;
    if total == 0.0 {
        return Err(Error::param("mse", "both mean squared errors are zero"));
    }
    Ok(WeightSelection {
        t: mse_ul / total,
        criterion_value: mse_sl * mse_ul / total,
    })
}
