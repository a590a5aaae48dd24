use ndarray::{Array1, ArrayView1};

use crate::error::{Error, Result};
use crate::gmm::{check_dim, norm, EstimatorOutput, Method, UnlabeledDataset};

/// One EM step for the symmetric mixture with identity covariance:
/// `θ ← (1/n) Σ tanh(⟨θ, x_i⟩) x_i`.
pub fn em_step(data: &UnlabeledDataset, theta: ArrayView1<f64>) -> Result<Array1<f64>> {
    check_dim(data.dim(), theta.len())?;
    if data.is_empty() {
        return Err(Error::EmptyDataset("EM needs at least one row"));
    }
    let weights = data.x().dot(&theta).mapv(f64::tanh);
    Ok(data.x().t().dot(&weights) / data.len() as f64)
}

/// Average log-likelihood `(1/n) Σ log[½φ(x - θ) + ½φ(x + θ)]`.
pub fn symmetric_log_likelihood(data: &UnlabeledDataset, theta: ArrayView1<f64>) -> Result<f64> {
    check_dim(data.dim(), theta.len())?;
    if data.is_empty() {
        return Err(Error::EmptyDataset("log-likelihood needs at least one row"));
    }
    let d = data.dim() as f64;
    let theta_sq = theta.dot(&theta);
    let mut total = 0.0;
    for row in data.x().rows() {
        total += log_cosh(row.dot(&theta)) - 0.5 * row.dot(&row);
    }
    let n = data.len() as f64;
    Ok(total / n - 0.5 * theta_sq - 0.5 * d * (2.0 * std::f64::consts::PI).ln())
}

fn log_cosh(a: f64) -> f64 {
    let a = a.abs();
    a + (-2.0 * a).exp().ln_1p() - std::f64::consts::LN_2
}

/// Runs [`em_step`] until successive iterates are closer than `tol`.
pub fn fit_em(
    data: &UnlabeledDataset,
    init: &Array1<f64>,
    tol: f64,
    max_iter: usize,
) -> Result<EstimatorOutput> {
    if !(tol > 0.0) {
        return Err(Error::param("tol", "must be positive"));
    }
    if init.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("EM initial point"));
    }
    let mut theta = init.clone();
    for _ in 0..max_iter {
        let next = em_step(data, theta.view())?;
        let step = norm((&next - &theta).view());
        theta = next;
        if step < tol {
            return EstimatorOutput::new(theta, Method::Em);
        }
    }
    Err(Error::NotConverged {
        solver: "EM",
        iterations: max_iter,
        last: theta.to_vec(),
    })
}
