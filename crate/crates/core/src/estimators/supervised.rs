use ndarray::Array1;

use crate::error::{Error, Result};
use crate::gmm::{EstimatorOutput, LabeledDataset, Method};

/// Mean estimator `θ_SL = (1/n_l) Σ y_i x_i`.
pub fn fit_sl(data: &LabeledDataset) -> Result<EstimatorOutput> {
    if data.is_empty() {
        return Err(Error::EmptyDataset("supervised estimator needs at least one labelled row"));
    }
    let theta = data.x().t().dot(data.y()) / data.len() as f64;
    EstimatorOutput::new(theta, Method::Sl)
}

/// Spherical LDA for the symmetric family: `(μ̂₊ - μ̂₋) / 2`.
pub fn fit_spherical_lda(data: &LabeledDataset) -> Result<EstimatorOutput> {
    let d = data.dim();
    let mut sum_pos = Array1::<f64>::zeros(d);
    let mut sum_neg = Array1::<f64>::zeros(d);
    let (mut n_pos, mut n_neg) = (0usize, 0usize);
    for (row, &y) in data.x().rows().into_iter().zip(data.y().iter()) {
        if y > 0.0 {
            sum_pos += &row;
            n_pos += 1;
        } else {
            sum_neg += &row;
            n_neg += 1;
        }
    }
    if n_pos == 0 || n_neg == 0 {
        return Err(Error::SingleClass);
    }
    let theta = (sum_pos / n_pos as f64 - sum_neg / n_neg as f64) / 2.0;
    EstimatorOutput::new(theta, Method::SphericalLda)
}
