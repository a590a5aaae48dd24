use ndarray::{Array1, Array2, Axis};
use serde::{Deserialize, Serialize};

use super::tabular::TabularDataset;
use crate::error::{Error, Result};
use crate::estimators::leading_eigenpair_excluding;

/// Per-column affine map `x ↦ (x - mean) / std` learned by [`standardize`].
/// Constant columns keep `std = 1`, so they are only centred.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StandardizeRecord {
    pub mean: Vec<f64>,
    pub std: Vec<f64>,
    pub constant: Vec<bool>,
}

impl StandardizeRecord {
    pub fn apply(&self, x: &Array2<f64>) -> Result<Array2<f64>> {
        self.check(x)?;
        let mean = Array1::from(self.mean.clone());
        let std = Array1::from(self.std.clone());
        Ok((x - &mean) / &std)
    }

    pub fn invert(&self, z: &Array2<f64>) -> Result<Array2<f64>> {
        self.check(z)?;
        let mean = Array1::from(self.mean.clone());
        let std = Array1::from(self.std.clone());
        Ok(z * &std + &mean)
    }

    fn check(&self, x: &Array2<f64>) -> Result<()> {
        if x.ncols() != self.mean.len() {
            return Err(Error::DimensionMismatch {
                expected: self.mean.len(),
                got: x.ncols(),
            });
        }
        Ok(())
    }
}

/// Centres every column and scales it to unit population standard deviation.
pub fn standardize(data: &TabularDataset) -> Result<(TabularDataset, StandardizeRecord)> {
    if data.len() < 2 {
        return Err(Error::param("data", "standardisation needs at least two rows"));
    }
    let mean = data.x.mean_axis(Axis(0)).expect("non-empty");
    let centred = &data.x - &mean;
    let var = centred.mapv(|v| v * v).mean_axis(Axis(0)).expect("non-empty");
    let mut std = Vec::with_capacity(mean.len());
    let mut constant = Vec::with_capacity(mean.len());
    for (&m, &v) in mean.iter().zip(var.iter()) {
        let sd = v.sqrt();
        let flat = sd <= 1e-12 * m.abs().max(1.0);
        constant.push(flat);
        std.push(if flat { 1.0 } else { sd });
    }
    let record = StandardizeRecord {
        mean: mean.to_vec(),
        std,
        constant,
    };
    let x = record.apply(&data.x)?;
    let out = data.with_features(x, data.feature_names.clone(), "standardized");
    Ok((out, record))
}

/// Principal axes of the centred data, in decreasing order of variance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PcaModel {
    pub mean: Vec<f64>,
    /// Orthonormal rows.
    pub components: Vec<Vec<f64>>,
    pub variances: Vec<f64>,
}

impl PcaModel {
    /// Scores `(x - mean) Vᵀ`.
    pub fn transform(&self, x: &Array2<f64>) -> Result<Array2<f64>> {
        if x.ncols() != self.mean.len() {
            return Err(Error::DimensionMismatch {
                expected: self.mean.len(),
                got: x.ncols(),
            });
        }
        let mean = Array1::from(self.mean.clone());
        let k = self.components.len();
        let v = Array2::from_shape_vec((k, self.mean.len()), self.components.concat()).expect("rectangular");
        Ok((x - &mean).dot(&v.t()))
    }
}

/// Projects onto the top `k` principal components of the centred covariance.
///
/// Unlike the estimators' second moment, the data are centred first: real
/// tables need not be symmetric about the origin. Components are found one at
/// a time by power iteration restricted to the complement of those already
/// found.
pub fn pca_project(
    data: &TabularDataset,
    k: usize,
    tol: f64,
    max_iter: usize,
    seed: u64,
) -> Result<(TabularDataset, PcaModel)> {
    let d = data.dim();
    if k == 0 || k > d {
        return Err(Error::param("k", format!("must lie in 1..={d}, got {k}")));
    }
    if data.is_empty() {
        return Err(Error::EmptyDataset("PCA needs rows"));
    }
    let mean = data.x.mean_axis(Axis(0)).expect("non-empty");
    let centred = &data.x - &mean;
    let mut cov = centred.t().dot(&centred) / data.len() as f64;
    let sym = (&cov + &cov.t()) * 0.5;
    cov = sym;

    let mut basis: Vec<Array1<f64>> = Vec::with_capacity(k);
    let mut variances = Vec::with_capacity(k);
    for i in 0..k {
        let pair = leading_eigenpair_excluding(&cov, &basis, tol, max_iter, crate::rng::derive_seed(seed, i as u64))?;
        let mut v = pair.v;
        // Re-orthogonalise against round-off drift.
        for b in &basis {
            let c = b.dot(&v);
            v.scaled_add(-c, b);
        }
        let n = v.dot(&v).sqrt();
        v /= n;
        variances.push(pair.lambda.max(0.0));
        basis.push(v);
    }
    let model = PcaModel {
        mean: mean.to_vec(),
        components: basis.iter().map(|b| b.to_vec()).collect(),
        variances,
    };
    let scores = model.transform(&data.x)?;
    let names = (1..=k).map(|i| format!("pc{i}")).collect();
    Ok((data.with_features(scores, names, &format!("pca k={k}")), model))
}
