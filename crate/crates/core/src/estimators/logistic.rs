use ndarray::{Array1, Array2, ArrayView1};
use serde::{Deserialize, Serialize};

use super::linalg::cholesky_solve;
use crate::error::{Error, Result};
use crate::gmm::{check_dim, norm, EstimatorOutput, LabeledDataset, Method};

/// Ridge logistic regression through the origin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LogisticParams {
    /// Coefficient of `‖θ‖²` in the objective.
    pub ridge: f64,
    /// Gradient-norm tolerance.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for LogisticParams {
    fn default() -> Self {
        Self {
            ridge: 0.1,
            tol: 1e-10,
            max_iter: 500,
        }
    }
}

impl LogisticParams {
    pub fn with_ridge(self, ridge: f64) -> Self {
        Self { ridge, ..self }
    }

    fn validate(&self) -> Result<()> {
        if !(self.ridge >= 0.0 && self.ridge.is_finite()) {
            return Err(Error::param("ridge", "must be finite and >= 0"));
        }
        if !(self.tol > 0.0) {
            return Err(Error::param("tol", "must be positive"));
        }
        if self.max_iter == 0 {
            return Err(Error::param("max_iter", "must be at least 1"));
        }
        Ok(())
    }
}

/// `log(1 + e^{-m})` without overflow.
fn softplus_neg(m: f64) -> f64 {
    (-m).max(0.0) + (-m.abs()).exp().ln_1p()
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

fn check(data: &LabeledDataset, theta: ArrayView1<f64>) -> Result<()> {
    check_dim(data.dim(), theta.len())?;
    if data.is_empty() {
        return Err(Error::EmptyDataset("logistic regression needs labelled rows"));
    }
    Ok(())
}

/// `(1/n) Σ log(1 + exp(-y_i ⟨θ, x_i⟩)) + ridge ‖θ‖²`.
pub fn logistic_objective(data: &LabeledDataset, theta: ArrayView1<f64>, ridge: f64) -> Result<f64> {
    check(data, theta)?;
    let margins = data.x().dot(&theta) * data.y();
    let loss = margins.iter().map(|&m| softplus_neg(m)).sum::<f64>() / data.len() as f64;
    Ok(loss + ridge * theta.dot(&theta))
}

pub fn logistic_gradient(data: &LabeledDataset, theta: ArrayView1<f64>, ridge: f64) -> Result<Array1<f64>> {
    check(data, theta)?;
    Ok(gradient(data, theta, ridge))
}

fn gradient(data: &LabeledDataset, theta: ArrayView1<f64>, ridge: f64) -> Array1<f64> {
    let margins = data.x().dot(&theta) * data.y();
    let coef: Array1<f64> = margins
        .iter()
        .zip(data.y())
        .map(|(&m, &y)| -y * sigmoid(-m))
        .collect();
    data.x().t().dot(&coef) / data.len() as f64 + &theta * (2.0 * ridge)
}

fn hessian(data: &LabeledDataset, theta: ArrayView1<f64>, ridge: f64) -> Array2<f64> {
    let z = data.x().dot(&theta);
    let w = z.mapv(|v| {
        let p = sigmoid(v);
        p * (1.0 - p)
    });
    let weighted = data.x() * &w.insert_axis(ndarray::Axis(1));
    let mut h = data.x().t().dot(&weighted) / data.len() as f64;
    h.diag_mut().mapv_inplace(|v| v + 2.0 * ridge);
    h
}

/// Minimises [`logistic_objective`] from `θ = 0` with damped Newton steps and
/// an Armijo backtracking line search, falling back to the steepest-descent
/// direction when the Hessian is numerically singular. Stops once the
/// gradient norm is at most `params.tol`.
pub fn fit_logistic(data: &LabeledDataset, params: &LogisticParams) -> Result<EstimatorOutput> {
    params.validate()?;
    let mut theta = Array1::zeros(data.dim());
    check(data, theta.view())?;
    let ridge = params.ridge;
    let mut f = logistic_objective(data, theta.view(), ridge)?;

    for _ in 0..params.max_iter {
        let g = gradient(data, theta.view(), ridge);
        let g_norm = norm(g.view());
        if g_norm <= params.tol {
            return EstimatorOutput::new(theta, Method::Logistic);
        }
        let h = hessian(data, theta.view(), ridge);
        let neg_g = g.mapv(|v| -v);
        let mut dir = match cholesky_solve(&h, neg_g.view()) {
            Some(p) if p.iter().all(|v| v.is_finite()) && p.dot(&g) < 0.0 => p,
            _ => neg_g.clone(),
        };
        let mut slope = dir.dot(&g);
        if slope >= 0.0 {
            dir = neg_g;
            slope = -g_norm * g_norm;
        }

        let mut step = 1.0;
        let mut accepted = false;
        // Near the optimum the predicted decrease drops below the resolution
        // of `f`; there a step is judged by the gradient norm instead.
        let below_resolution = -slope <= 1e-12 * (1.0 + f.abs());
        for _ in 0..60 {
            let candidate = &theta + &(&dir * step);
            let fc = logistic_objective(data, candidate.view(), ridge)?;
            let sufficient = if below_resolution {
                norm(gradient(data, candidate.view(), ridge).view()) < g_norm
            } else {
                fc <= f + 1e-4 * step * slope
            };
            if sufficient {
                theta = candidate;
                f = fc;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            // Round-off floor: no representable descent left.
            break;
        }
    }
    let g_norm = norm(gradient(data, theta.view(), ridge).view());
    if g_norm <= params.tol {
        return EstimatorOutput::new(theta, Method::Logistic);
    }
    Err(Error::NotConverged {
        solver: "logistic regression",
        iterations: params.max_iter,
        last: theta.to_vec(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn heavy_ridge_shrinks_to_zero() {
        let data = LabeledDataset::new(array![[1.0, 2.0], [-3.0, 0.5], [0.2, -1.0]], array![1.0, -1.0, 1.0])
            .unwrap();
        let out = fit_logistic(&data, &LogisticParams::default().with_ridge(1e6)).unwrap();
        assert!(norm(out.theta.view()) <= 1e-3);
        assert_eq!(out.method, Method::Logistic);
    }

    #[test]
    fn symmetric_data_stays_on_axis() {
        let data = LabeledDataset::new(array![[1.0, 0.0], [-1.0, 0.0]], array![1.0, -1.0]).unwrap();
        let out = fit_logistic(&data, &LogisticParams::default().with_ridge(0.1)).unwrap();
        assert!(out.theta[0] > 0.0);
        assert!(out.theta[1].abs() <= 1e-8);
        let g = logistic_gradient(&data, out.theta.view(), 0.1).unwrap();
        assert!(norm(g.view()) <= 1e-10);
    }

    #[test]
    fn separable_without_ridge_does_not_converge() {
        let data = LabeledDataset::new(array![[1.0], [-1.0]], array![1.0, -1.0]).unwrap();
        let params = LogisticParams {
            ridge: 0.0,
            tol: 1e-30,
            max_iter: 30,
        };
        match fit_logistic(&data, &params) {
            Err(Error::NotConverged { last, .. }) => assert!(last[0] > 1.0),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn stable_loss_for_large_margins() {
        assert_eq!(softplus_neg(1000.0), 0.0);
        assert!((softplus_neg(-1000.0) - 1000.0).abs() < 1e-12);
        assert!((softplus_neg(0.0) - std::f64::consts::LN_2).abs() < 1e-15);
        assert_eq!(sigmoid(-1000.0), 0.0);
        assert_eq!(sigmoid(1000.0), 1.0);
    }

    #[test]
    fn rejects_bad_parameters() {
        let data = LabeledDataset::new(array![[1.0]], array![1.0]).unwrap();
        let bad = LogisticParams {
            ridge: -1.0,
            ..Default::default()
        };
        assert!(fit_logistic(&data, &bad).is_err());
        assert!(fit_logistic(&LabeledDataset::empty(1), &LogisticParams::default()).is_err());
    }
}
