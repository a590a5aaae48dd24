use ndarray::{Array1, Array2, ArrayView1, Axis};

use super::logistic::{fit_logistic, LogisticParams};
use crate::error::{Error, Result};
use crate::gmm::{check_dim, norm, EstimatorOutput, LabeledDataset, Method, UnlabeledDataset};

/// Hard pseudolabels `sign(⟨θ, x⟩)` for rows whose normalised margin
/// `|⟨θ, x⟩| / ‖θ‖` is at least `threshold`. A zero `θ` labels nothing.
pub fn pseudolabel(theta: ArrayView1<f64>, unlabeled: &UnlabeledDataset, threshold: f64) -> Result<LabeledDataset> {
    if threshold.is_nan() || threshold < 0.0 {
        return Err(Error::param("threshold", "must be >= 0"));
    }
    check_dim(unlabeled.dim(), theta.len())?;
    let d = unlabeled.dim();
    let scale = norm(theta);
    if scale == 0.0 || unlabeled.is_empty() {
        return Ok(LabeledDataset::empty(d));
    }
    let scores = unlabeled.x().dot(&theta);
    let keep: Vec<usize> = (0..scores.len())
        .filter(|&i| scores[i].abs() / scale >= threshold)
        .collect();
    let x: Array2<f64> = unlabeled.x().select(Axis(0), &keep);
    let y: Array1<f64> = keep
        .iter()
        .map(|&i| if scores[i] < 0.0 { -1.0 } else { 1.0 })
        .collect();
    LabeledDataset::new(x, y)
}

/// Two-stage self-training: logistic regression on the labelled rows,
/// pseudolabelling of confident unlabelled rows, and a refit on the union.
pub fn self_train(
    labeled: &LabeledDataset,
    unlabeled: &UnlabeledDataset,
    threshold: f64,
    params: &LogisticParams,
) -> Result<EstimatorOutput> {
    let stage1 = fit_logistic(labeled, params)?;
    let pseudo = pseudolabel(stage1.theta.view(), unlabeled, threshold)?;
    if pseudo.is_empty() {
        return Ok(stage1.with_method(Method::SelfTrain));
    }
    let combined = labeled.concat(&pseudo)?;
    Ok(fit_logistic(&combined, params)?.with_method(Method::SelfTrain))
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    fn labeled() -> LabeledDataset {
        LabeledDataset::new(array![[1.0, 0.3], [-0.8, 0.1], [0.4, -0.2]], array![1.0, -1.0, 1.0]).unwrap()
    }

    #[test]
    fn pseudolabels_by_margin() {
        let u = UnlabeledDataset::new(array![[2.0, 5.0], [-0.5, 1.0], [-3.0, 0.0]]).unwrap();
        let p = pseudolabel(array![2.0, 0.0].view(), &u, 1.0).unwrap();
        assert_eq!(p.len(), 2);
        assert_eq!(p.y(), &array![1.0, -1.0]);
        assert_eq!(p.x().row(1), array![-3.0, 0.0]);
        assert!(pseudolabel(array![1.0, 0.0].view(), &u, -1.0).is_err());
    }

    #[test]
    fn infinite_threshold_is_plain_logistic() {
        let u = UnlabeledDataset::new(array![[5.0, 5.0], [-4.0, 1.0]]).unwrap();
        let params = LogisticParams::default();
        let plain = fit_logistic(&labeled(), &params).unwrap();
        let st = self_train(&labeled(), &u, f64::INFINITY, &params).unwrap();
        assert_eq!(st.theta, plain.theta);
        assert_eq!(st.method, Method::SelfTrain);
        let st = self_train(&labeled(), &UnlabeledDataset::empty(2), 0.0, &params).unwrap();
        assert_eq!(st.theta, plain.theta);
    }

    #[test]
    fn confident_points_move_the_fit() {
        let u = UnlabeledDataset::new(array![[5.0, 5.0], [-5.0, -5.0]]).unwrap();
        let params = LogisticParams::default();
        let plain = fit_logistic(&labeled(), &params).unwrap();
        let st = self_train(&labeled(), &u, 0.0, &params).unwrap();
        assert_ne!(st.theta, plain.theta);
    }
}
