use serde::{Deserialize, Serialize};

use super::spectral::{fix_sign, plug_in_snr};
use super::supervised::fit_sl;
use super::{fit_unsupervised, SolverParams};
use crate::error::{Error, Result};
use crate::gmm::{EstimatorOutput, LabeledDataset, Method, UnlabeledDataset};

/// Where SSL-S gets the SNR it switches on.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SnrSource {
    /// The true `s = ‖θ*‖`, supplied by the caller.
    Oracle(f64),
    /// `ŝ = √((λ̂ - 1)_+)` estimated from the unlabelled data.
    PlugIn,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SwitchBranch {
    Zero,
    Supervised,
    UnsupervisedPlus,
}

impl SwitchBranch {
    pub fn as_str(self) -> &'static str {
        match self {
            SwitchBranch::Zero => "zero",
            SwitchBranch::Supervised => "sl",
            SwitchBranch::UnsupervisedPlus => "ulplus",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SwitchOutcome {
    pub output: EstimatorOutput,
    pub branch: SwitchBranch,
    pub snr_used: f64,
}

/// The three-way switch:
///
/// 1. `s ≤ min{√(d/n_l), (d/n_u)^(1/4)}` → zero vector;
/// 2. otherwise `s ≤ √(n_l/n_u)` → supervised;
/// 3. otherwise → UL+.
///
/// An empty side contributes an infinite threshold.
pub fn switch_branch(s: f64, d: usize, n_l: usize, n_u: usize) -> SwitchBranch {
    let d = d as f64;
    let (n_l, n_u) = (n_l as f64, n_u as f64);
    let low = (d / n_l).sqrt().min((d / n_u).powf(0.25));
    if s <= low {
        SwitchBranch::Zero
    } else if s <= (n_l / n_u).sqrt() {
        SwitchBranch::Supervised
    } else {
        SwitchBranch::UnsupervisedPlus
    }
}

/// SSL-S. Only the estimators on the branch taken are fitted, so their errors
/// surface only there; with `n_u = 0` the UL side is never needed.
pub fn fit_ssl_s(
    labeled: &LabeledDataset,
    unlabeled: &UnlabeledDataset,
    snr: SnrSource,
    params: &SolverParams,
) -> Result<SwitchOutcome> {
    if labeled.is_empty() {
        return Err(Error::EmptyDataset("SSL-S needs labelled data"));
    }
    if labeled.dim() != unlabeled.dim() {
        return Err(Error::DimensionMismatch {
            expected: labeled.dim(),
            got: unlabeled.dim(),
        });
    }
    let s = match snr {
        SnrSource::Oracle(s) if s.is_finite() && s >= 0.0 => s,
        SnrSource::Oracle(s) => return Err(Error::param("s", format!("must be finite and >= 0, got {s}"))),
        SnrSource::PlugIn => plug_in_snr(unlabeled, params.eig_tol, params.eig_max_iter, params.eig_seed)?,
    };
    let d = labeled.dim();
    let branch = switch_branch(s, d, labeled.len(), unlabeled.len());
    let output = match branch {
        SwitchBranch::Zero => EstimatorOutput::zero(d, Method::SslS),
        SwitchBranch::Supervised => fit_sl(labeled)?.with_method(Method::SslS),
        SwitchBranch::UnsupervisedPlus => {
            let sl = fit_sl(labeled)?;
            let ul = fit_unsupervised(unlabeled, params)?;
            fix_sign(&ul, &sl)?.with_method(Method::SslS)
        }
    };
    Ok(SwitchOutcome {
        output,
        branch,
        snr_used: s,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gmm::{sample_labeled, sample_unlabeled, MixtureModel};

    #[test]
    fn threshold_arithmetic() {
        // min{0.2, 0.1414} = 0.1414
        assert_eq!(switch_branch(0.05, 4, 100, 10_000), SwitchBranch::Zero);
        assert_eq!(switch_branch(0.12, 4, 100, 10_000), SwitchBranch::Zero);
        // 0.15 > 0.1414 and 0.15 > √(0.01) = 0.1
        assert_eq!(switch_branch(0.15, 4, 100, 10_000), SwitchBranch::UnsupervisedPlus);
        // min{0.02, 1.414} = 0.02 < 0.5 ≤ √100 = 10
        assert_eq!(switch_branch(0.5, 4, 10_000, 100), SwitchBranch::Supervised);
    }

    #[test]
    fn no_unlabeled_data_means_supervised_or_zero() {
        assert_eq!(switch_branch(1.0, 10, 50, 0), SwitchBranch::Supervised);
        assert_eq!(switch_branch(0.1, 10, 50, 0), SwitchBranch::Zero);
    }

    #[test]
    fn ssl_s_returns_branch_estimate() {
        let model = MixtureModel::along_first_axis(1.0, 3).unwrap();
        let lab = sample_labeled(&model, 50, 1);
        let unl = sample_unlabeled(&model, 2000, 2);
        let params = SolverParams::default();
        let out = fit_ssl_s(&lab, &unl, SnrSource::Oracle(1.0), &params).unwrap();
        assert_eq!(out.branch, SwitchBranch::UnsupervisedPlus);
        assert_eq!(out.output.method, Method::SslS);
        let sl = fit_sl(&lab).unwrap();
        let ul = super::super::fit_ul(&unl, params.eig_tol, params.eig_max_iter, params.eig_seed).unwrap();
        assert_eq!(out.output.theta, fix_sign(&ul, &sl).unwrap().theta);

        let empty = UnlabeledDataset::empty(3);
        let out = fit_ssl_s(&lab, &empty, SnrSource::Oracle(1.0), &params).unwrap();
        assert_eq!(out.branch, SwitchBranch::Supervised);
        assert_eq!(out.output.theta, sl.theta);
    }

    #[test]
    fn plug_in_mode_estimates_snr() {
        let model = MixtureModel::along_first_axis(1.5, 2).unwrap();
        let lab = sample_labeled(&model, 20, 3);
        let unl = sample_unlabeled(&model, 20_000, 4);
        let out = fit_ssl_s(&lab, &unl, SnrSource::PlugIn, &SolverParams::default()).unwrap();
        assert!((out.snr_used - 1.5).abs() < 0.1, "ŝ = {}", out.snr_used);
        assert_eq!(out.branch, SwitchBranch::UnsupervisedPlus);
    }
}
