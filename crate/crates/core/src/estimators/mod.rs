//! Estimators of the mixture mean `θ*`.
//!
//! Every fitting function is a pure function of its inputs; iterative solvers
//! keep all of their state on the stack and seed their own generators.

mod em;
mod linalg;
mod logistic;
mod self_training;
mod spectral;
mod supervised;
mod switching;
mod weighted;

use serde::{Deserialize, Serialize};

pub use em::{em_step, fit_em, symmetric_log_likelihood};
pub use logistic::{fit_logistic, logistic_gradient, logistic_objective, LogisticParams};
pub use self_training::{pseudolabel, self_train};
pub use spectral::{
    fit_ul, fix_sign, leading_eigenpair, leading_eigenpair_excluding, plug_in_snr, second_moment,
    EigenPair, SecondMoment,
};
pub use supervised::{fit_sl, fit_spherical_lda};
pub use switching::{fit_ssl_s, switch_branch, SnrSource, SwitchBranch, SwitchOutcome};
pub use weighted::{
    avg_margin, default_t_grid, fit_ssl_w, oracle_weight, select_weight, weighted, WeightSelection,
};

use crate::error::Result;
use crate::gmm::{EstimatorOutput, Method, UnlabeledDataset};

/// Unsupervised estimator backing UL+ (and therefore SSL-S and SSL-W).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum UlBackend {
    /// `√((λ̂ - 1)_+) v̂` from the uncentered second moment.
    #[default]
    Spectral,
    /// Symmetric EM started from the spectral estimate.
    Em,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverParams {
    pub eig_tol: f64,
    pub eig_max_iter: usize,
    /// Seeds the random start of power iteration.
    pub eig_seed: u64,
    pub ul_backend: UlBackend,
    pub em_tol: f64,
    pub em_max_iter: usize,
}

impl Default for SolverParams {
    fn default() -> Self {
        Self {
            eig_tol: 1e-10,
            eig_max_iter: 100_000,
            eig_seed: 0,
            ul_backend: UlBackend::Spectral,
            em_tol: 1e-8,
            em_max_iter: 10_000,
        }
    }
}

/// The UL estimate selected by `params.ul_backend`, tagged [`Method::Ul`].
pub fn fit_unsupervised(data: &UnlabeledDataset, params: &SolverParams) -> Result<EstimatorOutput> {
    let spectral = fit_ul(data, params.eig_tol, params.eig_max_iter, params.eig_seed)?;
    match params.ul_backend {
        UlBackend::Spectral => Ok(spectral),
        UlBackend::Em => {
            let init = em_start(data, &spectral, params)?;
            Ok(fit_em(data, &init, params.em_tol, params.em_max_iter)?.with_method(Method::Ul))
        }
    }
}

/// EM starting point: the spectral estimate, or the unit leading eigenvector
/// when the spectral magnitude is zero (`tanh` keeps 0 fixed).
pub(crate) fn em_start(
    data: &UnlabeledDataset,
    spectral: &EstimatorOutput,
    params: &SolverParams,
) -> Result<ndarray::Array1<f64>> {
    if !spectral.is_zero() {
        return Ok(spectral.theta.clone());
    }
    let m = second_moment(data)?;
    Ok(leading_eigenpair(&m, params.eig_tol, params.eig_max_iter, params.eig_seed)?.v)
}
