use std::cell::OnceCell;

use super::config::FitSettings;
use crate::error::{Error, Result};
use crate::estimators::{
    avg_margin, em_start, fit_em, fit_logistic, fit_spherical_lda, fit_ssl_s, fit_sl, fit_unsupervised, fit_ul,
    fix_sign, pseudolabel, select_weight, SnrSource, SwitchBranch,
};
use crate::gmm::{EstimatorOutput, LabeledDataset, Method, UnlabeledDataset};

/// The three samples every fit draws on. `validation` is used only through
/// its features, to select hyperparameters by average margin.
#[derive(Debug, Clone, Copy)]
pub struct FitInputs<'a> {
    pub labeled: &'a LabeledDataset,
    pub unlabeled: &'a UnlabeledDataset,
    pub validation: &'a UnlabeledDataset,
    pub snr: SnrSource,
}

/// One fitted estimator with whatever was selected along the way.
#[derive(Debug, Clone, PartialEq)]
pub struct FittedMethod {
    pub output: EstimatorOutput,
    pub branch: Option<SwitchBranch>,
    pub t: Option<f64>,
    pub threshold: Option<f64>,
    pub ridge: Option<f64>,
}

impl FittedMethod {
    fn plain(output: EstimatorOutput) -> Self {
        Self {
            output,
            branch: None,
            t: None,
            threshold: None,
            ridge: None,
        }
    }
}

/// Fits each requested method, recording failures per method as messages.
pub fn fit_methods(
    inputs: &FitInputs<'_>,
    methods: &[Method],
    settings: &FitSettings,
) -> Vec<(Method, std::result::Result<FittedMethod, String>)> {
    let cache = Cache::default();
    methods
        .iter()
        .map(|&m| (m, fit_one(inputs, m, settings, &cache).map_err(|e| e.to_string())))
        .collect()
}

#[derive(Default)]
struct Cache {
    sl: OnceCell<std::result::Result<EstimatorOutput, String>>,
    ul: OnceCell<std::result::Result<EstimatorOutput, String>>,
}

fn cached(
    cell: &OnceCell<std::result::Result<EstimatorOutput, String>>,
    fit: impl FnOnce() -> Result<EstimatorOutput>,
) -> Result<EstimatorOutput> {
    cell.get_or_init(|| fit().map_err(|e| e.to_string()))
        .clone()
        .map_err(Error::Validity)
}

fn fit_one(inputs: &FitInputs<'_>, method: Method, settings: &FitSettings, cache: &Cache) -> Result<FittedMethod> {
    let sl = || cached(&cache.sl, || fit_sl(inputs.labeled));
    let ul = || cached(&cache.ul, || fit_unsupervised(inputs.unlabeled, &settings.solver));
    let d = inputs.labeled.dim();
    match method {
        Method::Sl => Ok(FittedMethod::plain(sl()?)),
        Method::Ul => Ok(FittedMethod::plain(ul()?)),
        Method::UlPlus => Ok(FittedMethod::plain(fix_sign(&ul()?, &sl()?)?)),
        Method::SslS => {
            let outcome = fit_ssl_s(inputs.labeled, inputs.unlabeled, inputs.snr, &settings.solver)?;
            let mut fitted = FittedMethod::plain(outcome.output);
            fitted.branch = Some(outcome.branch);
            Ok(fitted)
        }
        Method::SslW => {
            let ulp = fix_sign(&ul()?, &sl()?)?;
            let (output, selection) = select_weight(&sl()?, &ulp, inputs.validation, &settings.t_grid)?;
            let mut fitted = FittedMethod::plain(output);
            fitted.t = Some(selection.t);
            Ok(fitted)
        }
        Method::Em => {
            let p = &settings.solver;
            let spectral = fit_ul(inputs.unlabeled, p.eig_tol, p.eig_max_iter, p.eig_seed)?;
            let init = em_start(inputs.unlabeled, &spectral, p)?;
            Ok(FittedMethod::plain(fit_em(inputs.unlabeled, &init, p.em_tol, p.em_max_iter)?))
        }
        Method::Logistic => fit_logistic_selected(inputs, settings),
        Method::SelfTrain => fit_self_train_selected(inputs, settings),
        Method::SphericalLda => Ok(FittedMethod::plain(fit_spherical_lda(inputs.labeled)?)),
        Method::Zero => Ok(FittedMethod::plain(EstimatorOutput::zero(d, Method::Zero))),
    }
}

/// Candidate with the largest validation margin; first wins ties, zero
/// vectors are skipped. Without validation rows only a single candidate can
/// be chosen.
struct MarginArgmax<'v> {
    validation: &'v UnlabeledDataset,
    best: Option<(f64, FittedMethod)>,
    seen: usize,
}

impl<'v> MarginArgmax<'v> {
    fn new(validation: &'v UnlabeledDataset) -> Self {
        Self {
            validation,
            best: None,
            seen: 0,
        }
    }

    fn offer(&mut self, candidate: FittedMethod) -> Result<()> {
        self.seen += 1;
        let theta = &candidate.output;
        if theta.is_zero() {
            return Ok(());
        }
        let margin = if self.validation.is_empty() {
            0.0
        } else {
            avg_margin(theta.theta.view(), self.validation)?
        };
        if self.best.as_ref().is_none_or(|(m, _)| margin > *m) {
            self.best = Some((margin, candidate));
        }
        Ok(())
    }

    fn finish(self) -> Result<FittedMethod> {
        if self.validation.is_empty() && self.seen > 1 {
            return Err(Error::EmptyDataset("hyperparameter selection needs validation rows"));
        }
        self.best.map(|(_, c)| c).ok_or(Error::AllCandidatesZero)
    }
}

fn fit_logistic_selected(inputs: &FitInputs<'_>, settings: &FitSettings) -> Result<FittedMethod> {
    let mut argmax = MarginArgmax::new(inputs.validation);
    for &ridge in &settings.ridge_grid {
        let output = fit_logistic(inputs.labeled, &settings.logistic.with_ridge(ridge))?;
        let mut c = FittedMethod::plain(output);
        c.ridge = Some(ridge);
        argmax.offer(c)?;
    }
    argmax.finish()
}

/// Self-training over the ridge grid crossed with margin-quantile thresholds.
/// Stage one is shared by all thresholds of a ridge value; each candidate is
/// exactly what `self_train` returns for that (threshold, ridge) pair.
fn fit_self_train_selected(inputs: &FitInputs<'_>, settings: &FitSettings) -> Result<FittedMethod> {
    let mut argmax = MarginArgmax::new(inputs.validation);
    for &ridge in &settings.ridge_grid {
        let params = settings.logistic.with_ridge(ridge);
        let stage1 = fit_logistic(inputs.labeled, &params)?;
        for threshold in margin_thresholds(&stage1, inputs.unlabeled, &settings.self_train_quantiles) {
            let pseudo = pseudolabel(stage1.theta.view(), inputs.unlabeled, threshold)?;
            let output = if pseudo.is_empty() {
                stage1.clone()
            } else {
                fit_logistic(&inputs.labeled.concat(&pseudo)?, &params)?
            };
            let mut c = FittedMethod::plain(output.with_method(Method::SelfTrain));
            c.ridge = Some(ridge);
            c.threshold = Some(threshold);
            argmax.offer(c)?;
        }
    }
    argmax.finish()
}

/// Lower empirical quantiles of `|⟨θ, x⟩| / ‖θ‖` over the unlabelled rows.
/// Falls back to `+∞` (no pseudolabels) when no margin can be computed.
pub fn margin_thresholds(theta: &EstimatorOutput, unlabeled: &UnlabeledDataset, levels: &[f64]) -> Vec<f64> {
    if theta.is_zero() || unlabeled.is_empty() {
        return vec![f64::INFINITY];
    }
    let scale = theta.theta.dot(&theta.theta).sqrt();
    let mut margins: Vec<f64> = unlabeled.x().dot(&theta.theta).iter().map(|v| v.abs() / scale).collect();
    margins.sort_by(f64::total_cmp);
    let last = margins.len() - 1;
    levels
        .iter()
        .map(|&q| margins[((q * last as f64).floor() as usize).min(last)])
        .collect()
}
