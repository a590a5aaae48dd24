//! The symmetric spherical two-component Gaussian mixture.
//!
//! `Y ~ Unif{-1, +1}` and `X | Y ~ N(Y θ*, I_d)`. The signal-to-noise ratio is
//! `s = ‖θ*‖`. A linear classifier `x ↦ sign(⟨θ, x⟩)` has closed-form error
//! `Φ(-⟨θ, θ*⟩ / ‖θ‖)`, and the Bayes classifier is `θ = θ*` with error `Φ(-s)`.

use std::fmt;

use ndarray::{Array1, Array2, ArrayView1};
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::rng_from_seed;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MixtureModelRepr", into = "MixtureModelRepr")]
pub struct MixtureModel {
    theta_star: Array1<f64>,
    snr: f64,
}

#[derive(Serialize, Deserialize)]
struct MixtureModelRepr {
    theta_star: Vec<f64>,
}

impl TryFrom<MixtureModelRepr> for MixtureModel {
    type Error = Error;

    fn try_from(r: MixtureModelRepr) -> Result<Self> {
        MixtureModel::new(Array1::from(r.theta_star))
    }
}

impl From<MixtureModel> for MixtureModelRepr {
    fn from(m: MixtureModel) -> Self {
        MixtureModelRepr {
            theta_star: m.theta_star.to_vec(),
        }
    }
}

impl MixtureModel {
    pub fn new(theta_star: Array1<f64>) -> Result<Self> {
        if theta_star.is_empty() {
            return Err(Error::param("theta_star", "dimension must be at least 1"));
        }
        if theta_star.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("theta_star"));
        }
        let snr = norm(theta_star.view());
        Ok(Self { theta_star, snr })
    }

    /// `θ* = s e_1` in `d` dimensions.
    pub fn along_first_axis(snr: f64, d: usize) -> Result<Self> {
        if !(snr.is_finite() && snr >= 0.0) {
            return Err(Error::param("s", format!("must be finite and >= 0, got {snr}")));
        }
        if d == 0 {
            return Err(Error::param("d", "dimension must be at least 1"));
        }
        let mut theta = Array1::zeros(d);
        theta[0] = snr;
        Self::new(theta)
    }

    /// Same direction, new norm. A zero mean is given the direction `e_1`.
    pub fn with_snr(&self, snr: f64) -> Result<Self> {
        if self.snr == 0.0 {
            return Self::along_first_axis(snr, self.dim());
        }
        if !(snr.is_finite() && snr >= 0.0) {
            return Err(Error::param("s", format!("must be finite and >= 0, got {snr}")));
        }
        Self::new(&self.theta_star * (snr / self.snr))
    }

    pub fn theta_star(&self) -> &Array1<f64> {
        &self.theta_star
    }

    pub fn snr(&self) -> f64 {
        self.snr
    }

    pub fn dim(&self) -> usize {
        self.theta_star.len()
    }

    /// Bayes-optimal error `Φ(-s)`.
    pub fn bayes_error(&self) -> f64 {
        std_normal_cdf(-self.snr)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LabeledDataset {
    x: Array2<f64>,
    y: Array1<f64>,
}

impl LabeledDataset {
    pub fn new(x: Array2<f64>, y: Array1<f64>) -> Result<Self> {
        if x.nrows() != y.len() {
            return Err(Error::DimensionMismatch {
                expected: x.nrows(),
                got: y.len(),
            });
        }
        if let Some(&bad) = y.iter().find(|&&v| v != 1.0 && v != -1.0) {
            return Err(Error::InvalidLabel(bad));
        }
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("labeled features"));
        }
        Ok(Self { x, y })
    }

    pub fn empty(d: usize) -> Self {
        Self {
            x: Array2::zeros((0, d)),
            y: Array1::zeros(0),
        }
    }

    pub fn x(&self) -> &Array2<f64> {
        &self.x
    }

    pub fn y(&self) -> &Array1<f64> {
        &self.y
    }

    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.x.ncols()
    }

    /// Drops the labels.
    pub fn to_unlabeled(&self) -> UnlabeledDataset {
        UnlabeledDataset { x: self.x.clone() }
    }

    /// Row-wise concatenation.
    pub fn concat(&self, other: &LabeledDataset) -> Result<LabeledDataset> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: other.dim(),
            });
        }
        let x = ndarray::concatenate![ndarray::Axis(0), self.x, other.x];
        let y = ndarray::concatenate![ndarray::Axis(0), self.y, other.y];
        Ok(LabeledDataset { x, y })
    }

    /// Fraction of rows with `sign(⟨θ, x⟩) ≠ y`. Rows on the decision boundary
    /// count as half an error, so the zero classifier scores exactly 0.5.
    pub fn misclassification_rate(&self, theta: ArrayView1<f64>) -> Result<f64> {
        check_dim(self.dim(), theta.len())?;
        if self.is_empty() {
            return Err(Error::EmptyDataset("misclassification rate"));
        }
        let scores = self.x.dot(&theta);
        let errors: f64 = scores
            .iter()
            .zip(self.y.iter())
            .map(|(&score, &y)| {
                if score == 0.0 {
                    0.5
                } else if (score > 0.0) != (y > 0.0) {
                    1.0
                } else {
                    0.0
                }
            })
            .sum();
        Ok(errors / self.len() as f64)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct UnlabeledDataset {
    x: Array2<f64>,
}

impl UnlabeledDataset {
    pub fn new(x: Array2<f64>) -> Result<Self> {
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("unlabeled features"));
        }
        Ok(Self { x })
    }

    pub fn empty(d: usize) -> Self {
        Self {
            x: Array2::zeros((0, d)),
        }
    }

    pub fn x(&self) -> &Array2<f64> {
        &self.x
    }

    pub fn len(&self) -> usize {
        self.x.nrows()
    }

    pub fn is_empty(&self) -> bool {
        self.x.nrows() == 0
    }

    pub fn dim(&self) -> usize {
        self.x.ncols()
    }
}

/// Which estimator produced a parameter vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Method {
    #[serde(rename = "sl")]
    Sl,
    #[serde(rename = "ul")]
    Ul,
    #[serde(rename = "ulplus")]
    UlPlus,
    #[serde(rename = "ssls")]
    SslS,
    #[serde(rename = "sslw")]
    SslW,
    #[serde(rename = "em")]
    Em,
    #[serde(rename = "logistic")]
    Logistic,
    #[serde(rename = "selftrain")]
    SelfTrain,
    #[serde(rename = "lda")]
    SphericalLda,
    #[serde(rename = "zero")]
    Zero,
}

impl Method {
    pub const ALL: [Method; 10] = [
        Method::Sl,
        Method::Ul,
        Method::UlPlus,
        Method::SslS,
        Method::SslW,
        Method::Em,
        Method::Logistic,
        Method::SelfTrain,
        Method::SphericalLda,
        Method::Zero,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::Sl => "sl",
            Method::Ul => "ul",
            Method::UlPlus => "ulplus",
            Method::SslS => "ssls",
            Method::SslW => "sslw",
            Method::Em => "em",
            Method::Logistic => "logistic",
            Method::SelfTrain => "selftrain",
            Method::SphericalLda => "lda",
            Method::Zero => "zero",
        }
    }

    /// Label used in charts and reports.
    pub fn display_name(self) -> &'static str {
        match self {
            Method::Sl => "SL",
            Method::Ul => "UL",
            Method::UlPlus => "UL+",
            Method::SslS => "SSL-S",
            Method::SslW => "SSL-W",
            Method::Em => "EM",
            Method::Logistic => "Logistic",
            Method::SelfTrain => "Self-training",
            Method::SphericalLda => "Spherical LDA",
            Method::Zero => "Zero",
        }
    }

    /// Unsupervised methods only identify θ* up to sign; their errors are
    /// measured against the closer of `±θ̂`.
    pub fn is_sign_ambiguous(self) -> bool {
        matches!(self, Method::Ul | Method::Em)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key = s.trim().to_ascii_lowercase().replace('+', "plus").replace(['-', '_'], "");
        let method = match key.as_str() {
            "sl" => Method::Sl,
            "ul" => Method::Ul,
            "ulplus" | "ulp" => Method::UlPlus,
            "ssls" | "sls" => Method::SslS,
            "sslw" => Method::SslW,
            "em" => Method::Em,
            "logistic" | "lr" => Method::Logistic,
            "selftrain" | "selftraining" | "st" => Method::SelfTrain,
            "lda" | "sphericallda" => Method::SphericalLda,
            "zero" => Method::Zero,
            _ => return Err(Error::param("method", format!("unknown method `{s}`"))),
        };
        Ok(method)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EstimatorOutput {
    pub theta: Array1<f64>,
    pub method: Method,
}

impl EstimatorOutput {
    pub fn new(theta: Array1<f64>, method: Method) -> Result<Self> {
        if theta.iter().any(|v| !v.is_finite()) {
            return Err(Error::NonFinite("estimator output"));
        }
        Ok(Self { theta, method })
    }

    pub fn zero(d: usize, method: Method) -> Self {
        Self {
            theta: Array1::zeros(d),
            method,
        }
    }

    pub fn with_method(mut self, method: Method) -> Self {
        self.method = method;
        self
    }

    pub fn dim(&self) -> usize {
        self.theta.len()
    }

    pub fn is_zero(&self) -> bool {
        self.theta.iter().all(|&v| v == 0.0)
    }
}

/// Draws `n` labelled samples. Each row consumes one uniform label bit and then
/// `d` standard normals from a generator owned by this call.
pub fn sample_labeled(model: &MixtureModel, n: usize, seed: u64) -> LabeledDataset {
    let d = model.dim();
    let mut rng = rng_from_seed(seed);
    let mut x = Vec::with_capacity(n * d);
    let mut y = Vec::with_capacity(n);
    for _ in 0..n {
        let label = if rng.random::<bool>() { 1.0 } else { -1.0 };
        y.push(label);
        for &mean in model.theta_star.iter() {
            let z: f64 = rng.sample(StandardNormal);
            x.push(label * mean + z);
        }
    }
    let x = Array2::from_shape_vec((n, d), x).expect("shape matches buffer");
    LabeledDataset {
        x,
        y: Array1::from(y),
    }
}

/// Same stream as [`sample_labeled`] with the labels dropped.
pub fn sample_unlabeled(model: &MixtureModel, n: usize, seed: u64) -> UnlabeledDataset {
    UnlabeledDataset {
        x: sample_labeled(model, n, seed).x,
    }
}

/// Standard normal CDF, `Φ(x) = erfc(-x/√2) / 2`.
pub fn std_normal_cdf(x: f64) -> f64 {
    if x.is_nan() {
        return f64::NAN;
    }
    0.5 * libm::erfc(-x / std::f64::consts::SQRT_2)
}

/// Closed-form misclassification probability of `sign(⟨θ̂, x⟩)` under the
/// mixture with mean `θ*`. The zero classifier is defined as chance (0.5).
pub fn prediction_error(theta_hat: ArrayView1<f64>, theta_star: ArrayView1<f64>) -> Result<f64> {
    check_pair(theta_hat, theta_star)?;
    let norm_hat = norm(theta_hat);
    if norm_hat == 0.0 {
        return Ok(0.5);
    }
    Ok(std_normal_cdf(-theta_hat.dot(&theta_star) / norm_hat))
}

/// `prediction_error(θ̂, θ*) - Φ(-‖θ*‖)`, clamped at zero against rounding.
pub fn excess_risk(theta_hat: ArrayView1<f64>, theta_star: ArrayView1<f64>) -> Result<f64> {
    let err = prediction_error(theta_hat, theta_star)?;
    // Same expression as above with θ̂ = θ*, so the Bayes direction scores 0 exactly.
    let s = norm(theta_star);
    let bayes = if s == 0.0 { 0.5 } else { std_normal_cdf(-theta_star.dot(&theta_star) / s) };
    Ok((err - bayes).max(0.0))
}

/// `‖θ̂ - θ*‖₂`.
pub fn estimation_error(theta_hat: ArrayView1<f64>, theta_star: ArrayView1<f64>) -> Result<f64> {
    check_pair(theta_hat, theta_star)?;
    Ok(theta_hat
        .iter()
        .zip(theta_star.iter())
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt())
}

pub(crate) fn norm(v: ArrayView1<f64>) -> f64 {
    v.dot(&v).sqrt()
}

pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::DimensionMismatch { expected, got });
    }
    Ok(())
}

fn check_pair(a: ArrayView1<f64>, b: ArrayView1<f64>) -> Result<()> {
    check_dim(b.len(), a.len())?;
    if a.iter().chain(b.iter()).any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("parameter vector"));
    }
    Ok(())
}
