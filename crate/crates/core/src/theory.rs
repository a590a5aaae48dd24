//! Closed-form rate expressions for the symmetric two-component mixture.
//!
//! Every `Θ(·)` expression is evaluated with explicit constants (all 1 by
//! default) and without hidden logarithmic factors, so the values are rates
//! rather than calibrated error predictions.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gmm::std_normal_cdf;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProblemSize {
    pub s: f64,
    pub d: usize,
    pub n_l: usize,
    pub n_u: usize,
}

impl ProblemSize {
    pub fn new(s: f64, d: usize, n_l: usize, n_u: usize) -> Result<Self> {
        let p = Self { s, d, n_l, n_u };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.s.is_finite() && self.s >= 0.0) {
            return Err(Error::param("s", format!("must be finite and >= 0, got {}", self.s)));
        }
        if self.d < 2 {
            return Err(Error::param("d", format!("must be at least 2, got {}", self.d)));
        }
        Ok(())
    }

    fn n_l(&self) -> f64 {
        self.n_l as f64
    }

    fn n_u(&self) -> f64 {
        self.n_u as f64
    }

    fn d(&self) -> f64 {
        self.d as f64
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BoundConstants {
    pub c0: f64,
    pub c1: f64,
    pub c2: f64,
    pub c3: f64,
    pub c4: f64,
    pub c_l: f64,
}

impl Default for BoundConstants {
    fn default() -> Self {
        Self {
            c0: 1.0,
            c1: 1.0,
            c2: 1.0,
            c3: 1.0,
            c4: 1.0,
            c_l: 1.0,
        }
    }
}

impl BoundConstants {
    pub fn validate(&self) -> Result<()> {
        let named = [
            ("c0", self.c0),
            ("c1", self.c1),
            ("c2", self.c2),
            ("c3", self.c3),
            ("c4", self.c4),
            ("c_l", self.c_l),
        ];
        for (name, v) in named {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::param(name, format!("must be finite and > 0, got {v}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Regime {
    #[serde(rename = "SL-dominant")]
    SlDominant,
    #[serde(rename = "UL-dominant")]
    UlDominant,
    Balanced,
    LowSNR,
}

impl Regime {
    pub fn as_str(self) -> &'static str {
        match self {
            Regime::SlDominant => "SL-dominant",
            Regime::UlDominant => "UL-dominant",
            Regime::Balanced => "Balanced",
            Regime::LowSNR => "LowSNR",
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

pub const DEFAULT_REGIME_THRESHOLD: f64 = 10.0;

/// All theoretical quantities for one problem size. Bounds that are not
/// defined for the given size are `None`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateReport {
    pub size: ProblemSize,
    pub excess_rate: f64,
    pub estimation_rate: Option<f64>,
    pub ulp_excess_upper: Option<f64>,
    pub ulp_estimation_upper: Option<f64>,
    pub h_l: Option<f64>,
    pub h_u: Option<f64>,
    pub trivial_excess: f64,
    pub regime: Regime,
}

/// `e^{-s²/2} min{s, d / (s n_l + s³ n_u)}`; zero when `s = 0`.
pub fn minimax_excess_rate(p: &ProblemSize) -> Result<f64> {
    p.validate()?;
    require_samples(p)?;
    if p.s == 0.0 {
        return Ok(0.0);
    }
    let s = p.s;
    let denom = s * p.n_l() + s.powi(3) * p.n_u();
    Ok((-0.5 * s * s).exp() * s.min(p.d() / denom))
}

/// `min{s, √(d / (n_l + s² n_u))}` for `s ∈ [0, 1]`.
pub fn minimax_estimation_rate(p: &ProblemSize) -> Result<f64> {
    p.validate()?;
    require_samples(p)?;
    if p.s > 1.0 {
        return Err(Error::param("s", "the estimation rate is only stated for s <= 1"));
    }
    if p.s == 0.0 {
        return Ok(0.0);
    }
    let denom = p.n_l() + p.s * p.s * p.n_u();
    Ok(p.s.min((p.d() / denom).sqrt()))
}

fn require_samples(p: &ProblemSize) -> Result<()> {
    if p.n_l + p.n_u == 0 {
        return Err(Error::param("n_l + n_u", "at least one sample is required"));
    }
    Ok(())
}

/// Validity condition `n_u ≥ (160/s)² d` of the UL+ bounds, and the clamped
/// factor `1 - (c0 / min{s, s²}) √(d ln n_u / (s² n_u))`.
fn ulplus_factor(p: &ProblemSize, c: &BoundConstants) -> Result<f64> {
    p.validate()?;
    c.validate()?;
    if p.s <= 0.0 {
        return Err(Error::param("s", "UL+ bounds need s > 0"));
    }
    let s = p.s;
    let needed = (160.0 / s).powi(2) * p.d();
    if p.n_u() < needed {
        return Err(Error::Validity(format!(
            "UL+ bounds need n_u >= (160/s)^2 d = {needed}, got n_u = {}",
            p.n_u
        )));
    }
    let n_u = p.n_u();
    let root = (p.d() * n_u.ln() / (s * s * n_u)).sqrt();
    Ok((1.0 - c.c0 / s.min(s * s) * root).clamp(0.0, 1.0))
}

/// `C3 e^{-s²/2} d ln(d n_u) / (s³ n_u) + C4 exp(-½ s² n_l f²)` for `s ∈ (0, 1]`.
pub fn ulplus_excess_upper(p: &ProblemSize, c: &BoundConstants) -> Result<f64> {
    if p.s > 1.0 {
        return Err(Error::param("s", "the UL+ excess bound is only stated for s <= 1"));
    }
    let f = ulplus_factor(p, c)?;
    let s = p.s;
    let n_u = p.n_u();
    let first = c.c3 * (-0.5 * s * s).exp() * p.d() * (p.d() * n_u).ln() / (s.powi(3) * n_u);
    let second = c.c4 * (-0.5 * s * s * p.n_l() * f * f).exp();
    Ok(first + second)
}

/// `C1 √(d / (s² n_u)) + C2 s exp(-½ n_l s² f²)`.
pub fn ulplus_estimation_upper(p: &ProblemSize, c: &BoundConstants) -> Result<f64> {
    let f = ulplus_factor(p, c)?;
    let s = p.s;
    let first = c.c1 * (p.d() / (s * s * p.n_u())).sqrt();
    let second = c.c2 * s * (-0.5 * p.n_l() * s * s * f * f).exp();
    Ok(first + second)
}

/// `(h_l, h_u) = (n_l, s² n_u) / (n_l + s² n_u)`.
pub fn rate_improvement(p: &ProblemSize) -> Result<(f64, f64)> {
    p.validate()?;
    let info_u = p.s * p.s * p.n_u();
    let total = p.n_l() + info_u;
    if total <= 0.0 {
        return Err(Error::param("n_l + s^2 n_u", "must be positive"));
    }
    // The smaller share is divided out and the larger is its complement,
    // which makes the sum round to exactly 1.
    if p.n_l() <= info_u {
        let h_l = p.n_l() / total;
        Ok((h_l, 1.0 - h_l))
    } else {
        let h_u = info_u / total;
        Ok((1.0 - h_u, h_u))
    }
}

/// Finite-sample regime label: `LowSNR` when `s ≤ 1/√n_u`, otherwise whichever
/// side carries more than `ratio_threshold` times the information of the other.
pub fn classify_regime(p: &ProblemSize, ratio_threshold: f64) -> Result<Regime> {
    p.validate()?;
    if !(ratio_threshold > 1.0) {
        return Err(Error::param("ratio_threshold", "must exceed 1"));
    }
    if p.s <= 1.0 / p.n_u().sqrt() {
        return Ok(Regime::LowSNR);
    }
    let info_u = p.s * p.s * p.n_u();
    Ok(if p.n_l() > ratio_threshold * info_u {
        Regime::SlDominant
    } else if info_u > ratio_threshold * p.n_l() {
        Regime::UlDominant
    } else {
        Regime::Balanced
    })
}

/// Excess risk of the zero classifier, `Φ(s) - ½`.
pub fn trivial_excess(s: f64) -> Result<f64> {
    if !(s.is_finite() && s >= 0.0) {
        return Err(Error::param("s", "must be finite and >= 0"));
    }
    Ok(std_normal_cdf(s) - 0.5)
}

/// Gain of the MSE-optimal weighting over the better of two independent
/// estimators. Returns `(gap, combined)` with `combined = xy / (x + y)` and
/// `gap = min(x, y) - combined`.
pub fn oracle_gap(mse_sl: f64, mse_ul: f64) -> Result<(f64, f64)> {
    for (name, v) in [("mse_sl", mse_sl), ("mse_ul", mse_ul)] {
        if !(v.is_finite() && v > 0.0) {
            return Err(Error::param(name, format!("must be finite and > 0, got {v}")));
        }
    }
    let combined = mse_sl * mse_ul / (mse_sl + mse_ul);
    Ok((mse_sl.min(mse_ul) - combined, combined))
}

pub fn rate_report(p: &ProblemSize, c: &BoundConstants, ratio_threshold: f64) -> Result<RateReport> {
    p.validate()?;
    c.validate()?;
    let (h_l, h_u) = match rate_improvement(p) {
        Ok((l, u)) => (Some(l), Some(u)),
        Err(_) => (None, None),
    };
    Ok(RateReport {
        size: *p,
        excess_rate: minimax_excess_rate(p)?,
        estimation_rate: minimax_estimation_rate(p).ok(),
        ulp_excess_upper: ulplus_excess_upper(p, c).ok(),
        ulp_estimation_upper: ulplus_estimation_upper(p, c).ok(),
        h_l,
        h_u,
        trivial_excess: trivial_excess(p.s)?,
        regime: classify_regime(p, ratio_threshold)?,
    })
}
