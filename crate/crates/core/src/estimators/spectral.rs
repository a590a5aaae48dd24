use ndarray::{Array1, Array2, ArrayView1};
use rand::Rng;
use rand_distr::StandardNormal;

use super::linalg::scaled_gram;
use crate::error::{Error, Result};
use crate::gmm::{check_dim, norm, EstimatorOutput, Method, UnlabeledDataset};
use crate::rng::rng_from_seed;

/// Uncentered second moment `Σ̂ = (1/n) Σ_j x_j x_jᵀ`.
///
/// No mean is subtracted: the mixture is symmetric, so its population mean is
/// zero and `E[XXᵀ] = I + θ*θ*ᵀ`.
#[derive(Debug, Clone, PartialEq)]
pub struct SecondMoment {
    pub m: Array2<f64>,
    pub n: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigenPair {
    pub lambda: f64,
    /// Unit vector whose largest-magnitude entry is positive.
    pub v: Array1<f64>,
    pub iterations: usize,
}

pub fn second_moment(data: &UnlabeledDataset) -> Result<SecondMoment> {
    if data.is_empty() {
        return Err(Error::EmptyDataset("second moment needs at least one row"));
    }
    Ok(SecondMoment {
        m: scaled_gram(data.x()),
        n: data.len(),
    })
}

/// Power iteration for the leading eigenpair of a symmetric matrix.
pub fn leading_eigenpair(
    m: &SecondMoment,
    tol: f64,
    max_iter: usize,
    seed: u64,
) -> Result<EigenPair> {
    leading_eigenpair_excluding(&m.m, &[], tol, max_iter, seed)
}

/// Power iteration restricted to the orthogonal complement of `exclude`
/// (which must be orthonormal). Used directly for deflated PCA.
///
/// Starts from a seeded random unit vector and stops once two successive
/// iterates differ by less than `tol` and `‖Mv - λv‖ ≤ tol`.
pub fn leading_eigenpair_excluding(
    m: &Array2<f64>,
    exclude: &[Array1<f64>],
    tol: f64,
    max_iter: usize,
    seed: u64,
) -> Result<EigenPair> {
    if !(tol > 0.0) {
        return Err(Error::param("tol", "must be positive"));
    }
    if max_iter == 0 {
        return Err(Error::param("max_iter", "must be at least 1"));
    }
    let d = m.nrows();
    if m.ncols() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: m.ncols(),
        });
    }
    if d == 0 {
        return Err(Error::param("m", "matrix is empty"));
    }
    if m.iter().any(|v| !v.is_finite()) {
        return Err(Error::NonFinite("eigen input"));
    }
    for b in exclude {
        check_dim(d, b.len())?;
    }
    if exclude.len() >= d {
        return Err(Error::param("exclude", "no directions left to search"));
    }

    let mut rng = rng_from_seed(seed);
    let mut v: Array1<f64> = (0..d).map(|_| rng.sample(StandardNormal)).collect();
    project_out(&mut v, exclude);
    let mut n0 = norm(v.view());
    if n0 == 0.0 {
        // Astronomically unlikely; fall back to a deterministic direction.
        v = Array1::ones(d);
        project_out(&mut v, exclude);
        n0 = norm(v.view());
    }
    v /= n0;

    for iteration in 1..=max_iter {
        let mut w = m.dot(&v);
        project_out(&mut w, exclude);
        let lambda = v.dot(&w);
        let w_norm = norm(w.view());
        if w_norm <= f64::MIN_POSITIVE {
            // v lies in the null space of the (restricted) matrix.
            return Ok(finish(0.0, v, iteration));
        }
        let residual = norm((&w - &(&v * lambda)).view());
        let next = w / w_norm;
        // A negative dominant eigenvalue flips the iterate each step.
        let step = norm((&next - &v).view()).min(norm((&next + &v).view()));
        if step < tol && residual <= tol {
            return Ok(finish(lambda, v, iteration));
        }
        v = next;
    }
    Err(Error::NotConverged {
        solver: "power iteration",
        iterations: max_iter,
        last: canonical_sign(v).to_vec(),
    })
}

fn finish(lambda: f64, v: Array1<f64>, iterations: usize) -> EigenPair {
    EigenPair {
        lambda,
        v: canonical_sign(v),
        iterations,
    }
}

fn project_out(v: &mut Array1<f64>, basis: &[Array1<f64>]) {
    for b in basis {
        let c = b.dot(v);
        v.scaled_add(-c, b);
    }
}

/// Flips `v` so that its largest-magnitude entry (first on ties) is positive.
fn canonical_sign(mut v: Array1<f64>) -> Array1<f64> {
    let mut best = 0usize;
    for (i, x) in v.iter().enumerate() {
        if x.abs() > v[best].abs() {
            best = i;
        }
    }
    if v[best] < 0.0 {
        v.mapv_inplace(|x| -x);
    }
    v
}

/// Spectral UL estimator `√((λ̂ - 1)_+) v̂`; the zero vector when `λ̂ ≤ 1`.
pub fn fit_ul(data: &UnlabeledDataset, tol: f64, max_iter: usize, seed: u64) -> Result<EstimatorOutput> {
    let m = second_moment(data)?;
    let pair = leading_eigenpair(&m, tol, max_iter, seed)?;
    let magnitude = (pair.lambda - 1.0).max(0.0).sqrt();
    if magnitude == 0.0 {
        return Ok(EstimatorOutput::zero(data.dim(), Method::Ul));
    }
    EstimatorOutput::new(pair.v * magnitude, Method::Ul)
}

/// `ŝ = √((λ̂ - 1)_+)` from the leading eigenvalue of the second moment.
pub fn plug_in_snr(data: &UnlabeledDataset, tol: f64, max_iter: usize, seed: u64) -> Result<f64> {
    let m = second_moment(data)?;
    let pair = leading_eigenpair(&m, tol, max_iter, seed)?;
    Ok((pair.lambda - 1.0).max(0.0).sqrt())
}

/// UL+ estimator `sign(θ_SLᵀ θ_UL) θ_UL`, with `sign(0) = +1`.
pub fn fix_sign(theta_ul: &EstimatorOutput, theta_sl: &EstimatorOutput) -> Result<EstimatorOutput> {
    check_dim(theta_ul.dim(), theta_sl.dim())?;
    let theta = if inner(theta_sl.theta.view(), theta_ul.theta.view()) < 0.0 {
        theta_ul.theta.mapv(|v| -v)
    } else {
        theta_ul.theta.clone()
    };
    Ok(EstimatorOutput {
        theta,
        method: Method::UlPlus,
    })
}

fn inner(a: ArrayView1<f64>, b: ArrayView1<f64>) -> f64 {
    a.dot(&b)
}
