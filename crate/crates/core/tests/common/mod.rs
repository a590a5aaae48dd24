//! Independent reference implementations used only by tests.
#![allow(dead_code)]

use ndarray::{Array1, Array2};
use rand::{Rng, SeedableRng};
use rand_xoshiro::Xoshiro256StarStar;

/// Test-side generator, deliberately a different algorithm from the library's.
pub fn test_rng(seed: u64) -> Xoshiro256StarStar {
    Xoshiro256StarStar::seed_from_u64(seed)
}

/// Box–Muller normals, independent of the library's ziggurat sampler.
pub fn normal(rng: &mut impl Rng) -> f64 {
    let u1: f64 = 1.0 - rng.random::<f64>();
    let u2: f64 = rng.random::<f64>();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}

pub fn normal_vec(rng: &mut impl Rng, d: usize) -> Array1<f64> {
    (0..d).map(|_| normal(rng)).collect()
}

/// `Φ(x)` by composite Simpson integration of the density over `[0, |x|]`.
pub fn cdf_by_quadrature(x: f64) -> f64 {
    let a = x.abs();
    let n = 200_000;
    let h = a / n as f64;
    let phi = |t: f64| (-0.5 * t * t).exp() / (2.0 * std::f64::consts::PI).sqrt();
    let mut sum = phi(0.0) + phi(a);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        sum += w * phi(i as f64 * h);
    }
    let half = sum * h / 3.0;
    if x >= 0.0 {
        0.5 + half
    } else {
        0.5 - half
    }
}

/// Mills-ratio bounds on the lower tail, valid for `x < 0`:
/// `φ(x)|x|/(1+x²) ≤ Φ(x) ≤ φ(x)/|x|`.
pub fn lower_tail_bounds(x: f64) -> (f64, f64) {
    let a = x.abs();
    let phi = (-0.5 * a * a).exp() / (2.0 * std::f64::consts::PI).sqrt();
    (phi * a / (1.0 + a * a), phi / a)
}

/// Cyclic Jacobi eigendecomposition of a symmetric matrix. Returns the
/// eigenvalues in decreasing order with matching eigenvector columns.
pub fn jacobi_eigen(a: &Array2<f64>) -> (Vec<f64>, Array2<f64>) {
    let n = a.nrows();
    let mut m = a.clone();
    let mut v = Array2::<f64>::eye(n);
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| m[[i, j]] * m[[i, j]])
            .sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                if m[[p, q]].abs() < 1e-300 {
                    continue;
                }
                let theta = (m[[q, q]] - m[[p, p]]) / (2.0 * m[[p, q]]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let mkp = m[[k, p]];
                    let mkq = m[[k, q]];
                    m[[k, p]] = c * mkp - s * mkq;
                    m[[k, q]] = s * mkp + c * mkq;
                }
                for k in 0..n {
                    let mpk = m[[p, k]];
                    let mqk = m[[q, k]];
                    m[[p, k]] = c * mpk - s * mqk;
                    m[[q, k]] = s * mpk + c * mqk;
                }
                for k in 0..n {
                    let vkp = v[[k, p]];
                    let vkq = v[[k, q]];
                    v[[k, p]] = c * vkp - s * vkq;
                    v[[k, q]] = s * vkp + c * vkq;
                }
            }
        }
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| m[[j, j]].total_cmp(&m[[i, i]]));
    let values = order.iter().map(|&i| m[[i, i]]).collect();
    let mut vectors = Array2::zeros((n, n));
    for (col, &i) in order.iter().enumerate() {
        vectors.column_mut(col).assign(&v.column(i));
    }
    (values, vectors)
}

/// Random symmetric positive semidefinite matrix `B Bᵀ / d`.
pub fn random_psd(rng: &mut impl Rng, d: usize) -> Array2<f64> {
    let b = Array2::from_shape_fn((d, d), |_| normal(rng));
    b.dot(&b.t()) / d as f64
}

/// Ridge logistic objective written out directly.
pub fn logistic_objective(x: &Array2<f64>, y: &Array1<f64>, theta: &Array1<f64>, ridge: f64) -> f64 {
    let n = x.nrows() as f64;
    let mut loss = 0.0;
    for (row, &yi) in x.rows().into_iter().zip(y) {
        let m = yi * row.dot(theta);
        loss += if m > 0.0 { (-m).exp().ln_1p() } else { -m + m.exp().ln_1p() };
    }
    loss / n + ridge * theta.dot(theta)
}

/// Projected gradient descent with step `1/L` on the ball `‖θ‖ ≤ √(ln 2 / ridge)`,
/// which contains the minimiser because the objective at 0 is `ln 2`.
pub fn logistic_oracle(x: &Array2<f64>, y: &Array1<f64>, ridge: f64) -> Array1<f64> {
    let n = x.nrows() as f64;
    let d = x.ncols();
    let gram = x.t().dot(x) / n;
    let (eig, _) = jacobi_eigen(&gram);
    let lipschitz = eig[0] / 4.0 + 2.0 * ridge;
    let radius = (std::f64::consts::LN_2 / ridge).sqrt();
    let mut theta = Array1::<f64>::zeros(d);
    for _ in 0..2_000_000 {
        let mut g = Array1::<f64>::zeros(d);
        for (row, &yi) in x.rows().into_iter().zip(y) {
            let m = yi * row.dot(&theta);
            let s = 1.0 / (1.0 + m.exp());
            g.scaled_add(-yi * s / n, &row);
        }
        g.scaled_add(2.0 * ridge, &theta);
        if g.dot(&g).sqrt() < 1e-10 {
            break;
        }
        theta.scaled_add(-1.0 / lipschitz, &g);
        let norm = theta.dot(&theta).sqrt();
        if norm > radius {
            theta *= radius / norm;
        }
    }
    theta
}

/// `E‖g‖` for `g ~ N(0, I_d)`: `√2 Γ((d+1)/2) / Γ(d/2)`, by exact products of
/// half-integer gamma values.
pub fn chi_mean(d: usize) -> f64 {
    // Γ(k + 1/2) = √π (2k)! / (4^k k!), Γ(k) = (k-1)!
    fn gamma_half_or_int(twice: usize) -> f64 {
        if twice.is_multiple_of(2) {
            (1..twice / 2).map(|i| i as f64).product()
        } else {
            let k = twice / 2;
            let mut v = std::f64::consts::PI.sqrt();
            for i in 0..k {
                v *= i as f64 + 0.5;
            }
            v
        }
    }
    std::f64::consts::SQRT_2 * gamma_half_or_int(d + 1) / gamma_half_or_int(d)
}

/// Prints one acceptance line and returns whether it passed.
pub fn report(id: &str, pass: bool, detail: &str) -> bool {
    println!("{id} {}: {detail}", if pass { "PASS" } else { "FAIL" });
    pass
}
