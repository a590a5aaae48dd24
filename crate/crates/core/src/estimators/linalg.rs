use ndarray::{Array1, Array2, ArrayView1};

/// Solves `a x = b` for symmetric positive definite `a`. `None` if the
/// Cholesky factorisation breaks down.
pub(crate) fn cholesky_solve(a: &Array2<f64>, b: ArrayView1<f64>) -> Option<Array1<f64>> {
    let n = a.nrows();
    let mut l = Array2::<f64>::zeros((n, n));
    for j in 0..n {
        let mut diag = a[[j, j]];
        for k in 0..j {
            diag -= l[[j, k]] * l[[j, k]];
        }
        if !(diag > 0.0) || !diag.is_finite() {
            return None;
        }
        let ljj = diag.sqrt();
        l[[j, j]] = ljj;
        for i in (j + 1)..n {
            let mut v = a[[i, j]];
            for k in 0..j {
                v -= l[[i, k]] * l[[j, k]];
            }
            l[[i, j]] = v / ljj;
        }
    }
    let mut z = Array1::<f64>::zeros(n);
    for i in 0..n {
        let mut v = b[i];
        for k in 0..i {
            v -= l[[i, k]] * z[k];
        }
        z[i] = v / l[[i, i]];
    }
    let mut x = Array1::<f64>::zeros(n);
    for i in (0..n).rev() {
        let mut v = z[i];
        for k in (i + 1)..n {
            v -= l[[k, i]] * x[k];
        }
        x[i] = v / l[[i, i]];
    }
    Some(x)
}

/// `XᵀX / n`, exactly symmetric.
pub(crate) fn scaled_gram(x: &Array2<f64>) -> Array2<f64> {
    let n = x.nrows() as f64;
    let mut g = x.t().dot(x);
    let d = g.nrows();
    for i in 0..d {
        for j in 0..i {
            let v = 0.5 * (g[[i, j]] + g[[j, i]]) / n;
            g[[i, j]] = v;
            g[[j, i]] = v;
        }
        g[[i, i]] /= n;
    }
    g
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn cholesky_solves_spd_system() {
        let a = array![[4.0, 1.0], [1.0, 3.0]];
        let b = array![1.0, 2.0];
        let x = cholesky_solve(&a, b.view()).unwrap();
        let r = a.dot(&x) - &b;
        assert!(r.iter().all(|v| v.abs() < 1e-14));
    }

    #[test]
    fn cholesky_rejects_indefinite() {
        let a = array![[1.0, 2.0], [2.0, 1.0]];
        assert!(cholesky_solve(&a, array![1.0, 1.0].view()).is_none());
    }
}
