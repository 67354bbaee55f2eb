//! Lanczos iteration for real symmetric operators, with full
//! reorthogonalization (the Krylov spaces here are at most a few hundred
//! vectors, so the extra cost buys robustness against ghost eigenvalues).

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn nrm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Krylov basis and tridiagonal coefficients.
pub struct Krylov {
    pub v: Vec<Vec<f64>>,
    pub alpha: Vec<f64>,
    /// `beta[k]` couples `v[k]` and `v[k+1]`; the last entry is the
    /// residual norm past the end of the basis.
    pub beta: Vec<f64>,
}

impl Krylov {
    pub fn len(&self) -> usize {
        self.alpha.len()
    }

    pub fn is_empty(&self) -> bool {
        self.alpha.is_empty()
    }

    /// Ritz values (ascending) and the eigenvectors of the tridiagonal matrix.
    pub fn ritz(&self) -> (Vec<f64>, DMatrix<f64>) {
        let m = self.len();
        let mut t = DMatrix::zeros(m, m);
        for k in 0..m {
            t[(k, k)] = self.alpha[k];
            if k + 1 < m {
                t[(k, k + 1)] = self.beta[k];
                t[(k + 1, k)] = self.beta[k];
            }
        }
        let eig = SymmetricEigen::new(t);
        let mut order: Vec<usize> = (0..m).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).unwrap());
        let vals = order.iter().map(|&i| eig.eigenvalues[i]).collect();
        let vecs = DMatrix::from_fn(m, m, |r, c| eig.eigenvectors[(r, order[c])]);
        (vals, vecs)
    }

    /// Residual estimate `|β_m y_m|` of Ritz column `c`.
    pub fn residual_estimate(&self, y: &DMatrix<f64>, c: usize) -> f64 {
        let m = self.len();
        (self.beta[m - 1] * y[(m - 1, c)]).abs()
    }

    /// `V y_c`.
    pub fn ritz_vector(&self, y: &DMatrix<f64>, c: usize) -> Vec<f64> {
        let dim = self.v[0].len();
        let mut x = vec![0.0; dim];
        for (k, vk) in self.v.iter().enumerate().take(self.len()) {
            let w = y[(k, c)];
            for i in 0..dim {
                x[i] += w * vk[i];
            }
        }
        let n = nrm(&x);
        x.iter_mut().for_each(|e| *e /= n);
        x
    }
}

/// Build up to `m` Lanczos vectors from `start`. Stops early on an
/// invariant subspace.
pub fn build_krylov(matvec: &mut dyn FnMut(&[f64], &mut [f64]), start: &[f64], m: usize) -> Krylov {
    let dim = start.len();
    let m = m.min(dim).max(1);
    let mut v: Vec<Vec<f64>> = Vec::with_capacity(m + 1);
    let mut alpha = Vec::with_capacity(m);
    let mut beta = Vec::with_capacity(m);
    let n0 = nrm(start);
    v.push(start.iter().map(|x| x / n0).collect());
    let mut w = vec![0.0; dim];
    let mut scale: f64 = 0.0;
    for k in 0..m {
        matvec(&v[k], &mut w);
        let a = dot(&v[k], &w);
        alpha.push(a);
        // two passes of classical Gram-Schmidt against the whole basis
        for _ in 0..2 {
            for vi in v.iter() {
                let c = dot(vi, &w);
                for i in 0..dim {
                    w[i] -= c * vi[i];
                }
            }
        }
        let b = nrm(&w);
        beta.push(b);
        scale = scale.max(a.abs()).max(b);
        if k + 1 == m || b <= 1e-13 * scale.max(1e-300) {
            if b <= 1e-13 * scale.max(1e-300) {
                *beta.last_mut().unwrap() = 0.0;
            }
            break;
        }
        v.push(w.iter().map(|x| x / b).collect());
    }
    Krylov { v, alpha, beta }
}

/// Lowest eigenpair by restarted Lanczos. Returns `(E, x, residual)` with
/// the explicit residual `‖Hx - Ex‖`.
pub fn lowest_eigenpair(
    matvec: &mut dyn FnMut(&[f64], &mut [f64]),
    start: &[f64],
    tol: f64,
    krylov_dim: usize,
    max_restarts: usize,
) -> Result<(f64, Vec<f64>, f64)> {
    let dim = start.len();
    let mut x = start.to_vec();
    let mut best = (f64::INFINITY, x.clone(), f64::INFINITY);
    let mut hx = vec![0.0; dim];
    for _ in 0..max_restarts.max(1) {
        let kry = build_krylov(matvec, &x, krylov_dim);
        let (_, y) = kry.ritz();
        x = kry.ritz_vector(&y, 0);
        matvec(&x, &mut hx);
        let e = dot(&x, &hx);
        let res = hx.iter().zip(&x).map(|(h, v)| (h - e * v).powi(2)).sum::<f64>().sqrt();
        if res < best.2 {
            best = (e, x.clone(), res);
        }
        if res < tol {
            return Ok(best);
        }
    }
    Err(Error::NonConvergence { solver: "lanczos ground state", iterations: max_restarts, residual: best.2 })
}

/// Extremal Ritz values with residual estimates:
/// `(θ_min, r_min, θ_max, r_max)`.
pub fn extremal_ritz(
    matvec: &mut dyn FnMut(&[f64], &mut [f64]),
    start: &[f64],
    max_dim: usize,
    rel_tol: f64,
) -> Result<(f64, f64, f64, f64)> {
    let mut m = 40usize.min(max_dim);
    loop {
        let kry = build_krylov(matvec, start, m);
        let (vals, y) = kry.ritz();
        let last = vals.len() - 1;
        let (lo, hi) = (vals[0], vals[last]);
        let (rlo, rhi) = (kry.residual_estimate(&y, 0), kry.residual_estimate(&y, last));
        let width = (hi - lo).abs().max(1e-300);
        if (rlo.max(rhi) <= rel_tol * width) || kry.len() < m || m >= max_dim {
            if rlo.max(rhi) > 0.1 * width {
                return Err(Error::NonConvergence { solver: "lanczos spectral bounds", iterations: m, residual: rlo.max(rhi) });
            }
            return Ok((lo, rlo, hi, rhi));
        }
        m = (2 * m).min(max_dim);
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn diag_op(d: Vec<f64>) -> impl FnMut(&[f64], &mut [f64]) {
        move |x: &[f64], y: &mut [f64]| {
            for i in 0..x.len() {
                y[i] = d[i] * x[i];
            }
        }
    }

    #[test]
    fn finds_lowest_of_diagonal() {
        let d: Vec<f64> = (0..300).map(|i| ((i * 37) % 300) as f64 * 0.1 - 3.0).collect();
        let mut op = diag_op(d);
        let start = vec![1.0; 300];
        let (e, x, r) = lowest_eigenpair(&mut op, &start, 1e-10, 60, 200).unwrap();
        assert!((e + 3.0).abs() < 1e-12);
        assert!(r < 1e-10);
        assert!((x[0].abs() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn extremes_bracket() {
        let d: Vec<f64> = (0..500).map(|i| (i as f64 * 0.7).sin() * 5.0).collect();
        let (mn, mx) = d.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |a, &v| (a.0.min(v), a.1.max(v)));
        let mut op = diag_op(d);
        let start: Vec<f64> = (0..500).map(|i| 1.0 + 0.3 * (i as f64 * 1.3).cos()).collect();
        let (lo, rlo, hi, rhi) = extremal_ritz(&mut op, &start, 500, 1e-10).unwrap();
        assert!(lo - rlo <= mn + 1e-12 && hi + rhi >= mx - 1e-12);
        assert!((lo - mn).abs() < 1e-6 && (hi - mx).abs() < 1e-6);
    }
}
