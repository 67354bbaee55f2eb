//! Chebyshev time propagation.
//!
//! With `H̃ = (H - b)/a` mapping the spectrum into `[-1, 1]`,
//!
//! ```text
//! e^{-iHt} = e^{-ibt} [ J_0(at) + 2 Σ_{n≥1} (-i)^n J_n(at) T_n(H̃) ]
//! ```
//!
//! The factor 2 on `n ≥ 1` comes from the Jacobi–Anger expansion.

use num_complex::Complex64 as C64;

use super::bessel::bessel_j_seq;
use crate::error::{invalid, Error, Result};
use crate::quantum::eigen::spectral_bounds;
use crate::quantum::sparse::SparseOperator;
use crate::quantum::states::StateVector;

/// Largest `a·|dt|` covered by one expansion.
pub const MAX_STEP_PHASE: f64 = 200.0;
/// Coefficients below this magnitude end the series.
pub const COEFF_TOL: f64 = 1e-15;
/// Allowed drift of the norm over one call.
pub const NORM_TOL: f64 = 1e-10;

const ZERO: C64 = C64 { re: 0.0, im: 0.0 };

/// `ε_n (-i)^n J_n(x)` for `x = a|dt|`, truncated once the tail is below
/// [`COEFF_TOL`]; conjugated for negative `dt`.
pub fn expansion_coefficients(a_dt: f64) -> Vec<C64> {
    let x = a_dt.abs();
    let len = (x + 40.0 + 12.0 * x.cbrt()).ceil() as usize + 2;
    let j = bessel_j_seq(x, len);
    let mut n = len;
    while n > 1 && 2.0 * j[n - 1].abs() < COEFF_TOL {
        n -= 1;
    }
    let sign = if a_dt < 0.0 { -1.0 } else { 1.0 };
    (0..n)
        .map(|k| {
            let eps = if k == 0 { 1.0 } else { 2.0 };
            // (-i)^k, or i^k for backward steps
            let ph = match k % 4 {
                0 => C64::new(1.0, 0.0),
                1 => C64::new(0.0, -sign),
                2 => C64::new(-1.0, 0.0),
                _ => C64::new(0.0, sign),
            };
            ph * (eps * j[k])
        })
        .collect()
}

#[derive(Debug, Clone)]
pub struct ChebyshevPropagator<'a> {
    h: &'a SparseOperator,
    a: f64,
    b: f64,
}

impl<'a> ChebyshevPropagator<'a> {
    /// Bounds from [`spectral_bounds`].
    pub fn new(h: &'a SparseOperator) -> Result<Self> {
        let (lo, hi) = spectral_bounds(h)?;
        Self::with_bounds(h, lo, hi)
    }

    pub fn with_bounds(h: &'a SparseOperator, e_min: f64, e_max: f64) -> Result<Self> {
        if !(e_min.is_finite() && e_max.is_finite() && e_max > e_min) {
            return Err(invalid("bounds", format!("need finite e_min < e_max, got [{e_min}, {e_max}]")));
        }
        if !h.is_hermitian_flagged() {
            return Err(invalid("H", "Chebyshev propagation requires a Hermitian operator"));
        }
        Ok(Self { h, a: 0.5 * (e_max - e_min), b: 0.5 * (e_max + e_min) })
    }

    /// Half width `a` of the spectral window.
    pub fn scale(&self) -> f64 {
        self.a
    }

    /// Center `b` of the spectral window.
    pub fn center(&self) -> f64 {
        self.b
    }

    pub fn bounds(&self) -> (f64, f64) {
        (self.b - self.a, self.b + self.a)
    }

    pub fn operator(&self) -> &SparseOperator {
        self.h
    }

    /// `y = H̃ x`.
    pub fn apply_scaled(&self, x: &[C64], y: &mut [C64]) {
        self.h.apply(x, y);
        let (ia, b) = (1.0 / self.a, self.b);
        for (yi, xi) in y.iter_mut().zip(x) {
            *yi = (*yi - xi * b) * ia;
        }
    }

    /// `ψ(t) = e^{-iHt} ψ`, split into steps with `a·|dt| ≤ 200`.
    pub fn propagate(&self, psi: &StateVector, t: f64) -> Result<StateVector> {
        if !t.is_finite() {
            return Err(invalid("t", "must be finite"));
        }
        if psi.amps.len() != self.h.dim() {
            return Err(invalid("psi", "dimension does not match the operator"));
        }
        let n0 = psi.norm();
        let steps = (self.a * t.abs() / MAX_STEP_PHASE).ceil().max(1.0) as usize;
        let dt = t / steps as f64;
        let mut amps = psi.amps.clone();
        if t != 0.0 {
            for _ in 0..steps {
                amps = self.step(&amps, dt);
            }
        }
        let out = StateVector { basis: psi.basis, amps };
        let drift = (out.norm() - n0).abs();
        if !(drift <= NORM_TOL * n0.max(1.0)) {
            return Err(Error::NormLoss { drift });
        }
        Ok(out)
    }

    /// States at each of `times` (any order), propagating incrementally
    /// from `t = 0` through the sorted times.
    pub fn propagate_series(&self, psi: &StateVector, times: &[f64]) -> Result<Vec<StateVector>> {
        let mut order: Vec<usize> = (0..times.len()).collect();
        order.sort_by(|&i, &k| times[i].partial_cmp(&times[k]).expect("finite times"));
        let mut out: Vec<Option<StateVector>> = vec![None; times.len()];
        // forward from 0 for t ≥ 0, backward from 0 for t < 0
        let split = order.iter().position(|&i| times[i] >= 0.0).unwrap_or(order.len());
        let mut cur = psi.clone();
        let mut t_cur = 0.0;
        for &i in &order[split..] {
            cur = self.propagate(&cur, times[i] - t_cur)?;
            t_cur = times[i];
            out[i] = Some(cur.clone());
        }
        let (mut cur, mut t_cur) = (psi.clone(), 0.0);
        for &i in order[..split].iter().rev() {
            cur = self.propagate(&cur, times[i] - t_cur)?;
            t_cur = times[i];
            out[i] = Some(cur.clone());
        }
        Ok(out.into_iter().map(|s| s.expect("every time visited")).collect())
    }

    fn step(&self, psi: &[C64], dt: f64) -> Vec<C64> {
        let c = expansion_coefficients(self.a * dt);
        let dim = psi.len();
        let mut acc: Vec<C64> = psi.iter().map(|x| x * c[0]).collect();
        if c.len() > 1 {
            let mut prev = psi.to_vec();
            let mut cur = vec![ZERO; dim];
            self.apply_scaled(psi, &mut cur);
            axpy(&mut acc, c[1], &cur);
            let mut next = vec![ZERO; dim];
            for ck in &c[2..] {
                self.apply_scaled(&cur, &mut next);
                for (nx, pv) in next.iter_mut().zip(&prev) {
                    *nx = 2.0 * *nx - pv;
                }
                axpy(&mut acc, *ck, &next);
                std::mem::swap(&mut prev, &mut cur);
                std::mem::swap(&mut cur, &mut next);
            }
        }
        let phase = C64::from_polar(1.0, -self.b * dt);
        acc.iter_mut().for_each(|x| *x *= phase);
        acc
    }

    /// The filtered vectors `T_0(H̃)ψ, …, T_n(H̃)ψ`.
    pub fn chebyshev_vectors(&self, psi: &[C64], n: usize) -> Vec<Vec<C64>> {
        let mut out: Vec<Vec<C64>> = Vec::with_capacity(n + 1);
        out.push(psi.to_vec());
        if n == 0 {
            return out;
        }
        let mut v1 = vec![ZERO; psi.len()];
        self.apply_scaled(psi, &mut v1);
        out.push(v1);
        for k in 2..=n {
            let mut next = vec![ZERO; psi.len()];
            self.apply_scaled(&out[k - 1], &mut next);
            for (nx, pv) in next.iter_mut().zip(&out[k - 2]) {
                *nx = 2.0 * *nx - pv;
            }
            out.push(next);
        }
        out
    }
}

fn axpy(acc: &mut [C64], c: C64, x: &[C64]) {
    for (a, v) in acc.iter_mut().zip(x) {
        *a += c * v;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ModelParams;
    use crate::quantum::basis::BasisSpec;
    use crate::quantum::operators::build_hamiltonian;
    use crate::quantum::states::coherent_product_state;
    use nalgebra::{DMatrix, DVector, SymmetricEigen};

    fn dense_propagator(h: &SparseOperator, psi: &[C64], t: f64) -> Vec<C64> {
        let eig = SymmetricEigen::new(h.to_dense_real());
        let v: DMatrix<C64> = eig.eigenvectors.map(|x| C64::new(x, 0.0));
        let p = DVector::from_column_slice(psi);
        let mut c = v.adjoint() * p;
        for (k, ck) in c.iter_mut().enumerate() {
            *ck *= C64::from_polar(1.0, -eig.eigenvalues[k] * t);
        }
        (v * c).iter().copied().collect()
    }

    fn setup(j: f64, n_max: usize, kappa: f64) -> (SparseOperator, StateVector) {
        let p = ModelParams::from_kappa(kappa, 1.0, 1.0, j).unwrap();
        let b = BasisSpec::new(j, n_max).unwrap();
        let h = build_hamiltonian(&p, &b).unwrap();
        let psi = coherent_product_state(C64::new(0.8, -0.3), C64::new(0.4, 0.2), &b, 1e-8).unwrap();
        (h, psi)
    }

    fn dist(a: &[C64], b: &[C64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt()
    }

    #[test]
    fn coefficients_sum_rule() {
        // at H̃ = 1 the series must equal e^{-i a t}
        for x in [0.0, 0.3, 5.0, 77.0, -12.0] {
            let s: C64 = expansion_coefficients(x).iter().sum();
            assert!((s - C64::from_polar(1.0, -x)).norm() < 1e-13, "x = {x}");
        }
    }

    #[test]
    fn zero_time_is_identity() {
        let (h, psi) = setup(1.5, 12, 0.7);
        let p = ChebyshevPropagator::new(&h).unwrap();
        assert_eq!(p.propagate(&psi, 0.0).unwrap(), psi);
    }

    #[test]
    fn matches_dense_propagator() {
        let (h, psi) = setup(2.0, 20, 1.4);
        let p = ChebyshevPropagator::new(&h).unwrap();
        for t in [0.1, 1.0, 7.5, 40.0, -3.0] {
            let cheb = p.propagate(&psi, t).unwrap();
            let exact = dense_propagator(&h, &psi.amps, t);
            assert!(dist(&cheb.amps, &exact) < 1e-11, "t = {t}");
            assert!((cheb.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn stationary_without_coupling() {
        let p = ModelParams::new(1.0, 1.0, 0.0, 2.0).unwrap();
        let b = BasisSpec::new(2.0, 6).unwrap();
        let h = build_hamiltonian(&p, &b).unwrap();
        let psi = StateVector::basis_state(b, 0, 0);
        let pr = ChebyshevPropagator::new(&h).unwrap();
        let out = pr.propagate(&psi, 13.0).unwrap();
        // E = Δ m = -2Δ, so ψ(t) = e^{2iΔt} ψ
        let expect = C64::from_polar(1.0, 2.0 * 13.0);
        assert!((out.amps[0] - expect).norm() < 1e-12);
        assert!(out.amps[1..].iter().all(|x| x.norm() < 1e-12));
    }

    #[test]
    fn group_property_and_linearity() {
        let (h, psi) = setup(1.0, 16, 0.9);
        let p = ChebyshevPropagator::new(&h).unwrap();
        let a = p.propagate(&p.propagate(&psi, 2.3).unwrap(), 4.1).unwrap();
        let b = p.propagate(&psi, 6.4).unwrap();
        assert!(dist(&a.amps, &b.amps) < 1e-10);
        let back = p.propagate(&b, -6.4).unwrap();
        assert!(dist(&back.amps, &psi.amps) < 1e-10);

        let phi = StateVector::basis_state(psi.basis, 3, 1);
        let (ca, cb) = (C64::new(0.3, 0.4), C64::new(-0.7, 0.1));
        let mix = StateVector {
            basis: psi.basis,
            amps: psi.amps.iter().zip(&phi.amps).map(|(x, y)| ca * x + cb * y).collect(),
        };
        let lhs = p.propagate(&mix, 5.0).unwrap();
        let (u, v) = (p.propagate(&psi, 5.0).unwrap(), p.propagate(&phi, 5.0).unwrap());
        let rhs: Vec<C64> = u.amps.iter().zip(&v.amps).map(|(x, y)| ca * x + cb * y).collect();
        assert!(dist(&lhs.amps, &rhs) < 1e-12);
    }

    #[test]
    fn series_matches_individual_calls() {
        let (h, psi) = setup(1.0, 10, 0.5);
        let p = ChebyshevPropagator::new(&h).unwrap();
        let times = [3.0, -1.0, 0.5, 0.0, 9.0];
        let s = p.propagate_series(&psi, &times).unwrap();
        for (t, st) in times.iter().zip(&s) {
            let d = p.propagate(&psi, *t).unwrap();
            assert!(dist(&st.amps, &d.amps) < 1e-11);
        }
    }

    #[test]
    fn bad_bounds_detected_by_norm() {
        let (h, psi) = setup(1.0, 10, 0.5);
        let (lo, hi) = spectral_bounds(&h).unwrap();
        let shrunk = ChebyshevPropagator::with_bounds(&h, lo + 0.3 * (hi - lo), hi - 0.3 * (hi - lo)).unwrap();
        assert!(matches!(shrunk.propagate(&psi, 20.0), Err(Error::NormLoss { .. })));
    }

    #[test]
    fn filtered_vectors_follow_recurrence() {
        let (h, psi) = setup(1.0, 12, 0.5);
        let p = ChebyshevPropagator::new(&h).unwrap();
        let v = p.chebyshev_vectors(&psi.amps, 5);
        assert_eq!(v.len(), 6);
        // T_2 = 2 H̃² - 1
        let mut h1 = vec![ZERO; psi.amps.len()];
        let mut h2 = vec![ZERO; psi.amps.len()];
        p.apply_scaled(&psi.amps, &mut h1);
        p.apply_scaled(&h1, &mut h2);
        let t2: Vec<C64> = h2.iter().zip(&psi.amps).map(|(a, b)| 2.0 * a - b).collect();
        assert!(dist(&t2, &v[2]) < 1e-13);
    }
}
