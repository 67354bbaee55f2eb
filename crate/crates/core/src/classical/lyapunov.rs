//! Finite-time Lyapunov exponents from the variational equations.
//!
//! Two tangent vectors are carried along the reference orbit and
//! re-orthonormalized (Gram-Schmidt) at fixed intervals; the running sums of
//! the logarithmic growth factors give the two leading exponents. For a
//! two-degree-of-freedom Hamiltonian flow the spectrum is `±Λ1, ±Λ2` with
//! `Λ2 = 0`, so the second vector also serves as a consistency check.

use super::dynamics::{check_tol, failure, ClassicalSystem};
use super::ode::Dop853;
use crate::error::{invalid, Result};
use crate::model::ClassicalState;

#[derive(Debug, Clone, PartialEq)]
pub struct LyapunovResult {
    pub times: Vec<f64>,
    /// Larger of the two exponents in magnitude, `≥ 0`.
    pub lambda1: Vec<f64>,
    /// Smaller of the two exponents in magnitude, `≥ 0`.
    pub lambda2: Vec<f64>,
    /// Signed Gram-Schmidt exponents in vector order, before folding.
    pub raw1: Vec<f64>,
    pub raw2: Vec<f64>,
    pub renorm_interval: f64,
}

impl LyapunovResult {
    pub fn final_values(&self) -> (f64, f64) {
        (self.lambda1.last().copied().unwrap_or(0.0), self.lambda2.last().copied().unwrap_or(0.0))
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn variational_rhs(sys: &ClassicalSystem, y: &[f64; 12]) -> [f64; 12] {
    let s = [y[0], y[1], y[2], y[3]];
    let f = sys.rhs(&s);
    let jac = sys.jacobian(&s);
    let mut out = [0.0; 12];
    out[..4].copy_from_slice(&f);
    for v in 0..2 {
        let off = 4 + 4 * v;
        for i in 0..4 {
            out[off + i] = dot(&jac[i], &y[off..off + 4]);
        }
    }
    out
}

/// Orthonormalize the two tangent vectors in place, returning their
/// growth factors `(‖v1‖, ‖v2⊥‖)`.
fn gram_schmidt(y: &mut [f64; 12]) -> (f64, f64) {
    let (head, v2) = y.split_at_mut(8);
    let v1 = &mut head[4..8];
    let n1 = dot(v1, v1).sqrt();
    v1.iter_mut().for_each(|x| *x /= n1);
    let proj = dot(v1, v2);
    for i in 0..4 {
        v2[i] -= proj * v1[i];
    }
    let n2 = dot(v2, v2).sqrt();
    v2.iter_mut().for_each(|x| *x /= n2);
    (n1, n2)
}

pub fn lyapunov_spectrum(
    sys: &ClassicalSystem,
    state0: &ClassicalState,
    t_end: f64,
    renorm_interval: f64,
    tol: f64,
) -> Result<LyapunovResult> {
    check_tol(tol)?;
    if !(renorm_interval > 0.0 && renorm_interval.is_finite()) {
        return Err(invalid("renorm_interval", format!("must be > 0, got {renorm_interval}")));
    }
    if !(t_end > 0.0 && t_end.is_finite()) {
        return Err(invalid("t_end", format!("must be > 0, got {t_end}")));
    }
    let mut y0 = [0.0; 12];
    y0[..4].copy_from_slice(&state0.to_array());
    // fixed, generic starting directions
    y0[4..8].copy_from_slice(&[0.5, 0.5, 0.5, 0.5]);
    y0[8..12].copy_from_slice(&[0.8, -0.3, 0.1, 0.5]);
    gram_schmidt(&mut y0);

    let mut solver = Dop853::new(|_, y: &[f64; 12]| variational_rhs(sys, y), 0.0, y0, tol, tol);
    let n_steps = (t_end / renorm_interval).ceil() as usize;
    let mut res = LyapunovResult {
        times: Vec::with_capacity(n_steps),
        lambda1: Vec::with_capacity(n_steps),
        lambda2: Vec::with_capacity(n_steps),
        raw1: Vec::with_capacity(n_steps),
        raw2: Vec::with_capacity(n_steps),
        renorm_interval,
    };
    let (mut s1, mut s2) = (0.0, 0.0);
    for k in 1..=n_steps {
        let t_next = (k as f64 * renorm_interval).min(t_end);
        solver.advance_to(t_next).map_err(|e| failure(e, solver.y()))?;
        let mut y = *solver.y();
        let (g1, g2) = gram_schmidt(&mut y);
        solver.reset_state(y);
        s1 += g1.ln();
        s2 += g2.ln();
        let (r1, r2) = (s1 / t_next, s2 / t_next);
        let (a, b) = (r1.abs(), r2.abs());
        res.times.push(t_next);
        res.raw1.push(r1);
        res.raw2.push(r2);
        res.lambda1.push(a.max(b));
        res.lambda2.push(a.min(b));
    }
    Ok(res)
}
