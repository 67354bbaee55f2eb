//! Coefficient matrix for time averages over `[-T, T]`.
//!
//! With `c_n(t) = ε_n (-i)^n J_n(at)`, `ε_0 = 1`, `ε_n = 2` otherwise,
//!
//! ```text
//! C_mn = (1/2T) ∫ c_m*(t) c_n(t) dt
//!      = ε_m ε_n i^{m-n} / (2π)² ∫∫ e^{-i(nx - my)} sinc(aT (sin x - sin y)) dx dy
//! ```
//!
//! The double integral has a periodic analytic integrand, so the
//! trapezoid rule on a `Q × Q` grid converges exponentially once `Q`
//! exceeds the bandwidth `N + aT`. Both sums are FFTs.

use std::f64::consts::PI;

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rustfft::FftPlanner;

use super::bessel::bessel_j_seq;
use crate::error::{invalid, Error, Result};

/// Accepted change of `C` when the quadrature size is doubled.
pub const QUAD_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct TimeAvgMatrix {
    pub c: DMatrix<C64>,
    pub a_t: f64,
    pub quad_size: usize,
}

impl TimeAvgMatrix {
    pub fn order(&self) -> usize {
        self.c.nrows() - 1
    }

    pub fn hermiticity_defect(&self) -> f64 {
        (&self.c - self.c.adjoint()).iter().map(|v| v.norm()).fold(0.0, f64::max)
    }
}

pub fn sinc(u: f64) -> f64 {
    if u.abs() < 1e-8 {
        1.0 - u * u / 6.0
    } else {
        u.sin() / u
    }
}

/// Power of two at least `2 (N + aT + 50)`.
pub fn default_quad_size(n: usize, a_t: f64) -> usize {
    let need = 2.0 * (n as f64 + a_t.abs() + 50.0);
    (need.ceil() as usize).next_power_of_two()
}

/// Order `N` whose omitted coefficients stay below `eps` for all `|t| ≤ T`.
pub fn required_order(a_t: f64, eps: f64) -> usize {
    let x = a_t.abs();
    let len = (x + 40.0 + 12.0 * x.cbrt()).ceil() as usize + 2;
    let j = bessel_j_seq(x, len);
    // past the turning point |J_n(at)| grows with |t|, so t = T bounds the tail
    let mut n = len;
    while n > 1 && 2.0 * j[n - 1].abs() < eps {
        n -= 1;
    }
    n - 1
}

/// Largest omitted coefficient `max_{n > N} |c_n(T)|`, used as the tail test.
pub fn omitted_coefficient(order: usize, a_t: f64) -> f64 {
    let x = a_t.abs();
    let len = (order + 1).max((x + 40.0 + 12.0 * x.cbrt()).ceil() as usize) + 2;
    let j = bessel_j_seq(x, len);
    j[order + 1..].iter().map(|v| 2.0 * v.abs()).fold(0.0, f64::max)
}

/// `C` at quadrature size `q` (no convergence check).
pub fn time_avg_matrix_at(order: usize, a_t: f64, q: usize) -> Result<TimeAvgMatrix> {
    if !a_t.is_finite() || a_t < 0.0 {
        return Err(invalid("aT", "must be finite and >= 0"));
    }
    if q <= 2 * order + 1 {
        return Err(invalid("quad_size", format!("{q} cannot resolve order {order}")));
    }
    let n1 = order + 1;
    let mut planner = FftPlanner::<f64>::new();
    let inv = planner.plan_fft_inverse(q);
    let fwd = planner.plan_fft_forward(q);
    let sines: Vec<f64> = (0..q).map(|k| (2.0 * PI * k as f64 / q as f64).sin()).collect();

    // pass 1: for every x_ν, Σ_μ S(x_ν, y_μ) e^{+i m y_μ} for m ≤ N
    let mut partial = vec![C64::new(0.0, 0.0); q * n1];
    let mut row = vec![C64::new(0.0, 0.0); q];
    for nu in 0..q {
        for (r, sy) in row.iter_mut().zip(&sines) {
            *r = C64::new(sinc(a_t * (sines[nu] - sy)), 0.0);
        }
        inv.process(&mut row);
        for m in 0..n1 {
            partial[m * q + nu] = row[m];
        }
    }
    // pass 2: Σ_ν e^{-i n x_ν} (…) for n ≤ N
    let mut c = DMatrix::<C64>::zeros(n1, n1);
    let norm = 1.0 / (q as f64 * q as f64);
    for m in 0..n1 {
        let col = &mut partial[m * q..(m + 1) * q];
        fwd.process(col);
        for n in 0..n1 {
            let eps = if m == 0 { 1.0 } else { 2.0 } * if n == 0 { 1.0 } else { 2.0 };
            c[(m, n)] = i_pow(m as i64 - n as i64) * col[n] * (eps * norm);
        }
    }
    Ok(TimeAvgMatrix { c, a_t, quad_size: q })
}

/// `C` at quadrature size `q`, verified against size `2q`.
pub fn time_avg_coefficients(order: usize, a_t: f64, q: usize) -> Result<TimeAvgMatrix> {
    let m1 = time_avg_matrix_at(order, a_t, q)?;
    let m2 = time_avg_matrix_at(order, a_t, 2 * q)?;
    let change = (&m1.c - &m2.c).iter().map(|v| v.norm()).fold(0.0, f64::max);
    if change > QUAD_TOL {
        return Err(Error::NonConvergence { solver: "time-average quadrature", iterations: q, residual: change });
    }
    Ok(m2)
}

fn i_pow(k: i64) -> C64 {
    match k.rem_euclid(4) {
        0 => C64::new(1.0, 0.0),
        1 => C64::new(0.0, 1.0),
        2 => C64::new(-1.0, 0.0),
        _ => C64::new(0.0, -1.0),
    }
}
