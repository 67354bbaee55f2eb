//! Kernel polynomial reconstruction of the commutator Green function
//!
//! ```text
//! G(ω) = 2πi ⟨A δ(ω - (H - E₀)) B⟩ - 2πi ⟨B δ(ω + (H - E₀)) A⟩
//! ```
//!
//! for a ground state `ψ₀`. Both terms come from the single set of cross
//! moments `μ_n = ⟨Aψ₀| T_n(H̃) |Bψ₀⟩`; the second term uses `conj(μ_n)`.
//! For `A = Jx`, `B = Jy` the total weight is `-2π⟨Jz⟩`.

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64 as C64;
use rayon::prelude::*;

use super::propagate::ChebyshevPropagator;
use crate::error::{invalid, Error, Result};
use crate::quantum::sparse::SparseOperator;
use crate::quantum::states::{inner, StateVector};

pub const MIN_MOMENTS: usize = 8;
/// Default Lorentz kernel parameter.
pub const LORENTZ_LAMBDA: f64 = 4.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Kernel {
    Jackson,
    Lorentz { lambda: f64 },
}

impl Kernel {
    /// Damping factors `g_0 … g_{m-1}`.
    pub fn factors(&self, m: usize) -> Vec<f64> {
        match *self {
            Kernel::Jackson => {
                let mp = (m + 1) as f64;
                let q = PI / mp;
                let cot = 1.0 / q.tan();
                (0..m)
                    .map(|n| {
                        let n = n as f64;
                        ((mp - n) * (q * n).cos() + (q * n).sin() * cot) / mp
                    })
                    .collect()
            }
            Kernel::Lorentz { lambda } => {
                let s = lambda.sinh();
                (0..m).map(|n| (lambda * (1.0 - n as f64 / m as f64)).sinh() / s).collect()
            }
        }
    }
}

impl fmt::Display for Kernel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Kernel::Jackson => write!(f, "jackson"),
            Kernel::Lorentz { lambda } => write!(f, "lorentz({lambda})"),
        }
    }
}

/// A real spectral function sampled on an increasing frequency grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pub omega: Vec<f64>,
    pub values: Vec<f64>,
    pub kernel: Kernel,
    pub moments: usize,
    /// Largest imaginary part discarded when forming `values`.
    pub max_imag: f64,
    /// `(E_min, E_max)` used for the rescaling.
    pub bounds: (f64, f64),
    pub e0: f64,
}

impl Spectrum {
    /// Trapezoidal integral over the grid.
    pub fn integral(&self) -> f64 {
        trapezoid(&self.omega, &self.values)
    }

    /// Every value multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        let mut s = self.clone();
        s.values.iter_mut().for_each(|v| *v *= factor);
        s
    }

    /// Convolution with a unit-area Gaussian of width `sigma`.
    ///
    /// The discrete kernel is renormalized at each point, so the integral
    /// is kept away from the grid ends. Widths below the grid spacing
    /// return the spectrum unchanged.
    pub fn smoothed(&self, sigma: f64) -> Self {
        let n = self.omega.len();
        if n < 2 || sigma <= 0.0 {
            return self.clone();
        }
        let h = (self.omega[n - 1] - self.omega[0]) / (n - 1) as f64;
        if sigma < h {
            return self.clone();
        }
        let reach = (6.0 * sigma / h).ceil() as usize;
        let w: Vec<f64> = (0..=reach).map(|k| (-0.5 * (k as f64 * h / sigma).powi(2)).exp()).collect();
        let total: f64 = w[0] + 2.0 * w[1..].iter().sum::<f64>();
        let values = (0..n)
            .into_par_iter()
            .map(|i| {
                let lo = i.saturating_sub(reach);
                let hi = (i + reach).min(n - 1);
                (lo..=hi).map(|k| w[k.abs_diff(i)] * self.values[k]).sum::<f64>() / total
            })
            .collect();
        Self { values, ..self.clone() }
    }
}

pub fn trapezoid(x: &[f64], y: &[f64]) -> f64 {
    x.windows(2).zip(y.windows(2)).map(|(xs, ys)| 0.5 * (xs[1] - xs[0]) * (ys[0] + ys[1])).sum()
}

/// Cross moments `μ_n = ⟨Aψ₀| T_n(H̃) |Bψ₀⟩` for `n < m`, one recurrence sweep.
pub fn cross_moments(prop: &ChebyshevPropagator, a_psi: &[C64], b_psi: &[C64], m: usize) -> Vec<C64> {
    let dim = b_psi.len();
    let mut mu = Vec::with_capacity(m);
    let mut prev = b_psi.to_vec();
    mu.push(inner(a_psi, &prev));
    if m == 1 {
        return mu;
    }
    let mut cur = vec![C64::new(0.0, 0.0); dim];
    prop.apply_scaled(&prev, &mut cur);
    mu.push(inner(a_psi, &cur));
    let mut next = vec![C64::new(0.0, 0.0); dim];
    for _ in 2..m {
        prop.apply_scaled(&cur, &mut next);
        for (nx, pv) in next.iter_mut().zip(&prev) {
            *nx = 2.0 * *nx - pv;
        }
        mu.push(inner(a_psi, &next));
        std::mem::swap(&mut prev, &mut cur);
        std::mem::swap(&mut cur, &mut next);
    }
    mu
}

/// `ρ(x) = [g_0 μ_0 + 2 Σ g_n μ_n T_n(x)] / (π a √(1 - x²))` by Clenshaw
/// summation; zero outside `(-1, 1)`.
fn density(coef: &[C64], x: f64, a: f64) -> C64 {
    if x <= -1.0 || x >= 1.0 {
        return C64::new(0.0, 0.0);
    }
    // Σ_{n≥0} d_n T_n(x) with d_0 = g_0 μ_0, d_n = 2 g_n μ_n
    let (mut b1, mut b2) = (C64::new(0.0, 0.0), C64::new(0.0, 0.0));
    for d in coef[1..].iter().rev() {
        let b0 = d + 2.0 * x * b1 - b2;
        b2 = b1;
        b1 = b0;
    }
    let s = coef[0] + x * b1 - b2;
    s / (PI * a * (1.0 - x * x).sqrt())
}

/// Symmetric uniform grid on `(-W, W)`, `W = E_max - E₀`, with `points`
/// nodes that avoid the singular endpoints.
pub fn default_grid(bounds: (f64, f64), e0: f64, points: usize) -> Vec<f64> {
    let w = bounds.1 - e0;
    let h = 2.0 * w / points as f64;
    (0..points).map(|k| -w + (k as f64 + 0.5) * h).collect()
}

/// Green function on `grid` (increasing, `E₀ + |ω| < E_max`).
pub fn kpm_green_function(
    h: &SparseOperator,
    psi0: &StateVector,
    a_op: &SparseOperator,
    b_op: &SparseOperator,
    moments: usize,
    grid: &[f64],
    kernel: Kernel,
) -> Result<Spectrum> {
    let prop = ChebyshevPropagator::new(h)?;
    kpm_green_function_with(&prop, psi0, a_op, b_op, moments, grid, kernel)
}

/// As [`kpm_green_function`] with a prepared propagator (fixed bounds).
pub fn kpm_green_function_with(
    prop: &ChebyshevPropagator,
    psi0: &StateVector,
    a_op: &SparseOperator,
    b_op: &SparseOperator,
    moments: usize,
    grid: &[f64],
    kernel: Kernel,
) -> Result<Spectrum> {
    if moments < MIN_MOMENTS {
        return Err(invalid("moments", format!("need at least {MIN_MOMENTS}, got {moments}")));
    }
    if !a_op.is_hermitian_flagged() || !b_op.is_hermitian_flagged() {
        return Err(invalid("A, B", "operators must be Hermitian"));
    }
    if grid.is_empty() || grid.iter().any(|w| !w.is_finite()) || grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidGrid("frequency grid must be finite and strictly increasing".into()));
    }
    let (lo, hi) = prop.bounds();
    let e0 = psi0.expectation(prop.operator()).re;
    let reach = grid[0].abs().max(grid[grid.len() - 1].abs());
    if e0 + reach >= hi {
        return Err(Error::InvalidGrid(format!(
            "|ω| up to {reach} leaves the scaled spectral window (E0 = {e0}, E_max = {hi})"
        )));
    }
    let a_psi = a_op.mul_vec(&psi0.amps);
    let b_psi = b_op.mul_vec(&psi0.amps);
    let mu = cross_moments(prop, &a_psi, &b_psi, moments);
    let g = kernel.factors(moments);
    let coef: Vec<C64> = mu.iter().zip(&g).enumerate().map(|(n, (m, g))| if n == 0 { m * g } else { 2.0 * m * g }).collect();
    let coef_conj: Vec<C64> = coef.iter().map(|c| c.conj()).collect();
    let (a, b) = (prop.scale(), prop.center());
    let two_pi_i = C64::new(0.0, 2.0 * PI);
    let vals: Vec<C64> = grid
        .par_iter()
        .map(|&w| {
            let up = density(&coef, (e0 + w - b) / a, a);
            let down = density(&coef_conj, (e0 - w - b) / a, a);
            two_pi_i * (up - down)
        })
        .collect();
    let max_imag = vals.iter().map(|v| v.im.abs()).fold(0.0, f64::max);
    Ok(Spectrum {
        omega: grid.to_vec(),
        values: vals.iter().map(|v| v.re).collect(),
        kernel,
        moments,
        max_imag,
        bounds: (lo, hi),
        e0,
    })
}
