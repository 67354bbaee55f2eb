//! Adaptive explicit Runge-Kutta integration (DOP853) with dense output.
//!
//! The step controller and error norm follow Hairer's DOP853 as used in
//! common scientific stacks, so step sequences are reproducible bit for bit
//! given the same right-hand side.

use super::dop853_tableau::{A, C, D, E3, E5};

const N_STAGES: usize = 12;
const SAFETY: f64 = 0.9;
const MIN_FACTOR: f64 = 0.2;
const MAX_FACTOR: f64 = 10.0;
const ERROR_EXPONENT: f64 = -1.0 / 8.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum StepError {
    /// The controller asked for a step below `10 * ulp(t)`.
    StepTooSmall { t: f64 },
    /// The right-hand side produced a non-finite value.
    NonFinite { t: f64 },
}

fn axpy_stages<const N: usize>(y: &[f64; N], k: &[[f64; N]], coef: &[f64], h: f64) -> [f64; N] {
    let mut out = *y;
    for (ks, &a) in k.iter().zip(coef) {
        if a != 0.0 {
            let ha = h * a;
            for i in 0..N {
                out[i] += ha * ks[i];
            }
        }
    }
    out
}

fn rms<const N: usize>(v: &[f64; N]) -> f64 {
    (v.iter().map(|x| x * x).sum::<f64>() / N as f64).sqrt()
}

/// Stepper state for `y' = f(t, y)` on `R^N`, integrating forward in time.
pub struct Dop853<F, const N: usize>
where
    F: FnMut(f64, &[f64; N]) -> [f64; N],
{
    f: F,
    rtol: f64,
    atol: f64,
    max_step: f64,
    t: f64,
    y: [f64; N],
    fy: [f64; N],
    h_abs: f64,
    // data from the last accepted step, used for dense output
    t_old: f64,
    y_old: [f64; N],
    f_old: [f64; N],
    k: [[f64; N]; 16],
    n_eval: usize,
    n_accepted: usize,
}

impl<F, const N: usize> Dop853<F, N>
where
    F: FnMut(f64, &[f64; N]) -> [f64; N],
{
    pub fn new(mut f: F, t0: f64, y0: [f64; N], rtol: f64, atol: f64) -> Self {
        let fy = f(t0, &y0);
        let mut s = Self {
            f,
            rtol,
            atol,
            max_step: f64::INFINITY,
            t: t0,
            y: y0,
            fy,
            h_abs: 0.0,
            t_old: t0,
            y_old: y0,
            f_old: fy,
            k: [[0.0; N]; 16],
            n_eval: 1,
            n_accepted: 0,
        };
        s.h_abs = s.initial_step();
        s
    }

    pub fn with_max_step(mut self, max_step: f64) -> Self {
        self.max_step = max_step;
        self.h_abs = self.h_abs.min(max_step);
        self
    }

    pub fn t(&self) -> f64 {
        self.t
    }

    pub fn y(&self) -> &[f64; N] {
        &self.y
    }

    /// Replace the current state (e.g. after renormalizing tangent vectors),
    /// keeping the step-size estimate.
    pub fn reset_state(&mut self, y: [f64; N]) {
        self.y = y;
        self.fy = self.eval(self.t, &y);
        self.t_old = self.t;
        self.y_old = y;
        self.f_old = self.fy;
    }

    pub fn t_old(&self) -> f64 {
        self.t_old
    }

    pub fn n_eval(&self) -> usize {
        self.n_eval
    }

    pub fn n_accepted(&self) -> usize {
        self.n_accepted
    }

    fn eval(&mut self, t: f64, y: &[f64; N]) -> [f64; N] {
        self.n_eval += 1;
        (self.f)(t, y)
    }

    fn initial_step(&mut self) -> f64 {
        let (t0, y0, f0) = (self.t, self.y, self.fy);
        let mut scaled_y = [0.0; N];
        let mut scaled_f = [0.0; N];
        for i in 0..N {
            let sc = self.atol + y0[i].abs() * self.rtol;
            scaled_y[i] = y0[i] / sc;
            scaled_f[i] = f0[i] / sc;
        }
        let d0 = rms(&scaled_y);
        let d1 = rms(&scaled_f);
        let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
        let mut y1 = y0;
        for i in 0..N {
            y1[i] += h0 * f0[i];
        }
        let f1 = self.eval(t0 + h0, &y1);
        let mut diff = [0.0; N];
        for i in 0..N {
            diff[i] = (f1[i] - f0[i]) / (self.atol + y0[i].abs() * self.rtol);
        }
        let d2 = rms(&diff) / h0;
        let h1 = if d1 <= 1e-15 && d2 <= 1e-15 {
            (h0 * 1e-3).max(1e-6)
        } else {
            (0.01 / d1.max(d2)).powf(1.0 / 8.0)
        };
        (100.0 * h0).min(h1).min(self.max_step)
    }

    /// Take one accepted step, never passing `t_bound`.
    pub fn step(&mut self, t_bound: f64) -> Result<(), StepError> {
        let t = self.t;
        let min_step = 10.0 * (next_up(t) - t).abs();
        let mut h_abs = self.h_abs.clamp(min_step, self.max_step.max(min_step));
        let mut rejected = false;
        loop {
            if h_abs < min_step {
                return Err(StepError::StepTooSmall { t });
            }
            let mut t_new = t + h_abs;
            if t_new > t_bound {
                t_new = t_bound;
            }
            let h = t_new - t;
            h_abs = h.abs();

            let mut k = [[0.0; N]; 16];
            k[0] = self.fy;
            for s in 1..N_STAGES {
                let ys = axpy_stages(&self.y, &k[..s], &A[s][..s], h);
                k[s] = self.eval(t + C[s] * h, &ys);
            }
            let y_new = axpy_stages(&self.y, &k[..N_STAGES], &A[N_STAGES][..N_STAGES], h);
            let f_new = self.eval(t + h, &y_new);
            k[N_STAGES] = f_new;

            if y_new.iter().chain(f_new.iter()).any(|v| !v.is_finite()) {
                rejected = true;
                h_abs *= MIN_FACTOR;
                if h_abs < min_step {
                    return Err(StepError::NonFinite { t });
                }
                continue;
            }

            let mut e5 = 0.0;
            let mut e3 = 0.0;
            for i in 0..N {
                let scale = self.atol + self.y[i].abs().max(y_new[i].abs()) * self.rtol;
                let mut r5 = 0.0;
                let mut r3 = 0.0;
                for s in 0..=N_STAGES {
                    r5 += k[s][i] * E5[s];
                    r3 += k[s][i] * E3[s];
                }
                e5 += (r5 / scale).powi(2);
                e3 += (r3 / scale).powi(2);
            }
            let err = if e5 == 0.0 && e3 == 0.0 {
                0.0
            } else {
                h_abs * e5 / ((e5 + 0.01 * e3) * N as f64).sqrt()
            };

            if err < 1.0 {
                let mut factor = if err == 0.0 {
                    MAX_FACTOR
                } else {
                    MAX_FACTOR.min(SAFETY * err.powf(ERROR_EXPONENT))
                };
                if rejected {
                    factor = factor.min(1.0);
                }
                self.h_abs = h_abs * factor;
                self.t_old = t;
                self.y_old = self.y;
                self.f_old = self.fy;
                self.k = k;
                self.t = t_new;
                self.y = y_new;
                self.fy = f_new;
                self.n_accepted += 1;
                return Ok(());
            }
            h_abs *= MIN_FACTOR.max(SAFETY * err.powf(ERROR_EXPONENT));
            rejected = true;
        }
    }

    /// Integrate up to exactly `t_target`.
    pub fn advance_to(&mut self, t_target: f64) -> Result<(), StepError> {
        while self.t < t_target {
            self.step(t_target)?;
        }
        Ok(())
    }

    /// Continuous extension over the last accepted step `[t_old, t]`.
    /// Costs three extra right-hand-side evaluations.
    pub fn dense(&mut self) -> DenseStep<N> {
        let h = self.t - self.t_old;
        let mut k = self.k;
        for s in 13..16 {
            let ys = axpy_stages(&self.y_old, &k[..s], &A[s][..s], h);
            k[s] = self.eval(self.t_old + C[s] * h, &ys);
        }
        let mut f = [[0.0; N]; 7];
        for i in 0..N {
            let dy = self.y[i] - self.y_old[i];
            f[0][i] = dy;
            f[1][i] = h * self.f_old[i] - dy;
            f[2][i] = 2.0 * dy - h * (self.fy[i] + self.f_old[i]);
        }
        for (r, drow) in D.iter().enumerate() {
            for i in 0..N {
                let mut acc = 0.0;
                for s in 0..16 {
                    acc += drow[s] * k[s][i];
                }
                f[3 + r][i] = h * acc;
            }
        }
        DenseStep { t_old: self.t_old, h, y_old: self.y_old, f }
    }
}

/// Seventh-order interpolant over one step.
#[derive(Debug, Clone)]
pub struct DenseStep<const N: usize> {
    t_old: f64,
    h: f64,
    y_old: [f64; N],
    f: [[f64; N]; 7],
}

impl<const N: usize> DenseStep<N> {
    pub fn eval(&self, t: f64) -> [f64; N] {
        let x = (t - self.t_old) / self.h;
        let mut y = [0.0; N];
        for (i, fr) in self.f.iter().rev().enumerate() {
            let m = if i % 2 == 0 { x } else { 1.0 - x };
            for c in 0..N {
                y[c] = (y[c] + fr[c]) * m;
            }
        }
        for c in 0..N {
            y[c] += self.y_old[c];
        }
        y
    }
}

fn next_up(t: f64) -> f64 {
    if t.is_nan() || t == f64::INFINITY {
        return t;
    }
    if t == 0.0 {
        return f64::from_bits(1);
    }
    let bits = t.to_bits();
    if t > 0.0 {
        f64::from_bits(bits + 1)
    } else {
        f64::from_bits(bits - 1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tableau_rows_sum_to_nodes() {
        for s in 1..16 {
            let sum: f64 = A[s].iter().sum();
            assert!((sum - C[s]).abs() < 1e-13, "row {s}: {sum} vs {}", C[s]);
        }
    }

    #[test]
    fn harmonic_oscillator_accuracy() {
        let mut solver = Dop853::new(|_, y: &[f64; 2]| [y[1], -y[0]], 0.0, [1.0, 0.0], 1e-12, 1e-12);
        solver.advance_to(50.0).unwrap();
        let y = solver.y();
        assert!((y[0] - 50f64.cos()).abs() < 1e-9);
        assert!((y[1] + 50f64.sin()).abs() < 1e-9);
    }

    #[test]
    fn dense_output_matches_exact_inside_steps() {
        let mut solver = Dop853::new(|_, y: &[f64; 2]| [y[1], -y[0]], 0.0, [1.0, 0.0], 1e-11, 1e-11);
        let mut worst: f64 = 0.0;
        while solver.t() < 20.0 {
            solver.step(20.0).unwrap();
            let d = solver.dense();
            let (a, b) = (solver.t_old(), solver.t());
            for q in 0..=8 {
                let t = a + (b - a) * q as f64 / 8.0;
                let y = d.eval(t);
                worst = worst.max((y[0] - t.cos()).abs());
            }
        }
        assert!(worst < 1e-9, "dense error {worst}");
    }

    #[test]
    fn endpoint_is_hit_exactly() {
        let mut solver = Dop853::new(|_, y: &[f64; 1]| [-y[0]], 0.0, [1.0], 1e-10, 1e-10);
        solver.advance_to(3.7).unwrap();
        assert_eq!(solver.t(), 3.7);
        assert!((solver.y()[0] - (-3.7f64).exp()).abs() < 1e-9);
    }

    #[test]
    fn blowup_reports_small_step() {
        // y' = y^2, y(0) = 1 blows up at t = 1
        let mut solver = Dop853::new(|_, y: &[f64; 1]| [y[0] * y[0]], 0.0, [1.0], 1e-10, 1e-10);
        assert!(matches!(solver.advance_to(2.0), Err(StepError::StepTooSmall { .. })));
        assert!(solver.t() < 1.0 + 1e-6);
    }
}
