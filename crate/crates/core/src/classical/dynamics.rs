//! Semiclassical equations of motion in the planar chart.
//!
//! ```text
//! i dᾱ/dt = Ω (ᾱ + 2 Re z / (1 + |z|²))
//! i dz/dt = Δ (z + (κ/2) (1 - z²) Re ᾱ)
//! ```
//!
//! The flow is not divergence-free in these coordinates: it preserves the
//! density `(1 + |z|²)^-2`, the pullback of the sphere's area form.

use num_complex::Complex64 as C64;

use super::ode::{Dop853, StepError};
use crate::error::{invalid, Error, Result};
use crate::model::{classical_energy, ClassicalState};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassicalSystem {
    pub kappa: f64,
    pub omega: f64,
    pub delta: f64,
}

impl ClassicalSystem {
    pub fn new(kappa: f64, omega: f64, delta: f64) -> Result<Self> {
        if !(kappa.is_finite() && kappa >= 0.0) {
            return Err(invalid("kappa", format!("must be finite and >= 0, got {kappa}")));
        }
        if !(omega.is_finite() && omega > 0.0) {
            return Err(invalid("omega", format!("must be > 0, got {omega}")));
        }
        if !(delta.is_finite() && delta > 0.0) {
            return Err(invalid("delta", format!("must be > 0, got {delta}")));
        }
        Ok(Self { kappa, omega, delta })
    }

    /// Time derivative of `(Re ᾱ, Im ᾱ, Re z, Im z)`.
    #[inline]
    pub fn rhs(&self, s: &[f64; 4]) -> [f64; 4] {
        let [a, b, x, y] = *s;
        let d = 1.0 + x * x + y * y;
        let jx = 2.0 * x / d;
        let k = self.kappa;
        [
            self.omega * b,
            -self.omega * (a + jx),
            self.delta * (y - k * a * x * y),
            -self.delta * (x + 0.5 * k * a * (1.0 - x * x + y * y)),
        ]
    }

    pub fn eom_rhs(&self, state: &ClassicalState) -> [f64; 4] {
        self.rhs(&state.to_array())
    }

    /// Analytic Jacobian `J[i][k] = ∂ rhs_i / ∂ x_k`.
    pub fn jacobian(&self, s: &[f64; 4]) -> [[f64; 4]; 4] {
        let [a, _b, x, y] = *s;
        let (k, om, de) = (self.kappa, self.omega, self.delta);
        let d = 1.0 + x * x + y * y;
        let d2 = d * d;
        let dsx = 2.0 * (1.0 - x * x + y * y) / d2;
        let dsy = -4.0 * x * y / d2;
        [
            [0.0, om, 0.0, 0.0],
            [-om, 0.0, -om * dsx, -om * dsy],
            [-de * k * x * y, 0.0, -de * k * a * y, de * (1.0 - k * a * x)],
            [-de * 0.5 * k * (1.0 - x * x + y * y), 0.0, de * (-1.0 + k * a * x), -de * k * a * y],
        ]
    }

    pub fn eom_jacobian(&self, state: &ClassicalState) -> [[f64; 4]; 4] {
        self.jacobian(&state.to_array())
    }

    pub(crate) fn solver(&self, state0: &ClassicalState, tol: f64) -> Dop853<impl FnMut(f64, &[f64; 4]) -> [f64; 4] + '_, 4> {
        Dop853::new(move |_, y: &[f64; 4]| self.rhs(y), 0.0, state0.to_array(), tol, tol)
    }

    /// Adaptive integration to `t_end`, recording every accepted step.
    pub fn integrate(&self, state0: &ClassicalState, t_end: f64, tol: f64) -> Result<Trajectory> {
        check_tol(tol)?;
        check_t(t_end)?;
        let mut solver = self.solver(state0, tol);
        let mut traj = Trajectory::start(state0, self.kappa);
        while solver.t() < t_end {
            solver.step(t_end).map_err(|e| failure(e, solver.y()))?;
            traj.push(solver.t(), ClassicalState::from_array(solver.y()), self.kappa);
        }
        Ok(traj)
    }

    /// Integration sampled at the given (non-decreasing, non-negative) times
    /// using the continuous extension between steps.
    pub fn integrate_at(&self, state0: &ClassicalState, times: &[f64], tol: f64) -> Result<Trajectory> {
        check_tol(tol)?;
        for w in times.windows(2) {
            if !(w[1] >= w[0]) {
                return Err(invalid("times", "must be non-decreasing"));
            }
        }
        if let Some(&t) = times.first() {
            check_t(t)?;
        }
        let t_end = times.last().copied().unwrap_or(0.0);
        let mut solver = self.solver(state0, tol);
        let mut traj = Trajectory::default();
        let mut idx = 0;
        while idx < times.len() && times[idx] == 0.0 {
            traj.push(0.0, *state0, self.kappa);
            idx += 1;
        }
        while idx < times.len() {
            solver.step(t_end).map_err(|e| failure(e, solver.y()))?;
            let t_hi = solver.t();
            if times[idx] > t_hi {
                continue;
            }
            let dense = solver.dense();
            while idx < times.len() && times[idx] <= t_hi {
                let y = if times[idx] == t_hi { *solver.y() } else { dense.eval(times[idx]) };
                traj.push(times[idx], ClassicalState::from_array(&y), self.kappa);
                idx += 1;
            }
        }
        Ok(traj)
    }

    /// Like [`integrate_at`](Self::integrate_at) but `times` may be negative.
    ///
    /// The equations are invariant under `t → -t` combined with
    /// `z → z*, ᾱ → ᾱ*`, so the past is the conjugate of the forward
    /// orbit started from the conjugate state.
    pub fn integrate_at_signed(&self, state0: &ClassicalState, times: &[f64], tol: f64) -> Result<Trajectory> {
        if times.windows(2).any(|w| !(w[1] >= w[0])) {
            return Err(invalid("times", "must be non-decreasing"));
        }
        let split = times.partition_point(|&t| t < 0.0);
        let back_times: Vec<f64> = times[..split].iter().rev().map(|t| -t).collect();
        let conj = ClassicalState::new(state0.z.conj(), state0.alpha_bar.conj());
        let back = self.integrate_at(&conj, &back_times, tol)?;
        let fwd = self.integrate_at(state0, &times[split..], tol)?;
        let mut traj = Trajectory::default();
        for (t, s) in back.times.iter().zip(&back.states).rev() {
            traj.push(-t, ClassicalState::new(s.z.conj(), s.alpha_bar.conj()), self.kappa);
        }
        for (t, s) in fwd.times.iter().zip(&fwd.states) {
            traj.push(*t, *s, self.kappa);
        }
        Ok(traj)
    }
}

pub(crate) fn check_tol(tol: f64) -> Result<()> {
    if !(1e-13..=1e-4).contains(&tol) {
        return Err(invalid("tol", format!("must lie in [1e-13, 1e-4], got {tol}")));
    }
    Ok(())
}

fn check_t(t: f64) -> Result<()> {
    if !(t.is_finite() && t >= 0.0) {
        return Err(invalid("t_end", format!("must be finite and >= 0, got {t}")));
    }
    Ok(())
}

pub(crate) fn failure(e: StepError, y: &[f64]) -> Error {
    let mut state = [0.0; 4];
    state.copy_from_slice(&y[..4]);
    let (t, reason) = match e {
        StepError::StepTooSmall { t } => (t, "step size underflow"),
        StepError::NonFinite { t } => (t, "non-finite derivative"),
    };
    Error::IntegrationFailure { t, state, reason: reason.into() }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub states: Vec<ClassicalState>,
    pub energies: Vec<f64>,
}

impl Trajectory {
    fn start(s: &ClassicalState, kappa: f64) -> Self {
        let mut t = Self::default();
        t.push(0.0, *s, kappa);
        t
    }

    fn push(&mut self, t: f64, s: ClassicalState, kappa: f64) {
        self.times.push(t);
        self.states.push(s);
        self.energies.push(classical_energy(&s, kappa));
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Largest `|E(t) - E(0)|` over the samples.
    pub fn energy_drift(&self) -> f64 {
        let e0 = self.energies.first().copied().unwrap_or(0.0);
        self.energies.iter().map(|e| (e - e0).abs()).fold(0.0, f64::max)
    }

    pub fn last(&self) -> Option<&ClassicalState> {
        self.states.last()
    }
}

/// Convenience: the complex `dz/dt` at a state.
pub fn z_dot(sys: &ClassicalSystem, s: &ClassicalState) -> C64 {
    let r = sys.eom_rhs(s);
    C64::new(r[2], r[3])
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{parity, stationary_solutions};

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn stationary_points_are_fixed() {
        for k in [0.0, 0.4, 1.0, 2.0, 4.5] {
            let sys = ClassicalSystem::new(k, 1.3, 0.8).unwrap();
            for st in stationary_solutions(k) {
                let r = sys.eom_rhs(&st.state);
                assert!(r.iter().all(|v| v.abs() < 1e-14), "{k}: {r:?}");
            }
        }
    }

    #[test]
    fn free_spin_rhs() {
        let sys = ClassicalSystem::new(0.0, 1.0, 1.7).unwrap();
        let z0 = c(0.3, -0.45);
        let s = ClassicalState::new(z0, c(0.2, 0.1));
        let dz = z_dot(&sys, &s);
        let expect = C64::new(0.0, -1.7) * z0;
        assert!((dz - expect).norm() < 1e-15);
    }

    /// Closed form for κ = 0: free spin precession drives the oscillator.
    fn kappa0_exact(z0: C64, a0: C64, om: f64, de: f64, t: f64) -> (C64, C64) {
        let i = C64::i();
        let z = z0 * (-i * de * t).exp();
        let r = z0.norm();
        let psi = z0.arg();
        let amp = 2.0 * r / (1.0 + r * r);
        // ∫_0^t e^{iΩτ} amp cos(Δτ - ψ) dτ
        let term = |w: f64, phase: C64| -> C64 {
            if w.abs() < 1e-300 {
                phase * t
            } else {
                phase * ((i * w * t).exp() - 1.0) / (i * w)
            }
        };
        let integral = 0.5 * amp * (term(om + de, (-i * psi).exp()) + term(om - de, (i * psi).exp()));
        let a = (-i * om * t).exp() * (a0 - i * om * integral);
        (z, a)
    }

    #[test]
    fn kappa_zero_closed_form() {
        for (om, de) in [(1.3, 1.0), (1.0, 1.0), (0.7, 2.1)] {
            let sys = ClassicalSystem::new(0.0, om, de).unwrap();
            let z0 = c(0.4, 0.7);
            let a0 = c(-0.3, 0.5);
            let times: Vec<f64> = (0..=100).map(|k| k as f64 / de).collect();
            let traj = sys.integrate_at(&ClassicalState::new(z0, a0), &times, 1e-13).unwrap();
            for (t, s) in traj.times.iter().zip(&traj.states) {
                let (z, a) = kappa0_exact(z0, a0, om, de, *t);
                assert!((s.z - z).norm() < 1e-9, "z at {t}: {}", (s.z - z).norm());
                assert!((s.alpha_bar - a).norm() < 1e-9, "a at {t}: {}", (s.alpha_bar - a).norm());
            }
        }
    }

    #[test]
    fn stationary_trajectory_is_constant() {
        let sys = ClassicalSystem::new(2.0, 1.0, 1.0).unwrap();
        let st = stationary_solutions(2.0)[0].state;
        let traj = sys.integrate(&st, 100.0, 1e-10).unwrap();
        for s in &traj.states {
            assert!((s.z - st.z).norm() < 1e-10 && (s.alpha_bar - st.alpha_bar).norm() < 1e-10);
        }
    }

    #[test]
    fn parity_commutes_with_flow() {
        let sys = ClassicalSystem::new(0.8, 1.0, 1.0).unwrap();
        let s0 = ClassicalState::new(c(0.3, -0.2), c(0.6, 0.1));
        let times = [0.0, 5.0, 17.0, 40.0];
        let a = sys.integrate_at(&s0, &times, 1e-12).unwrap();
        let b = sys.integrate_at(&parity(&s0), &times, 1e-12).unwrap();
        for (x, y) in a.states.iter().zip(&b.states) {
            assert!((x.z + y.z).norm() < 1e-12);
            assert!((x.alpha_bar + y.alpha_bar).norm() < 1e-12);
        }
    }

    #[test]
    fn signed_times_retrace_the_past() {
        let sys = ClassicalSystem::new(0.6, 1.0, 1.0).unwrap();
        let s0 = ClassicalState::new(c(0.2, 0.4), c(-0.3, 0.5));
        let past = sys.integrate_at_signed(&s0, &[-7.5, -2.0, 0.0, 3.0], 1e-12).unwrap();
        assert_eq!(past.times, vec![-7.5, -2.0, 0.0, 3.0]);
        assert_eq!(past.states[2], s0);
        // flowing the earliest point forward must land back on the seed
        let back = sys.integrate(&past.states[0], 7.5, 1e-12).unwrap();
        let end = back.states.last().unwrap();
        assert!((end.z - s0.z).norm() < 1e-9 && (end.alpha_bar - s0.alpha_bar).norm() < 1e-9);
        assert!(sys.integrate_at_signed(&s0, &[1.0, -1.0], 1e-10).is_err());
    }

    #[test]
    fn rejects_bad_tolerance() {
        let sys = ClassicalSystem::new(0.8, 1.0, 1.0).unwrap();
        let s0 = ClassicalState::new(c(0.3, 0.0), c(0.0, 0.0));
        assert!(sys.integrate(&s0, 1.0, 1e-3).is_err());
        assert!(sys.integrate(&s0, 1.0, 1e-14).is_err());
        assert!(sys.integrate(&s0, -1.0, 1e-8).is_err());
    }
}
