//! Model parameters, the planar spin chart, the classical energy function
//! and its stationary points.
//!
//! Classical spin components are normalized by `j`, and classical energies
//! are the dimensionless `E / (jΔ)`.

use num_complex::Complex64 as C64;

use crate::error::{invalid, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModelParams {
    pub delta: f64,
    pub omega: f64,
    pub lambda_c: f64,
    /// Spin length; classically any positive real, quantum code requires `2j ∈ ℕ`.
    pub j: f64,
}

impl ModelParams {
    pub fn new(delta: f64, omega: f64, lambda_c: f64, j: f64) -> Result<Self> {
        let p = Self { delta, omega, lambda_c, j };
        p.validate()?;
        Ok(p)
    }

    /// Parameters with the coupling chosen to realize a given `κ`.
    pub fn from_kappa(kappa: f64, omega: f64, delta: f64, j: f64) -> Result<Self> {
        if !(kappa >= 0.0 && kappa.is_finite()) {
            return Err(invalid("kappa", format!("must be finite and >= 0, got {kappa}")));
        }
        if !(delta > 0.0 && omega > 0.0 && j > 0.0) {
            return Err(invalid("params", "delta, omega and j must be positive"));
        }
        Self::new(delta, omega, (kappa * delta * omega / (2.0 * j)).sqrt(), j)
    }

    pub fn validate(&self) -> Result<()> {
        let ok = |x: f64| x.is_finite() && x > 0.0;
        if !ok(self.delta) {
            return Err(invalid("delta", format!("must be > 0, got {}", self.delta)));
        }
        if !ok(self.omega) {
            return Err(invalid("omega", format!("must be > 0, got {}", self.omega)));
        }
        if !ok(self.j) {
            return Err(invalid("j", format!("must be > 0, got {}", self.j)));
        }
        if !(self.lambda_c.is_finite() && self.lambda_c >= 0.0) {
            return Err(invalid("lambda", format!("must be >= 0, got {}", self.lambda_c)));
        }
        Ok(())
    }

    pub fn kappa(&self) -> f64 {
        kappa(self)
    }

    /// Factor converting the scaled boson amplitude to the bare one: `α = (jλ/Ω) ᾱ`.
    pub fn alpha_scale(&self) -> f64 {
        self.j * self.lambda_c / self.omega
    }
}

/// Dimensionless coupling `κ = 2jλ² / (ΔΩ)`.
pub fn kappa(p: &ModelParams) -> f64 {
    2.0 * p.j * p.lambda_c * p.lambda_c / (p.delta * p.omega)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpinTriple {
    pub jx: f64,
    pub jy: f64,
    pub jz: f64,
}

impl SpinTriple {
    pub fn norm(&self) -> f64 {
        (self.jx * self.jx + self.jy * self.jy + self.jz * self.jz).sqrt()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClassicalState {
    pub z: C64,
    pub alpha_bar: C64,
}

impl ClassicalState {
    pub fn new(z: C64, alpha_bar: C64) -> Self {
        Self { z, alpha_bar }
    }

    /// Real coordinates in the order `(Re ᾱ, Im ᾱ, Re z, Im z)`.
    pub fn to_array(&self) -> [f64; 4] {
        [self.alpha_bar.re, self.alpha_bar.im, self.z.re, self.z.im]
    }

    pub fn from_array(a: &[f64; 4]) -> Self {
        Self { z: C64::new(a[2], a[3]), alpha_bar: C64::new(a[0], a[1]) }
    }

    pub fn spin(&self) -> SpinTriple {
        planar_to_spin(self.z)
    }

    /// Oscillator position `Q = Re ᾱ`.
    pub fn q(&self) -> f64 {
        self.alpha_bar.re
    }

    /// Oscillator momentum `P = Im ᾱ`.
    pub fn p(&self) -> f64 {
        self.alpha_bar.im
    }

    pub fn energy(&self, kappa: f64) -> f64 {
        classical_energy(self, kappa)
    }
}

/// `z = e^{-iφ} tan(θ/2)`, with `θ = 0` the spin-down pole.
pub fn spin_to_planar(theta: f64, phi: f64) -> Result<C64> {
    if !(0.0..=std::f64::consts::PI).contains(&theta) || !phi.is_finite() {
        return Err(Error::Domain(format!("theta must lie in [0, pi), got {theta}")));
    }
    if theta == std::f64::consts::PI {
        return Err(Error::Domain("theta = pi is the pole at infinity of the planar chart".into()));
    }
    Ok(C64::from_polar((theta / 2.0).tan(), -phi))
}

/// Inverse of [`spin_to_planar`]: `(θ, φ)` with `φ ∈ (-π, π]`.
pub fn planar_to_angles(z: C64) -> (f64, f64) {
    let theta = 2.0 * z.norm().atan();
    let phi = if z == C64::new(0.0, 0.0) { 0.0 } else { -z.arg() };
    (theta, phi)
}

pub fn planar_to_spin(z: C64) -> SpinTriple {
    let r2 = z.norm_sqr();
    let d = 1.0 + r2;
    SpinTriple { jx: 2.0 * z.re / d, jy: -2.0 * z.im / d, jz: (r2 - 1.0) / d }
}

/// Chart inverse `z = (jx - i jy) / (1 - jz)`; the north pole is rejected.
pub fn spin_to_planar_cartesian(s: SpinTriple) -> Result<C64> {
    let den = 1.0 - s.jz;
    if den <= 0.0 {
        return Err(Error::Domain("jz = 1 is the pole at infinity of the planar chart".into()));
    }
    Ok(C64::new(s.jx, -s.jy) / den)
}

/// `E / (jΔ) = jz + κ jx Q + (κ/2) |ᾱ|²`.
pub fn classical_energy(state: &ClassicalState, kappa: f64) -> f64 {
    let r2 = state.z.norm_sqr();
    let d = 1.0 + r2;
    (r2 - 1.0) / d + 2.0 * kappa * state.z.re * state.alpha_bar.re / d + 0.5 * kappa * state.alpha_bar.norm_sqr()
}

pub fn parity(state: &ClassicalState) -> ClassicalState {
    ClassicalState { z: -state.z, alpha_bar: -state.alpha_bar }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stationary {
    pub state: ClassicalState,
    pub stable: bool,
}

/// Stationary points of the classical flow.
///
/// For `κ ≤ 1` only the trivial point exists. Above the transition the two
/// parity-related nontrivial points come first, followed by the trivial
/// point flagged unstable.
pub fn stationary_solutions(kappa: f64) -> Vec<Stationary> {
    let trivial = ClassicalState::new(C64::new(0.0, 0.0), C64::new(0.0, 0.0));
    if kappa <= 1.0 {
        return vec![Stationary { state: trivial, stable: true }];
    }
    let z = ((kappa - 1.0) / (kappa + 1.0)).sqrt();
    let a = (kappa * kappa - 1.0).sqrt() / kappa;
    let plus = ClassicalState::new(C64::new(z, 0.0), C64::new(-a, 0.0));
    vec![
        Stationary { state: plus, stable: true },
        Stationary { state: parity(&plus), stable: true },
        Stationary { state: trivial, stable: false },
    ]
}

/// Energy of the nontrivial stationary points, `-(κ + 1/κ)/2` (or `-1` for `κ ≤ 1`).
pub fn ground_energy(kappa: f64) -> f64 {
    if kappa <= 1.0 {
        -1.0
    } else {
        -0.5 * (kappa + 1.0 / kappa)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    #[test]
    fn kappa_examples() {
        assert_eq!(ModelParams::new(1.0, 1.0, 1.0, 0.5).unwrap().kappa(), 1.0);
        assert_eq!(ModelParams::new(2.0, 3.0, 0.0, 7.0).unwrap().kappa(), 0.0);
        let k = ModelParams::new(1.0, 1.0, 0.1, 100.0).unwrap().kappa();
        assert!((k - 2.0).abs() < 1e-12);
        let p = ModelParams::from_kappa(0.6, 1.3, 0.7, 12.5).unwrap();
        assert!((p.kappa() - 0.6).abs() < 1e-14);
    }

    #[test]
    fn rejects_bad_params() {
        assert!(ModelParams::new(0.0, 1.0, 1.0, 1.0).is_err());
        assert!(ModelParams::new(1.0, -1.0, 1.0, 1.0).is_err());
        assert!(ModelParams::new(1.0, 1.0, -0.1, 1.0).is_err());
        assert!(ModelParams::new(1.0, 1.0, 0.1, 0.0).is_err());
        assert!(ModelParams::new(1.0, 1.0, f64::NAN, 1.0).is_err());
    }

    #[test]
    fn chart_examples() {
        assert_eq!(spin_to_planar(0.0, 1.3).unwrap(), c(0.0, 0.0));
        let z = spin_to_planar(PI / 2.0, 0.0).unwrap();
        assert!((z - c(1.0, 0.0)).norm() < 1e-15);
        let z = spin_to_planar(PI / 2.0, PI / 2.0).unwrap();
        assert!((z - c(0.0, -1.0)).norm() < 1e-15);
        let s = planar_to_spin(z);
        assert!(s.jx.abs() < 1e-15 && (s.jy - 1.0).abs() < 1e-15 && s.jz.abs() < 1e-15);
        assert!(spin_to_planar(PI, 0.0).is_err());

        let s = planar_to_spin(c(0.0, 0.0));
        assert_eq!((s.jx, s.jy, s.jz), (0.0, 0.0, -1.0));
        let s = planar_to_spin(c(1.0, 0.0));
        assert_eq!((s.jx, s.jy, s.jz), (1.0, 0.0, 0.0));
        let s = planar_to_spin(c(0.5, 0.0));
        assert!((s.jx - 0.8).abs() < 1e-15 && s.jy == 0.0 && (s.jz + 0.6).abs() < 1e-15);
    }

    #[test]
    fn chart_round_trip_on_grid() {
        let mut worst: f64 = 0.0;
        for it in 0..200 {
            let theta = PI * it as f64 / 200.0;
            for ip in 0..64 {
                let phi = 2.0 * PI * ip as f64 / 64.0;
                let z = spin_to_planar(theta, phi).unwrap();
                let s = planar_to_spin(z);
                let (st, ct) = theta.sin_cos();
                // θ measured from the spin-down pole, φ so that jy = sinθ sinφ
                let expect = [st * phi.cos(), st * phi.sin(), -ct];
                worst = worst.max((s.jx - expect[0]).abs()).max((s.jy - expect[1]).abs()).max((s.jz - expect[2]).abs());
                worst = worst.max((s.norm() - 1.0).abs());
                let z2 = spin_to_planar_cartesian(s).unwrap();
                worst = worst.max((z2 - z).norm() / (1.0 + z.norm()));
                let (t2, p2) = planar_to_angles(z);
                worst = worst.max((t2 - theta).abs());
                if theta > 0.0 {
                    let dphi = (p2 - phi).rem_euclid(2.0 * PI);
                    worst = worst.max(dphi.min(2.0 * PI - dphi));
                }
            }
        }
        assert!(worst < 1e-12, "{worst}");
    }

    #[test]
    fn stationary_energies() {
        assert_eq!(stationary_solutions(0.5).len(), 1);
        assert_eq!(stationary_solutions(1.0).len(), 1);
        let s = stationary_solutions(2.0);
        assert_eq!(s.len(), 3);
        assert!((s[0].state.z.re - (1.0f64 / 3.0).sqrt()).abs() < 1e-15);
        assert!((s[0].state.alpha_bar.re + 3f64.sqrt() / 2.0).abs() < 1e-15);
        assert_eq!(s[1].state, parity(&s[0].state));
        assert!(!s[2].stable);
        for k in [1.1, 2.0, 3.7, 10.0] {
            let s = stationary_solutions(k);
            for st in &s[..2] {
                assert!((st.state.energy(k) - ground_energy(k)).abs() < 1e-12);
            }
        }
        assert!((classical_energy(&s[0].state, 2.0) + 1.25).abs() < 1e-14);
        assert_eq!(classical_energy(&ClassicalState::new(c(0.0, 0.0), c(0.0, 0.0)), 3.0), -1.0);
    }
}
