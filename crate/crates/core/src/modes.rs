//! Collective modes: small oscillations around the stable stationary state.
//!
//! Linearizing the equations of motion in the variables
//! `(Re δᾱ, i Im δᾱ, Re δz, i Im δz)` gives `i d/dt x = G x` with
//!
//! ```text
//!     | 0   g1  0   0  |
//! G = | g1  0   g2  0  |
//!     | 0   0   0   g4 |
//!     | g3  0   g4  0  |
//! ```
//!
//! whose eigenvalues are `±ω₋`, `±ω₊`. The response of `Jx` to a small spin
//! rotation is `w₋ cos ω₋t + w₊ cos ω₊t`.

use std::f64::consts::{FRAC_PI_4, PI};

use crate::model::{stationary_solutions, ClassicalState};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GLinMatrix {
    pub g1: f64,
    pub g2: f64,
    pub g3: f64,
    pub g4: f64,
}

impl GLinMatrix {
    pub fn to_matrix(&self) -> [[f64; 4]; 4] {
        let GLinMatrix { g1, g2, g3, g4 } = *self;
        [[0.0, g1, 0.0, 0.0], [g1, 0.0, g2, 0.0], [0.0, 0.0, 0.0, g4], [g3, 0.0, g4, 0.0]]
    }

    /// Parameters for linearization around an arbitrary stationary state
    /// with real `z_s`, `ᾱ_s`.
    pub fn at_state(s: &ClassicalState, kappa: f64, omega: f64, delta: f64) -> Self {
        let z = s.z.re;
        let a = s.alpha_bar.re;
        let z2 = z * z;
        Self {
            g1: omega,
            g2: omega * 2.0 * (1.0 - z2) / ((1.0 + z2) * (1.0 + z2)),
            g3: delta * 0.5 * kappa * (1.0 - z2),
            g4: delta * (1.0 - kappa * a * z),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeResult {
    pub omega_minus: f64,
    pub omega_plus: f64,
    pub w_minus: f64,
    pub w_plus: f64,
    pub beta: f64,
}

pub fn glin_matrix(kappa: f64, omega: f64, delta: f64) -> GLinMatrix {
    if kappa <= 1.0 {
        GLinMatrix { g1: omega, g2: 2.0 * omega, g3: 0.5 * delta * kappa, g4: delta }
    } else {
        GLinMatrix {
            g1: omega,
            g2: omega * (kappa + 1.0) / (kappa * kappa),
            g3: delta * kappa / (kappa + 1.0),
            g4: delta * kappa,
        }
    }
}

/// `(ω₋, ω₊)`. The soft mode is evaluated through the product of the two
/// roots, `ω₋² ω₊² = g1 g4 (g1 g4 - g2 g3)`, so it stays accurate near `κ = 1`.
pub fn mode_frequencies(kappa: f64, omega: f64, delta: f64) -> (f64, f64) {
    let g = glin_matrix(kappa, omega, delta);
    let (w1, w4) = (g.g1 * g.g1, g.g4 * g.g4);
    let disc = (0.25 * (w1 - w4) * (w1 - w4) + g.g1 * g.g2 * g.g3 * g.g4).sqrt();
    let wp2 = 0.5 * (w1 + w4) + disc;
    if kappa == 1.0 {
        return (0.0, wp2.sqrt());
    }
    // g1 g4 - g2 g3 in closed form per branch, free of cancellation
    let gap = if kappa < 1.0 { omega * delta * (1.0 - kappa) } else { omega * delta * (kappa * kappa - 1.0) / kappa };
    let wm2 = g.g1 * g.g4 * gap / wp2;
    (wm2.max(0.0).sqrt(), wp2.sqrt())
}

/// `(w₋, w₊, β)` with `w₋ = cos²β`, `β ∈ [0, π/2]`.
pub fn mode_weights(kappa: f64, omega: f64, delta: f64) -> (f64, f64, f64) {
    let g = glin_matrix(kappa, omega, delta);
    let beta = if kappa < 1.0 && omega == delta {
        FRAC_PI_4
    } else {
        let num = 2.0 * (g.g1 * g.g2 * g.g3 * g.g4).sqrt();
        0.5 * num.atan2(g.g1 * g.g1 - g.g4 * g.g4)
    };
    let (s, c) = beta.sin_cos();
    (c * c, s * s, beta)
}

pub fn collective_modes(kappa: f64, omega: f64, delta: f64) -> ModeResult {
    let (omega_minus, omega_plus) = mode_frequencies(kappa, omega, delta);
    let (w_minus, w_plus, beta) = mode_weights(kappa, omega, delta);
    ModeResult { omega_minus, omega_plus, w_minus, w_plus, beta }
}

/// `δJx(t) / δJx(0)` in linear order.
pub fn linear_response_jx(t: f64, kappa: f64, omega: f64, delta: f64) -> f64 {
    let m = collective_modes(kappa, omega, delta);
    m.w_minus * (m.omega_minus * t).cos() + m.w_plus * (m.omega_plus * t).cos()
}

/// Delta-peak decomposition of the Fourier-transformed response:
/// `(±ω₋, πw₋)` and `(±ω₊, πw₊)`, ordered by frequency.
pub fn response_spectrum(kappa: f64, omega: f64, delta: f64) -> [(f64, f64); 4] {
    let m = collective_modes(kappa, omega, delta);
    [
        (-m.omega_plus, PI * m.w_plus),
        (-m.omega_minus, PI * m.w_minus),
        (m.omega_minus, PI * m.w_minus),
        (m.omega_plus, PI * m.w_plus),
    ]
}

/// The stable stationary state that the linear response refers to
/// (`z₊, ᾱ₊` above the transition).
pub fn reference_state(kappa: f64) -> ClassicalState {
    stationary_solutions(kappa)[0].state
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classical::ClassicalSystem;
    use nalgebra::Matrix4;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn glin_examples() {
        assert_eq!(glin_matrix(0.0, 1.0, 1.0), GLinMatrix { g1: 1.0, g2: 2.0, g3: 0.0, g4: 1.0 });
        // at κ = 1 the upper branch formulas give the same matrix
        let k = 1.0f64;
        let upper = GLinMatrix { g1: 1.0, g2: (k + 1.0) / (k * k), g3: k / (k + 1.0), g4: k };
        assert_eq!(glin_matrix(1.0, 1.0, 1.0), upper);
        assert_eq!(upper, GLinMatrix { g1: 1.0, g2: 2.0, g3: 0.5, g4: 1.0 });
        let g = glin_matrix(2.0, 1.0, 1.0);
        assert!(close(g.g2, 0.75, 1e-15) && close(g.g3, 2.0 / 3.0, 1e-15) && g.g4 == 2.0);
        assert!(g.g1 * g.g4 > g.g2 * g.g3);
    }

    #[test]
    fn general_form_matches_branches() {
        for k in [0.0, 0.3, 0.99, 1.01, 2.0, 4.0] {
            let s = reference_state(k);
            let a = GLinMatrix::at_state(&s, k, 0.8, 1.3);
            let b = glin_matrix(k, 0.8, 1.3);
            for (x, y) in [(a.g1, b.g1), (a.g2, b.g2), (a.g3, b.g3), (a.g4, b.g4)] {
                assert!(close(x, y, 1e-13), "{k}: {a:?} vs {b:?}");
            }
        }
    }

    #[test]
    fn frequency_examples() {
        assert_eq!(mode_frequencies(1.0, 1.0, 1.0).0, 0.0);
        let (m, p) = mode_frequencies(0.5, 1.0, 1.0);
        assert!(close(p * p, 1.0 + 0.5f64.sqrt(), 1e-14) && close(m * m, 1.0 - 0.5f64.sqrt(), 1e-14));
        assert!(close(p, 1.30656, 1e-5) && close(m, 0.54120, 1e-5));
        let (m, p) = mode_frequencies(2.0, 1.0, 1.0);
        assert!(close(p * p, 2.5 + 3.25f64.sqrt(), 1e-14) && close(m * m, 2.5 - 3.25f64.sqrt(), 1e-14));
        assert!(close(p, 2.07432, 1e-5) && close(m, 0.83500, 1e-5));
        let (m, p) = mode_frequencies(0.95, 1.0, 1.0);
        assert!(close(m, (1.0 - 0.95f64.sqrt()).sqrt(), 1e-14) && close(p, (1.0 + 0.95f64.sqrt()).sqrt(), 1e-14));
    }

    #[test]
    fn continuity_across_transition() {
        for (om, de) in [(1.0, 1.0), (0.8, 1.0), (1.2, 1.0)] {
            let a = mode_frequencies(1.0 - 1e-9, om, de);
            let b = mode_frequencies(1.0 + 1e-9, om, de);
            assert!(close(a.0, b.0, 1e-4) && close(a.1, b.1, 1e-6));
        }
    }

    /// Weight oracle from the moments of the response: `Σw = 1` and
    /// `Σ w ω² = g4²` (second derivative of `x3` at t = 0).
    fn moment_weights(k: f64, om: f64, de: f64) -> (f64, f64) {
        let g = glin_matrix(k, om, de);
        let (m, p) = mode_frequencies(k, om, de);
        let (m2, p2) = (m * m, p * p);
        ((p2 - g.g4 * g.g4) / (p2 - m2), (g.g4 * g.g4 - m2) / (p2 - m2))
    }

    #[test]
    fn weights_match_moment_oracle() {
        for (om, de) in [(1.0, 1.0), (0.8, 1.0), (1.2, 1.0), (0.5, 2.0)] {
            for i in 0..=100 {
                let k = 0.05 * i as f64;
                if k == 1.0 || (k == 0.0 && om == de) {
                    continue;
                }
                let (wm, wp, beta) = mode_weights(k, om, de);
                assert!((0.0..=std::f64::consts::FRAC_PI_2).contains(&beta));
                assert!(close(wm + wp, 1.0, 1e-14));
                let (om_, op_) = moment_weights(k, om, de);
                assert!(close(wm, om_, 1e-9) && close(wp, op_, 1e-9), "k={k} om={om}: {wm} vs {om_}");
            }
        }
    }

    #[test]
    fn weight_limits() {
        let (wm, wp, _) = mode_weights(0.5, 1.0, 1.0);
        assert!(close(wm, 0.5, 1e-15) && close(wp, 0.5, 1e-15));
        let (wm, _, _) = mode_weights(1e-8, 1.2, 1.0);
        assert!(wm > 1.0 - 1e-6);
        assert!(close(mode_frequencies(1e-8, 1.2, 1.0).0, 1.0, 1e-6));
        let (_, wp, _) = mode_weights(1e-8, 0.8, 1.0);
        assert!(wp > 1.0 - 1e-6);
        let (_, wp, _) = mode_weights(10.0, 1.0, 1.0);
        assert!(wp > 0.9);
    }

    #[test]
    fn linear_response_basics() {
        assert!(close(linear_response_jx(0.0, 0.7, 1.3, 0.9), 1.0, 1e-15));
        for t in [0.0, 0.3, 2.0, 17.5] {
            assert!(close(linear_response_jx(t, 0.0, 1.0, 1.0), t.cos(), 1e-15));
        }
        let sp = response_spectrum(0.0, 1.0, 1.0);
        let total: f64 = sp.iter().map(|p| p.1).sum();
        assert!(close(total, 2.0 * PI, 1e-14));
        assert!(close(sp[0].1, sp[3].1, 0.0) && close(sp[1].1, sp[2].1, 0.0));
        assert_eq!(sp[2].0, -sp[1].0);
    }

    #[test]
    fn frequencies_are_eigenvalues() {
        for i in 0..=200 {
            let k = 5.0 * i as f64 / 200.0;
            let (m, p) = mode_frequencies(k, 1.0, 1.0);
            // G has real eigenvalues ±ω±
            let g = glin_matrix(k, 1.0, 1.0).to_matrix();
            let gm = Matrix4::from_fn(|r, c| g[r][c]);
            let mut ev: Vec<f64> = gm.complex_eigenvalues().iter().map(|e| e.re.abs()).collect();
            ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
            assert!(close(ev[3], p, 1e-10) && close(ev[2], p, 1e-10));
            // the soft mode eigenvalue pair is ill-conditioned near κ = 1 (a
            // double root at zero), compare squares there
            assert!(close(ev[1] * ev[1], m * m, 1e-10), "k={k}: {} vs {m}", ev[1]);

            // the Jacobian of the flow at the stationary state has eigenvalues ∓iω±
            let sys = ClassicalSystem::new(k, 1.0, 1.0).unwrap();
            let jac = sys.eom_jacobian(&reference_state(k));
            let jm = Matrix4::from_fn(|r, c| jac[r][c]);
            let mut im: Vec<f64> = jm.complex_eigenvalues().iter().map(|e| e.im).filter(|v| *v >= 0.0).collect();
            im.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let top = im.last().copied().unwrap();
            assert!(close(top, p, 1e-10), "k={k}: {top} vs {p}");
        }
    }
}
