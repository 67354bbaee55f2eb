//! Automatic choice of the boson cutoff.

use num_complex::Complex64 as C64;

use super::basis::BasisSpec;
use super::eigen::ground_state;
use super::operators::build_hamiltonian;
use super::states::{boson_cutoff_for, StateVector};
use crate::error::{Error, Result};
use crate::model::ModelParams;

pub const MAX_AUTO_N_MAX: usize = 1 << 14;

/// Fraction of the top boson levels inspected for leaked weight.
const TOP_FRACTION: f64 = 0.25;

/// Weight of `psi` in the top quarter of the kept boson levels.
pub fn top_level_weight(psi: &StateVector) -> f64 {
    let n_max = psi.basis.n_max();
    let from = ((1.0 - TOP_FRACTION) * n_max as f64).floor() as usize;
    psi.boson_tail(from)
}

/// Starting guess `max(16, 4 j κ Δ / Ω)`.
pub fn initial_n_max(params: &ModelParams) -> usize {
    let guess = 4.0 * params.j * params.kappa() * params.delta / params.omega;
    16usize.max(guess.ceil() as usize)
}

/// Smallest doubling of [`initial_n_max`] for which both the coherent
/// state `|α⟩` (if given) and the ground state leave less than `tol` of
/// their weight in the top boson levels.
pub fn auto_n_max(params: &ModelParams, alpha: Option<C64>, tol: f64) -> Result<usize> {
    let mut n_max = initial_n_max(params);
    if let Some(a) = alpha {
        n_max = n_max.max(boson_cutoff_for(a, tol));
    }
    loop {
        if n_max > MAX_AUTO_N_MAX {
            return Err(Error::CutoffTooSmall { required: n_max, reason: "automatic cutoff exceeded its ceiling".into() });
        }
        let basis = BasisSpec::new(params.j, n_max)?;
        let h = build_hamiltonian(params, &basis)?;
        let (_, gs) = ground_state(&h, &basis)?;
        let coherent_ok = alpha.is_none_or(|a| boson_cutoff_for(a, tol) <= n_max);
        if coherent_ok && top_level_weight(&gs) < tol {
            return Ok(n_max);
        }
        n_max *= 2;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn doubling_cutoff_leaves_ground_energy() {
        for (k, j) in [(0.5, 5.0), (2.0, 4.0), (0.95, 3.0)] {
            let p = ModelParams::from_kappa(k, 1.0, 1.0, j).unwrap();
            let n = auto_n_max(&p, None, 1e-8).unwrap();
            let e = |n_max: usize| {
                let b = BasisSpec::new(j, n_max).unwrap();
                ground_state(&build_hamiltonian(&p, &b).unwrap(), &b).unwrap().0
            };
            let (e1, e2) = (e(n), e(2 * n));
            assert!((e1 - e2).abs() < 1e-10, "k={k} j={j} n={n}: {e1} vs {e2}");
        }
    }

    #[test]
    fn coherent_amplitude_raises_cutoff() {
        let p = ModelParams::from_kappa(0.5, 1.0, 1.0, 2.0).unwrap();
        let n = auto_n_max(&p, Some(C64::new(6.0, 0.0)), 1e-8).unwrap();
        assert!(n >= boson_cutoff_for(C64::new(6.0, 0.0), 1e-8));
    }
}
