//! Spin Husimi functions.
//!
//! All spin Husimi variants are quadratic forms `ζ† M ζ` of a Hermitian
//! `(2j+1) × (2j+1)` matrix `M` in the coherent-state vector
//! `ζ_k = A_k(θ) e^{ikφ}`, `k = j + m`. For a snapshot `M` is the reduced
//! matrix `R_{kk'} = Σ_n conj(ψ_nk) ψ_nk'`; the time average replaces it
//! by `Σ_n Y_n† C Y_n` with `Y_n` the boson-level blocks of the Chebyshev
//! filtered states.

use nalgebra::DMatrix;
use num_complex::Complex64 as C64;
use rayon::prelude::*;

use super::grid::{GridSpec, HusimiGrid};
use crate::chebyshev::propagate::ChebyshevPropagator;
use crate::chebyshev::timeavg::{default_quad_size, omitted_coefficient, required_order, time_avg_coefficients};
use crate::error::{invalid, Error, Result};
use crate::model::ModelParams;
use crate::quantum::basis::BasisSpec;
use crate::quantum::states::{boson_coherent_amplitudes, spin_coherent_magnitudes, StateVector};

/// Omitted Chebyshev coefficients allowed in a time average.
pub const ORDER_TOL: f64 = 1e-12;
/// Ceiling on stored filtered amplitudes (`(N+1) · dim`) for the
/// coefficient-matrix time average.
pub const MAX_FILTERED_ENTRIES: usize = 60_000_000;

/// `R_{kk'} = Σ_n conj(ψ_nk) ψ_nk'`.
pub fn reduced_matrix(psi: &StateVector) -> DMatrix<C64> {
    let d = psi.basis.spin_dim();
    let mut r = DMatrix::<C64>::zeros(d, d);
    for block in psi.amps.chunks(d) {
        for k in 0..d {
            let ck = block[k].conj();
            for kp in 0..d {
                r[(k, kp)] += ck * block[kp];
            }
        }
    }
    r
}

/// `Q(θ, φ) = ζ† M ζ` on the grid.
///
/// Per `θ` row the band sums `S_Δ = Σ_k A_k A_{k+Δ} M_{k,k+Δ}` are formed
/// once; then `Q = S_0 + 2 Re Σ_{Δ>0} e^{iΔφ} S_Δ`.
pub fn husimi_from_matrix(m: &DMatrix<C64>, two_j: usize, spec: GridSpec) -> HusimiGrid {
    let d = two_j + 1;
    assert_eq!(m.nrows(), d, "matrix size must be 2j+1");
    let mut grid = HusimiGrid::zeros(spec);
    let phis = grid.phi.clone();
    let n_phi = phis.len();
    grid.values.par_chunks_mut(n_phi).zip(grid.theta.par_iter()).for_each(|(row, &theta)| {
        let a = spin_coherent_magnitudes(two_j, theta);
        let bands: Vec<C64> = (0..d)
            .map(|delta| (0..d - delta).map(|k| m[(k, k + delta)] * (a[k] * a[k + delta])).sum())
            .collect();
        for (v, &phi) in row.iter_mut().zip(&phis) {
            let (s, c) = phi.sin_cos();
            let step = C64::new(c, s);
            let mut ph = step;
            let mut q = bands[0].re;
            for b in &bands[1..] {
                q += 2.0 * (ph * b).re;
                ph *= step;
            }
            *v = q;
        }
    });
    grid
}

/// Snapshot spin Husimi `Q(θ, φ) = |⟨θ, φ|ψ⟩|²`, a partial overlap.
pub fn spin_husimi(psi: &StateVector, spec: GridSpec) -> HusimiGrid {
    husimi_from_matrix(&reduced_matrix(psi), psi.basis.two_j(), spec)
}

/// Chebyshev order used for a window `[-T, T]`.
pub fn time_average_order(prop: &ChebyshevPropagator, t_half: f64) -> usize {
    required_order(prop.scale() * t_half, 1e-14)
}

/// `M = (1/2T) ∫_{-T}^{T} R(ψ(t)) dt` via the coefficient matrix.
pub fn time_averaged_matrix(prop: &ChebyshevPropagator, psi0: &StateVector, t_half: f64, order: Option<usize>) -> Result<DMatrix<C64>> {
    if !t_half.is_finite() || t_half < 0.0 {
        return Err(invalid("T", "must be finite and >= 0"));
    }
    let a_t = prop.scale() * t_half;
    let n = order.unwrap_or_else(|| time_average_order(prop, t_half));
    let tail = omitted_coefficient(n, a_t);
    if tail > ORDER_TOL {
        return Err(invalid("order", format!("order {n} leaves coefficients up to {tail:.2e} at aT = {a_t:.3}")));
    }
    let dim = psi0.basis.dim();
    if (n + 1) * dim > MAX_FILTERED_ENTRIES {
        return Err(Error::DimensionOverflow { dim: (n + 1) * dim, max: MAX_FILTERED_ENTRIES });
    }
    let tm = time_avg_coefficients(n, a_t, default_quad_size(n, a_t))?;
    // C is real symmetric: its imaginary part is rounding only
    let c = tm.c.map(|v| v.re);

    // Φᵀ (dim × (N+1)), column p = T_p(H̃)ψ₀, split into real and imaginary parts
    let (mut fr, mut fi) = (DMatrix::<f64>::zeros(dim, n + 1), DMatrix::<f64>::zeros(dim, n + 1));
    let store = |fr: &mut DMatrix<f64>, fi: &mut DMatrix<f64>, p: usize, v: &[C64]| {
        for (i, x) in v.iter().enumerate() {
            fr[(i, p)] = x.re;
            fi[(i, p)] = x.im;
        }
    };
    let zero = C64::new(0.0, 0.0);
    let mut prev = psi0.amps.clone();
    store(&mut fr, &mut fi, 0, &prev);
    if n >= 1 {
        let mut cur = vec![zero; dim];
        prop.apply_scaled(&prev, &mut cur);
        store(&mut fr, &mut fi, 1, &cur);
        let mut next = vec![zero; dim];
        for p in 2..=n {
            prop.apply_scaled(&cur, &mut next);
            for (nx, pv) in next.iter_mut().zip(&prev) {
                *nx = 2.0 * *nx - pv;
            }
            store(&mut fr, &mut fi, p, &next);
            std::mem::swap(&mut prev, &mut cur);
            std::mem::swap(&mut cur, &mut next);
        }
    }
    let gr = &fr * &c;
    let gi = &fi * &c;

    // Column-major dim × (N+1) with row index level·d + k is the same
    // memory as d × (n_max (N+1)); then M = conj(F) Gᵀ.
    let d = psi0.basis.spin_dim();
    let len = dim / d * (n + 1);
    let shape = |m: DMatrix<f64>| m.reshape_generic(nalgebra::Dyn(d), nalgebra::Dyn(len));
    let (fr, fi, gr, gi) = (shape(fr), shape(fi), shape(gr), shape(gi));
    let re = &fr * gr.transpose() + &fi * gi.transpose();
    let im = &fr * gi.transpose() - &fi * gr.transpose();
    Ok(DMatrix::from_fn(d, d, |r, s| C64::new(re[(r, s)], im[(r, s)])))
}

/// Time-averaged spin Husimi over `[-T, T]` from the coefficient matrix.
pub fn time_averaged_husimi(prop: &ChebyshevPropagator, psi0: &StateVector, t_half: f64, order: Option<usize>, spec: GridSpec) -> Result<HusimiGrid> {
    let m = time_averaged_matrix(prop, psi0, t_half, order)?;
    Ok(husimi_from_matrix(&m, psi0.basis.two_j(), spec))
}

/// Gauss–Legendre nodes and weights on `[-1, 1]`.
pub fn gauss_legendre(n: usize) -> (Vec<f64>, Vec<f64>) {
    let mut x = vec![0.0; n];
    let mut w = vec![0.0; n];
    for i in 0..n.div_ceil(2) {
        let mut z = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, 0.0);
            for k in 0..n {
                let p2 = p1;
                p1 = p0;
                p0 = ((2 * k + 1) as f64 * z * p1 - k as f64 * p2) / (k + 1) as f64;
            }
            dp = n as f64 * (z * p0 - p1) / (z * z - 1.0);
            let dz = p0 / dp;
            z -= dz;
            if dz.abs() < 1e-16 {
                break;
            }
        }
        x[i] = -z;
        x[n - 1 - i] = z;
        w[i] = 2.0 / ((1.0 - z * z) * dp * dp);
        w[n - 1 - i] = w[i];
    }
    (x, w)
}

/// Time average from `samples` Gauss–Legendre snapshots. Memory stays
/// at a few state vectors, so this serves sizes where the filtered
/// states of the coefficient-matrix route do not fit.
pub fn time_averaged_matrix_sampled(prop: &ChebyshevPropagator, psi0: &StateVector, t_half: f64, samples: usize) -> Result<DMatrix<C64>> {
    if samples == 0 {
        return Err(invalid("samples", "must be >= 1"));
    }
    let (x, w) = gauss_legendre(samples);
    let times: Vec<f64> = x.iter().map(|v| v * t_half).collect();
    let states = prop.propagate_series(psi0, &times)?;
    let d = psi0.basis.spin_dim();
    let mut m = DMatrix::<C64>::zeros(d, d);
    for (s, wi) in states.iter().zip(&w) {
        m += reduced_matrix(s) * C64::new(0.5 * wi, 0.0);
    }
    Ok(m)
}

/// Overlap with the product coherent state `|α; θ, φ⟩` restricted to the
/// section `Q = 0`: `P = +√(2(E - jz)/κ)` with `jz = -cos θ`, and
/// `α = (jλ/Ω) iP`. Nodes with `E < jz` are masked with NaN.
pub fn poincare_husimi(psi: &StateVector, energy: f64, params: &ModelParams, spec: GridSpec) -> Result<HusimiGrid> {
    let kappa = params.kappa();
    if kappa <= 0.0 {
        return Err(invalid("kappa", "the section momentum needs kappa > 0"));
    }
    if (params.j - psi.basis.j()).abs() > 1e-12 {
        return Err(invalid("params", "spin length does not match the state's basis"));
    }
    let basis: BasisSpec = psi.basis;
    let (d, n_max, two_j) = (basis.spin_dim(), basis.n_max(), basis.two_j());
    let scale = params.alpha_scale();
    let mut grid = HusimiGrid::zeros(spec);
    let phis = grid.phi.clone();
    let n_phi = phis.len();
    grid.values.par_chunks_mut(n_phi).zip(grid.theta.par_iter()).for_each(|(row, &theta)| {
        let jz = -theta.cos();
        let p2 = 2.0 * (energy - jz) / kappa;
        if p2 < 0.0 {
            row.iter_mut().for_each(|v| *v = f64::NAN);
            return;
        }
        let alpha = C64::new(0.0, scale * p2.sqrt());
        let b = boson_coherent_amplitudes(alpha, n_max);
        // v_k = Σ_n conj(b_n) ψ_nk
        let mut v = vec![C64::new(0.0, 0.0); d];
        for (bn, block) in b.iter().zip(psi.amps.chunks(d)) {
            let cb = bn.conj();
            for (vk, x) in v.iter_mut().zip(block) {
                *vk += cb * x;
            }
        }
        let a = spin_coherent_magnitudes(two_j, theta);
        let av: Vec<C64> = a.iter().zip(&v).map(|(ak, vk)| vk * *ak).collect();
        for (out, &phi) in row.iter_mut().zip(&phis) {
            let step = C64::from_polar(1.0, phi);
            // Horner in e^{iφ}
            let mut s = C64::new(0.0, 0.0);
            for x in av.iter().rev() {
                s = s * step + x;
            }
            *out = s.norm_sqr();
        }
    });
    Ok(grid)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::spin_to_planar;
    use crate::quantum::operators::build_hamiltonian;
    use crate::quantum::states::coherent_product_state;
    use std::f64::consts::PI;

    #[test]
    fn coherent_state_peaks_at_its_angles() {
        let b = BasisSpec::new(5.0, 20).unwrap();
        let (t0, p0) = (PI * 60.0 / 180.0, 2.0 * PI * 100.0 / 360.0);
        let z = spin_to_planar(t0, p0).unwrap();
        let psi = coherent_product_state(C64::new(1.0, 0.5), z, &b, 1e-10).unwrap();
        let g = spin_husimi(&psi, GridSpec::new(181, 360).unwrap());
        let (v, t, p) = g.max().unwrap();
        assert!((v - 1.0).abs() < 1e-9);
        assert!((t - t0).abs() < 1e-9 && (p - p0).abs() < 1e-9);
        assert!(g.values.iter().all(|&x| (-1e-12..=1.0 + 1e-12).contains(&x)));
    }

    #[test]
    fn spin_down_state_is_binomial() {
        let b = BasisSpec::new(3.0, 4).unwrap();
        let psi = StateVector::basis_state(b, 0, 0);
        let g = spin_husimi(&psi, GridSpec::new(37, 12).unwrap());
        for (i, &t) in g.theta.iter().enumerate() {
            let expect = (0.5 * t).cos().powi(12);
            for k in 0..12 {
                assert!((g.get(i, k) - expect).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn resolution_of_identity() {
        let b = BasisSpec::new(10.0, 12).unwrap();
        let z = spin_to_planar(1.1, 4.0).unwrap();
        let psi = coherent_product_state(C64::new(0.3, 0.0), z, &b, 1e-8).unwrap();
        let g = spin_husimi(&psi, GridSpec::new(256, 256).unwrap());
        assert!((g.normalization(10.0) - 1.0).abs() < 1e-3);
    }

    #[test]
    fn zero_window_equals_snapshot() {
        let p = ModelParams::from_kappa(0.6, 1.0, 1.0, 2.0).unwrap();
        let b = BasisSpec::new(2.0, 24).unwrap();
        let h = build_hamiltonian(&p, &b).unwrap();
        let prop = ChebyshevPropagator::new(&h).unwrap();
        let psi = coherent_product_state(C64::new(0.5, 0.8), C64::new(0.2, -0.7), &b, 1e-8).unwrap();
        let spec = GridSpec::new(31, 40).unwrap();
        let avg = time_averaged_husimi(&prop, &psi, 0.0, None, spec).unwrap();
        let snap = spin_husimi(&psi, spec);
        let err = avg.values.iter().zip(&snap.values).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(err < 1e-10);
    }

    #[test]
    fn matrix_and_sampled_averages_agree() {
        let p = ModelParams::from_kappa(0.6, 1.0, 1.0, 1.5).unwrap();
        let b = BasisSpec::new(1.5, 20).unwrap();
        let h = build_hamiltonian(&p, &b).unwrap();
        let prop = ChebyshevPropagator::new(&h).unwrap();
        let psi = coherent_product_state(C64::new(0.4, 0.3), C64::new(0.6, 0.1), &b, 1e-8).unwrap();
        let m1 = time_averaged_matrix(&prop, &psi, 2.0, None).unwrap();
        let m2 = time_averaged_matrix_sampled(&prop, &psi, 2.0, 120).unwrap();
        let err = (&m1 - &m2).iter().map(|v| v.norm()).fold(0.0, f64::max);
        assert!(err < 1e-9, "{err}");
        assert!((m1.trace().re - 1.0).abs() < 1e-10);
        assert!(time_averaged_matrix(&prop, &psi, 2.0, Some(3)).is_err());
    }

    #[test]
    fn gauss_legendre_integrates_polynomials() {
        let (x, w) = gauss_legendre(7);
        assert!((w.iter().sum::<f64>() - 2.0).abs() < 1e-14);
        let i: f64 = x.iter().zip(&w).map(|(x, w)| w * x.powi(12)).sum();
        assert!((i - 2.0 / 13.0).abs() < 1e-14);
    }

    #[test]
    fn poincare_husimi_of_vacuum() {
        let j = 3.0;
        let p = ModelParams::from_kappa(0.6, 1.0, 1.0, j).unwrap();
        let b = BasisSpec::new(j, 40).unwrap();
        let psi = StateVector::basis_state(b, 0, 0);
        let e = -0.5;
        let g = poincare_husimi(&psi, e, &p, GridSpec::new(91, 8).unwrap()).unwrap();
        for (i, &t) in g.theta.iter().enumerate() {
            let jz = -t.cos();
            if e < jz {
                assert!(g.get(i, 0).is_nan());
                continue;
            }
            let alpha2 = p.alpha_scale().powi(2) * 2.0 * (e - jz) / 0.6;
            let expect = (-alpha2).exp() * (0.5 * t).cos().powi(4 * 3);
            for k in 0..8 {
                assert!((g.get(i, k) - expect).abs() < 1e-13);
            }
        }
    }
}
