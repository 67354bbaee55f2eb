//! Spin covariance and the minimal spin variance `ΔJ∥`.

use nalgebra::{DMatrix, Matrix3, SymmetricEigen, Vector3};
use num_complex::Complex64 as C64;

use crate::quantum::operators::jplus_elem;
use crate::quantum::states::{inner, StateVector};

/// `(Jx ψ, Jy ψ, Jz ψ)` acting on the spin factor of every boson level.
fn spin_images(psi: &StateVector) -> [Vec<C64>; 3] {
    let b = &psi.basis;
    let (d, j) = (b.spin_dim(), b.j());
    let n = psi.amps.len();
    let mut jx = vec![C64::new(0.0, 0.0); n];
    let mut jy = vec![C64::new(0.0, 0.0); n];
    let mut jz = vec![C64::new(0.0, 0.0); n];
    for (base, block) in psi.amps.chunks(d).enumerate().map(|(l, c)| (l * d, c)) {
        for k in 0..d {
            let m = b.m(k);
            let x = block[k];
            jz[base + k] = x * m;
            if k + 1 < d {
                // J+ |k⟩ → |k+1⟩
                let up = x * jplus_elem(j, m);
                jx[base + k + 1] += up * 0.5;
                jy[base + k + 1] += up * C64::new(0.0, -0.5);
            }
            if k > 0 {
                let down = x * jplus_elem(j, m - 1.0);
                jx[base + k - 1] += down * 0.5;
                jy[base + k - 1] += down * C64::new(0.0, 0.5);
            }
        }
    }
    [jx, jy, jz]
}

/// `⟨J⟩` and `Δ_kl = ½⟨J_k J_l + J_l J_k⟩ - ⟨J_k⟩⟨J_l⟩`.
pub fn spin_covariance(psi: &StateVector) -> (Vector3<f64>, Matrix3<f64>) {
    let img = spin_images(psi);
    let mean = Vector3::from_fn(|k, _| inner(&psi.amps, &img[k]).re);
    // ½⟨{J_k, J_l}⟩ = Re ⟨J_k ψ | J_l ψ⟩ for Hermitian J
    let cov = Matrix3::from_fn(|k, l| inner(&img[k], &img[l]).re - mean[k] * mean[l]);
    (mean, 0.5 * (cov + cov.transpose()))
}

/// Smallest eigenvalue of the covariance matrix: the spin variance
/// minimized over directions.
pub fn spin_variance(psi: &StateVector) -> f64 {
    let (_, cov) = spin_covariance(psi);
    SymmetricEigen::new(cov).eigenvalues.min()
}

/// [`spin_variance`] divided by `j²`.
pub fn spin_variance_normalized(psi: &StateVector) -> f64 {
    spin_variance(psi) / psi.basis.j().powi(2)
}

/// `exp(-i angle n·J)` on the spin factor, `n` a unit vector.
pub fn spin_rotation(two_j: usize, axis: [f64; 3], angle: f64) -> DMatrix<C64> {
    let d = two_j + 1;
    let j = two_j as f64 / 2.0;
    let norm = (axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]).sqrt();
    let n = [axis[0] / norm, axis[1] / norm, axis[2] / norm];
    let mut gen = DMatrix::<C64>::zeros(d, d);
    for k in 0..d {
        let m = k as f64 - j;
        gen[(k, k)] = C64::new(n[2] * m, 0.0);
        if k + 1 < d {
            // ⟨k+1| n·J |k⟩ = ½ (nx - i ny) J+ element
            let e = 0.5 * jplus_elem(j, m);
            gen[(k + 1, k)] = C64::new(n[0] * e, -n[1] * e);
            gen[(k, k + 1)] = C64::new(n[0] * e, n[1] * e);
        }
    }
    let eig = SymmetricEigen::new(gen);
    let phases = DMatrix::<C64>::from_diagonal(&eig.eigenvalues.map(|l| C64::from_polar(1.0, -angle * l)));
    &eig.eigenvectors * phases * eig.eigenvectors.adjoint()
}

/// Apply a spin-only unitary to every boson level of `psi`.
pub fn rotate_spin(psi: &StateVector, u: &DMatrix<C64>) -> StateVector {
    let d = psi.basis.spin_dim();
    assert_eq!(u.nrows(), d);
    let mut amps = Vec::with_capacity(psi.amps.len());
    for block in psi.amps.chunks(d) {
        for r in 0..d {
            amps.push((0..d).map(|c| u[(r, c)] * block[c]).sum());
        }
    }
    StateVector { basis: psi.basis, amps }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::basis::BasisSpec;
    use crate::quantum::operators::build_spin_ops;
    use crate::quantum::states::coherent_product_state;

    #[test]
    fn covariance_matches_sparse_operators() {
        let b = BasisSpec::new(1.5, 5).unwrap();
        let s = build_spin_ops(&b);
        let amps: Vec<C64> = (0..b.dim()).map(|i| C64::new((i as f64 * 0.37).sin(), (i as f64 * 0.11).cos())).collect();
        let mut psi = StateVector::new(b, amps).unwrap();
        psi.normalize();
        let (mean, cov) = spin_covariance(&psi);
        let ops = [&s.jx, &s.jy, &s.jz];
        for k in 0..3 {
            assert!((mean[k] - psi.expectation(ops[k]).re).abs() < 1e-13);
            for l in 0..3 {
                let anti = ops[k].matmul(ops[l]).add_scaled(&ops[l].matmul(ops[k]), C64::new(1.0, 0.0));
                let v = 0.5 * psi.expectation(&anti).re - mean[k] * mean[l];
                assert!((cov[(k, l)] - v).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn coherent_states_have_zero_variance() {
        let b = BasisSpec::new(7.0, 10).unwrap();
        for z in [C64::new(0.0, 0.0), C64::new(0.4, 1.3), C64::new(-3.0, 0.2)] {
            let psi = coherent_product_state(C64::new(0.7, 0.0), z, &b, 1e-8).unwrap();
            assert!(spin_variance(&psi).abs() < 1e-10);
        }
    }

    #[test]
    fn rotation_is_unitary_and_rotates_coherent_states() {
        let u = spin_rotation(4, [0.3, -0.5, 0.8], 1.1);
        let id = &u * u.adjoint();
        for r in 0..5 {
            for c in 0..5 {
                let e = if r == c { 1.0 } else { 0.0 };
                assert!((id[(r, c)] - C64::new(e, 0.0)).norm() < 1e-13);
            }
        }
        // rotating |j,-j⟩ about y by π gives |j,j⟩ up to phase
        let b = BasisSpec::new(2.0, 1).unwrap();
        let psi = StateVector::basis_state(b, 0, 0);
        let out = rotate_spin(&psi, &spin_rotation(4, [0.0, 1.0, 0.0], std::f64::consts::PI));
        assert!((out.amps[4].norm() - 1.0).abs() < 1e-12);
    }
}
