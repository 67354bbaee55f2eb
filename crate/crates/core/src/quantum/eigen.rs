//! Ground state, interior eigenpairs and spectral bounds of the Hamiltonian.

use nalgebra::SymmetricEigen;
use num_complex::Complex64 as C64;

use super::basis::BasisSpec;
use super::lanczos::{build_krylov, dot, extremal_ritz, lowest_eigenpair};
use super::sparse::SparseOperator;
use super::states::StateVector;
use crate::error::{invalid, Error, Result};

/// Eigenvalues with real eigenvectors.
type Pairs = Vec<(f64, Vec<f64>)>;

/// Dimension up to which interior eigenpairs come from dense diagonalization.
pub const DENSE_MAX_DIM: usize = 2000;
pub const GROUND_TOL: f64 = 1e-10;
pub const EIGEN_TOL: f64 = 1e-8;
/// Relative widening applied to Lanczos spectral bounds on each side.
pub const BOUNDS_MARGIN: f64 = 0.01;

fn require_real_hermitian(h: &SparseOperator) -> Result<()> {
    if !h.is_real() || !h.is_hermitian_flagged() {
        return Err(invalid("H", "expected a real symmetric operator"));
    }
    Ok(())
}

fn to_state(basis: &BasisSpec, x: &[f64]) -> StateVector {
    StateVector { basis: *basis, amps: x.iter().map(|&v| C64::new(v, 0.0)).collect() }
}

fn residual(h: &SparseOperator, x: &[f64], e: f64) -> f64 {
    let mut hx = vec![0.0; x.len()];
    h.apply_real(x, &mut hx);
    hx.iter().zip(x).map(|(a, b)| (a - e * b).powi(2)).sum::<f64>().sqrt()
}

/// Ground state by restarted Lanczos.
///
/// The start vector is uniform over the even-parity basis states. The
/// ground state of the Dicke Hamiltonian is parity even, and restricting
/// the Krylov space to that sector avoids stalling on the exponentially
/// small splitting of the parity doublet above the transition.
pub fn ground_state(h: &SparseOperator, basis: &BasisSpec) -> Result<(f64, StateVector)> {
    ground_state_with_tol(h, basis, GROUND_TOL)
}

pub fn ground_state_with_tol(h: &SparseOperator, basis: &BasisSpec, tol: f64) -> Result<(f64, StateVector)> {
    require_real_hermitian(h)?;
    if h.dim() != basis.dim() {
        return Err(invalid("basis", "dimension does not match the operator"));
    }
    let start: Vec<f64> = (0..basis.dim()).map(|i| if basis.parity_of(i) > 0 { 1.0 } else { 0.0 }).collect();
    let mut mv = |x: &[f64], y: &mut [f64]| h.apply_real(x, y);
    let (e, x, _) = lowest_eigenpair(&mut mv, &start, tol, 120, 400)?;
    Ok((e, to_state(basis, &x)))
}

/// `(E_min, E_max)` bracketing the spectrum: extremal Ritz values moved
/// outward by their residuals, then widened by 1% of the width per side.
pub fn spectral_bounds(h: &SparseOperator) -> Result<(f64, f64)> {
    spectral_bounds_with_margin(h, BOUNDS_MARGIN)
}

pub fn spectral_bounds_with_margin(h: &SparseOperator, margin: f64) -> Result<(f64, f64)> {
    require_real_hermitian(h)?;
    let dim = h.dim();
    if dim == 1 {
        let e = h.get(0, 0).re;
        return Ok((e - margin.max(1e-12), e + margin.max(1e-12)));
    }
    // deterministic start vector overlapping both parity sectors
    let start: Vec<f64> = (0..dim).map(|i| 1.0 + 0.5 * (1.7 * i as f64 + 0.3).sin()).collect();
    let mut mv = |x: &[f64], y: &mut [f64]| h.apply_real(x, y);
    let (lo, rlo, hi, rhi) = extremal_ritz(&mut mv, &start, dim.min(400), 1e-10)?;
    // residual estimates can underflow once converged; keep a rounding floor
    let floor = 1e-10 * (hi - lo).abs().max(hi.abs()).max(lo.abs());
    let (lo, hi) = (lo - rlo.max(floor), hi + rhi.max(floor));
    let w = (hi - lo).max(1e-12);
    Ok((lo - margin * w, hi + margin * w))
}

/// The `count` eigenpairs closest to `e_target`, sorted by energy.
pub fn eigenpairs_near(h: &SparseOperator, basis: &BasisSpec, e_target: f64, count: usize) -> Result<Vec<(f64, StateVector)>> {
    require_real_hermitian(h)?;
    if count == 0 {
        return Err(invalid("count", "must be >= 1"));
    }
    let dim = h.dim();
    let count = count.min(dim);
    let mut pairs = if dim <= DENSE_MAX_DIM { dense_near(h, e_target, count) } else { shift_invert_near(h, basis, e_target, count)? };
    pairs.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
    Ok(pairs.into_iter().map(|(e, x)| (e, to_state(basis, &x))).collect())
}

fn dense_near(h: &SparseOperator, e_target: f64, count: usize) -> Pairs {
    let eig = SymmetricEigen::new(h.to_dense_real());
    let mut idx: Vec<usize> = (0..h.dim()).collect();
    idx.sort_by(|&a, &b| {
        let (da, db) = ((eig.eigenvalues[a] - e_target).abs(), (eig.eigenvalues[b] - e_target).abs());
        da.partial_cmp(&db).unwrap().then(a.cmp(&b))
    });
    idx.truncate(count);
    idx.into_iter()
        .map(|i| {
            let v: Vec<f64> = eig.eigenvectors.column(i).iter().copied().collect();
            (eig.eigenvalues[i], v)
        })
        .collect()
}

/// Shift-invert Lanczos on each parity sector, using a banded LU of `H - σ`.
fn shift_invert_near(h: &SparseOperator, basis: &BasisSpec, e_target: f64, count: usize) -> Result<Pairs> {
    let mut sigma = e_target;
    let lu = loop {
        match BandedLu::factor(h, sigma) {
            Some(lu) => break lu,
            // exactly singular shift: nudge off the eigenvalue
            None => sigma += 1e-9 * (1.0 + sigma.abs()),
        }
    };
    let dim = h.dim();
    let mut all = Vec::new();
    for sector in [1i8, -1] {
        let mask: Vec<f64> = (0..dim).map(|i| if basis.parity_of(i) == sector { 1.0 } else { 0.0 }).collect();
        let start: Vec<f64> = (0..dim).map(|i| mask[i] * (1.0 + 0.5 * (0.9 * i as f64 + 0.1).sin())).collect();
        let mut op = |x: &[f64], y: &mut [f64]| {
            y.copy_from_slice(x);
            lu.solve_in_place(y);
            for i in 0..y.len() {
                y[i] *= mask[i];
            }
        };
        let mut m = (3 * count + 40).min(dim);
        let mut x0 = start;
        // (pairs, worst residual) of the best restart so far
        let mut best: Option<(Pairs, f64)> = None;
        for _ in 0..8 {
            let kry = build_krylov(&mut op, &x0, m);
            let (vals, y) = kry.ritz();
            let mut order: Vec<usize> = (0..vals.len()).collect();
            order.sort_by(|&a, &b| vals[b].abs().partial_cmp(&vals[a].abs()).unwrap());
            order.truncate(count);
            let mut found = Vec::new();
            let mut worst: f64 = 0.0;
            for &c in &order {
                let x = kry.ritz_vector(&y, c);
                let mut hx = vec![0.0; dim];
                h.apply_real(&x, &mut hx);
                let e = dot(&x, &hx);
                worst = worst.max(residual(h, &x, e));
                found.push((e, x));
            }
            let done = worst < EIGEN_TOL || kry.len() < m;
            if best.as_ref().is_none_or(|b| worst < b.1) {
                best = Some((found, worst));
            }
            if done {
                break;
            }
            // restart from the combination of the wanted Ritz vectors
            let found = &best.as_ref().unwrap().0;
            x0 = vec![0.0; dim];
            for (_, x) in found {
                for i in 0..dim {
                    x0[i] += x[i];
                }
            }
            m = (2 * m).min(dim).min(1200);
        }
        let (found, worst) = best.unwrap();
        if worst >= EIGEN_TOL {
            return Err(Error::NonConvergence { solver: "shift-invert lanczos", iterations: m, residual: worst });
        }
        all.extend(found);
    }
    all.sort_by(|a, b| (a.0 - e_target).abs().partial_cmp(&(b.0 - e_target).abs()).unwrap());
    all.truncate(count);
    Ok(all)
}

/// Ranking of `states` by `|⟨E_n|ψ₀⟩|`, largest first, ties broken by the
/// supplied energies. Returns `(index, |overlap|)`.
pub fn overlap_rank(states: &[StateVector], energies: &[f64], psi0: &StateVector) -> Vec<(usize, f64)> {
    let mut r: Vec<(usize, f64)> = states.iter().enumerate().map(|(i, s)| (i, s.inner(psi0).norm())).collect();
    r.sort_by(|a, b| {
        b.1.partial_cmp(&a.1)
            .unwrap()
            .then_with(|| energies.get(a.0).partial_cmp(&energies.get(b.0)).unwrap())
            .then(a.0.cmp(&b.0))
    });
    r
}

/// LU factorization with partial pivoting of a real banded matrix `H - σ`.
/// Row `i` stores columns `i - p ..= i + 2p` (upper fill from pivoting).
pub struct BandedLu {
    n: usize,
    p: usize,
    w: usize,
    ab: Vec<f64>,
    piv: Vec<usize>,
}

impl BandedLu {
    pub fn factor(h: &SparseOperator, sigma: f64) -> Option<Self> {
        let n = h.dim();
        let p = h.bandwidth();
        let w = 3 * p + 1;
        let mut ab = vec![0.0; n * w];
        let at = |i: usize, j: usize| i * w + (j + p - i);
        for i in 0..n {
            for (j, v) in h.row(i) {
                ab[at(i, j)] = v.re;
            }
            ab[at(i, i)] -= sigma;
        }
        let scale = ab.iter().fold(0.0f64, |a, v| a.max(v.abs())).max(1.0);
        let mut piv = vec![0usize; n];
        for k in 0..n {
            let last = (k + p).min(n - 1);
            let mut r = k;
            let mut best = ab[at(k, k)].abs();
            for i in k + 1..=last {
                let v = ab[at(i, k)].abs();
                if v > best {
                    best = v;
                    r = i;
                }
            }
            if best <= 1e-14 * scale {
                return None;
            }
            piv[k] = r;
            let jmax = (k + 2 * p).min(n - 1);
            if r != k {
                for j in k..=jmax {
                    ab.swap(at(k, j), at(r, j));
                }
            }
            let d = ab[at(k, k)];
            for i in k + 1..=last {
                let l = ab[at(i, k)] / d;
                ab[at(i, k)] = l;
                if l != 0.0 {
                    for j in k + 1..=jmax {
                        ab[at(i, j)] -= l * ab[at(k, j)];
                    }
                }
            }
        }
        Some(Self { n, p, w, ab, piv })
    }

    /// Overwrite `b` with `(H - σ)^{-1} b`.
    pub fn solve_in_place(&self, b: &mut [f64]) {
        let (n, p, w) = (self.n, self.p, self.w);
        let at = |i: usize, j: usize| i * w + (j + p - i);
        for k in 0..n {
            b.swap(k, self.piv[k]);
            let bk = b[k];
            if bk != 0.0 {
                for i in k + 1..=(k + p).min(n - 1) {
                    b[i] -= self.ab[at(i, k)] * bk;
                }
            }
        }
        for i in (0..n).rev() {
            let mut s = b[i];
            for j in i + 1..=(i + 2 * p).min(n - 1) {
                s -= self.ab[at(i, j)] * b[j];
            }
            b[i] = s / self.ab[at(i, i)];
        }
    }
}

/// Norm of `Hψ - Eψ` for a complex state.
pub fn eigen_residual(h: &SparseOperator, psi: &StateVector, e: f64) -> f64 {
    let hx = h.mul_vec(&psi.amps);
    hx.iter().zip(&psi.amps).map(|(a, b)| (a - e * b).norm_sqr()).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::ModelParams;
    use crate::quantum::operators::build_hamiltonian;

    fn setup(kappa: f64, j: f64, n_max: usize) -> (SparseOperator, BasisSpec) {
        let p = ModelParams::from_kappa(kappa, 1.0, 1.0, j).unwrap();
        let b = BasisSpec::new(j, n_max).unwrap();
        (build_hamiltonian(&p, &b).unwrap(), b)
    }

    fn dense_eigs(h: &SparseOperator) -> Vec<f64> {
        let mut e: Vec<f64> = SymmetricEigen::new(h.to_dense_real()).eigenvalues.iter().copied().collect();
        e.sort_by(|a, b| a.partial_cmp(b).unwrap());
        e
    }

    #[test]
    fn banded_lu_solves() {
        let (h, _) = setup(0.7, 2.0, 15);
        let lu = BandedLu::factor(&h, 0.37).unwrap();
        let x: Vec<f64> = (0..h.dim()).map(|i| (i as f64 * 0.31).cos()).collect();
        let mut b = vec![0.0; h.dim()];
        h.apply_real(&x, &mut b);
        for i in 0..h.dim() {
            b[i] -= 0.37 * x[i];
        }
        lu.solve_in_place(&mut b);
        let err = b.iter().zip(&x).map(|(a, c)| (a - c).abs()).fold(0.0, f64::max);
        assert!(err < 1e-10, "{err}");
    }

    #[test]
    fn ground_state_decoupled() {
        let (h, b) = setup(0.0, 3.0, 8);
        let (e, psi) = ground_state(&h, &b).unwrap();
        assert!((e + 3.0).abs() < 1e-12);
        assert!((psi.amps[0].norm() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn ground_state_matches_dense_and_doublet_splitting_shrinks() {
        let mut prev_split = f64::INFINITY;
        for j in [2.0, 4.0, 6.0] {
            let (h, b) = setup(2.0, j, 60);
            let (e, psi) = ground_state(&h, &b).unwrap();
            let d = dense_eigs(&h);
            assert!((e - d[0]).abs() < 1e-9, "{e} vs {}", d[0]);
            assert!(eigen_residual(&h, &psi, e) < 1e-10);
            let split = d[1] - d[0];
            assert!(split < prev_split);
            prev_split = split;
        }
    }

    #[test]
    fn bounds_bracket_dense_spectrum() {
        for (k, j, n) in [(0.5, 1.0, 20), (2.0, 3.0, 30), (0.95, 5.0, 25)] {
            let (h, _) = setup(k, j, n);
            let d = dense_eigs(&h);
            for margin in [0.0, 0.01, 0.1] {
                let (lo, hi) = spectral_bounds_with_margin(&h, margin).unwrap();
                assert!(lo <= d[0] && hi >= *d.last().unwrap(), "{lo} {hi} vs {} {}", d[0], d.last().unwrap());
            }
        }
    }

    #[test]
    fn shift_invert_matches_dense() {
        let (h, b) = setup(0.6, 5.0, 40);
        let dense = dense_near(&h, -2.5, 6);
        let si = shift_invert_near(&h, &b, -2.5, 6).unwrap();
        let mut a: Vec<f64> = dense.iter().map(|p| p.0).collect();
        let mut c: Vec<f64> = si.iter().map(|p| p.0).collect();
        a.sort_by(|x, y| x.partial_cmp(y).unwrap());
        c.sort_by(|x, y| x.partial_cmp(y).unwrap());
        for (x, y) in a.iter().zip(&c) {
            assert!((x - y).abs() < 1e-8, "{x} vs {y}");
        }
    }
}
