//! Hamiltonian and observables on the truncated product basis.

use num_complex::Complex64 as C64;

use super::basis::BasisSpec;
use super::sparse::SparseOperator;
use crate::error::{Error, Result};
use crate::model::ModelParams;

/// Default ceiling on the Hilbert-space dimension.
pub const DEFAULT_MAX_DIM: usize = 4_000_000;

fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

/// `⟨j, m+1| J+ |j, m⟩ = √(j(j+1) - m(m+1))`.
#[inline]
pub fn jplus_elem(j: f64, m: f64) -> f64 {
    (j * (j + 1.0) - m * (m + 1.0)).max(0.0).sqrt()
}

/// `H = Δ Jz + λ (a + a†) Jx + Ω a†a`, real symmetric with at most five
/// entries per row.
pub fn build_hamiltonian(params: &ModelParams, basis: &BasisSpec) -> Result<SparseOperator> {
    build_hamiltonian_with_limit(params, basis, DEFAULT_MAX_DIM)
}

pub fn build_hamiltonian_with_limit(params: &ModelParams, basis: &BasisSpec, max_dim: usize) -> Result<SparseOperator> {
    params.validate()?;
    let dim = basis.dim();
    if dim > max_dim {
        return Err(Error::DimensionOverflow { dim, max: max_dim });
    }
    let j = basis.j();
    let d = basis.spin_dim();
    let mut trip = Vec::with_capacity(5 * dim);
    for n in 0..basis.n_max() {
        for k in 0..d {
            let m = basis.m(k);
            let row = basis.index(n, k);
            trip.push((row, row, re(params.delta * m + params.omega * n as f64)));
            if params.lambda_c == 0.0 {
                continue;
            }
            // λ/2 √(n+1) (J+ + J-) connecting n ↔ n+1
            if n + 1 < basis.n_max() {
                let b = params.lambda_c * 0.5 * ((n + 1) as f64).sqrt();
                if k + 1 < d {
                    let v = b * jplus_elem(j, m);
                    let col = basis.index(n + 1, k + 1);
                    trip.push((row, col, re(v)));
                    trip.push((col, row, re(v)));
                }
                if k > 0 {
                    let v = b * jplus_elem(j, m - 1.0);
                    let col = basis.index(n + 1, k - 1);
                    trip.push((row, col, re(v)));
                    trip.push((col, row, re(v)));
                }
            }
        }
    }
    Ok(SparseOperator::from_triplets(dim, trip, true))
}

pub struct SpinOps {
    pub jx: SparseOperator,
    pub jy: SparseOperator,
    pub jz: SparseOperator,
}

/// Spin operators acting as `1 ⊗ J` on the product basis.
pub fn build_spin_ops(basis: &BasisSpec) -> SpinOps {
    let j = basis.j();
    let d = basis.spin_dim();
    let dim = basis.dim();
    let mut tx = Vec::new();
    let mut ty = Vec::new();
    let mut tz = Vec::new();
    for n in 0..basis.n_max() {
        for k in 0..d {
            let m = basis.m(k);
            let row = basis.index(n, k);
            tz.push((row, row, re(m)));
            if k + 1 < d {
                let v = jplus_elem(j, m);
                let up = basis.index(n, k + 1);
                // J+ |k⟩ = v |k+1⟩ ; Jx = (J+ + J-)/2, Jy = (J+ - J-)/(2i)
                tx.push((up, row, re(0.5 * v)));
                tx.push((row, up, re(0.5 * v)));
                ty.push((up, row, C64::new(0.0, -0.5 * v)));
                ty.push((row, up, C64::new(0.0, 0.5 * v)));
            }
        }
    }
    SpinOps {
        jx: SparseOperator::from_triplets(dim, tx, true),
        jy: SparseOperator::from_triplets(dim, ty, true),
        jz: SparseOperator::from_triplets(dim, tz, true),
    }
}

pub struct BosonOps {
    pub a: SparseOperator,
    pub a_dag: SparseOperator,
    pub n: SparseOperator,
}

/// Boson operators acting as `b ⊗ 1`. On the top kept level
/// `[a, a†] = 1 - n_max` instead of 1.
pub fn build_boson_ops(basis: &BasisSpec) -> BosonOps {
    let d = basis.spin_dim();
    let dim = basis.dim();
    let mut ta = Vec::new();
    let mut tn = Vec::new();
    for n in 0..basis.n_max() {
        for k in 0..d {
            let row = basis.index(n, k);
            tn.push((row, row, re(n as f64)));
            if n > 0 {
                ta.push((basis.index(n - 1, k), row, re((n as f64).sqrt())));
            }
        }
    }
    let a = SparseOperator::from_triplets(dim, ta, false);
    let a_dag = a.adjoint();
    BosonOps { a, a_dag, n: SparseOperator::from_triplets(dim, tn, true) }
}

/// Diagonal of `Π = exp(iπ(a†a + Jz + j))`.
pub fn parity_diagonal(basis: &BasisSpec) -> Vec<f64> {
    (0..basis.dim()).map(|i| basis.parity_of(i) as f64).collect()
}

pub fn parity_operator(basis: &BasisSpec) -> SparseOperator {
    let d: Vec<C64> = parity_diagonal(basis).into_iter().map(re).collect();
    SparseOperator::diagonal(&d, true)
}
