//! State vectors and coherent states.
//!
//! Coherent amplitudes are built in log space so that large spins and
//! boson numbers neither overflow nor underflow prematurely.

use num_complex::Complex64 as C64;

use super::basis::BasisSpec;
use super::sparse::SparseOperator;
use crate::error::{invalid, Error, Result};

/// Default ceiling for the discarded coherent-state weight.
pub const DEFAULT_TAIL_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    pub basis: BasisSpec,
    pub amps: Vec<C64>,
}

impl StateVector {
    pub fn new(basis: BasisSpec, amps: Vec<C64>) -> Result<Self> {
        if amps.len() != basis.dim() {
            return Err(invalid("amps", format!("length {} does not match dimension {}", amps.len(), basis.dim())));
        }
        Ok(Self { basis, amps })
    }

    pub fn basis_state(basis: BasisSpec, n: usize, k: usize) -> Self {
        let mut amps = vec![C64::new(0.0, 0.0); basis.dim()];
        amps[basis.index(n, k)] = C64::new(1.0, 0.0);
        Self { basis, amps }
    }

    pub fn norm(&self) -> f64 {
        norm(&self.amps)
    }

    pub fn normalize(&mut self) {
        let n = self.norm();
        if n > 0.0 {
            self.amps.iter_mut().for_each(|a| *a /= n);
        }
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Self) -> C64 {
        inner(&self.amps, &other.amps)
    }

    pub fn expectation(&self, op: &SparseOperator) -> C64 {
        op.expectation(&self.amps)
    }

    /// Weight in the boson levels `n ≥ n_from`.
    pub fn boson_tail(&self, n_from: usize) -> f64 {
        let d = self.basis.spin_dim();
        self.amps[(n_from.min(self.basis.n_max()) * d)..].iter().map(|a| a.norm_sqr()).sum()
    }

    /// Copy into a basis with a different boson cutoff (truncating or
    /// zero-padding the top levels).
    pub fn with_n_max(&self, n_max: usize) -> Self {
        let basis = self.basis.with_n_max(n_max);
        let mut amps = vec![C64::new(0.0, 0.0); basis.dim()];
        let keep = basis.dim().min(self.amps.len());
        amps[..keep].copy_from_slice(&self.amps[..keep]);
        Self { basis, amps }
    }
}

pub fn inner(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

pub fn norm(a: &[C64]) -> f64 {
    a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt()
}

/// Table of `ln k!` for `k = 0..=n`.
pub fn ln_factorials(n: usize) -> Vec<f64> {
    let mut out = Vec::with_capacity(n + 1);
    let mut acc = 0.0;
    out.push(0.0);
    for k in 1..=n {
        acc += (k as f64).ln();
        out.push(acc);
    }
    out
}

/// `⟨n|α⟩ = e^{-|α|²/2} αⁿ / √(n!)` for `n < n_max`.
pub fn boson_coherent_amplitudes(alpha: C64, n_max: usize) -> Vec<C64> {
    let r = alpha.norm();
    let phase = alpha.arg();
    if r == 0.0 {
        let mut v = vec![C64::new(0.0, 0.0); n_max];
        if n_max > 0 {
            v[0] = C64::new(1.0, 0.0);
        }
        return v;
    }
    let lr = r.ln();
    let lf = ln_factorials(n_max);
    (0..n_max)
        .map(|n| {
            let la = -0.5 * r * r + n as f64 * lr - 0.5 * lf[n];
            C64::from_polar(la.exp(), n as f64 * phase)
        })
        .collect()
}

/// Smallest cutoff `n_max` whose discarded coherent weight is below `tol`.
pub fn boson_cutoff_for(alpha: C64, tol: f64) -> usize {
    let r2 = alpha.norm_sqr();
    // ln p_n accumulated incrementally: p_n = e^{-r²} r^{2n} / n!
    let mut lp = -r2;
    let mut kept = 0.0;
    let mut n = 0usize;
    loop {
        kept += lp.exp();
        n += 1;
        if 1.0 - kept < tol && (n as f64) > r2 {
            return n;
        }
        if r2 == 0.0 {
            return n;
        }
        lp += r2.ln() - (n as f64).ln();
        if n > 10_000_000 {
            return n;
        }
    }
}

/// Magnitudes `√C(2j, k) sin^k(θ/2) cos^{2j-k}(θ/2)` for `k = m + j`.
///
/// Built by the ratio recursion in log space and normalized at the end,
/// which keeps the sum of squares at 1 to rounding even for large `j`.
pub fn spin_coherent_magnitudes(two_j: usize, theta: f64) -> Vec<f64> {
    let t = (0.5 * theta).tan();
    let mut out = vec![0.0; two_j + 1];
    if t == 0.0 {
        out[0] = 1.0;
        return out;
    }
    if !t.is_finite() || t < 0.0 {
        out[two_j] = 1.0;
        return out;
    }
    let lt = t.ln();
    let mut logs = Vec::with_capacity(two_j + 1);
    let mut l = 0.0;
    logs.push(l);
    for k in 1..=two_j {
        l += 0.5 * (((two_j - k + 1) as f64) / k as f64).ln() + lt;
        logs.push(l);
    }
    let top = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let mut total = 0.0;
    for (o, l) in out.iter_mut().zip(&logs) {
        *o = (l - top).exp();
        total += *o * *o;
    }
    let n = total.sqrt();
    out.iter_mut().for_each(|o| *o /= n);
    out
}

/// `⟨j, m|z⟩ = √C(2j, j+m) z^{j+m} / (1 + |z|²)^j`.
pub fn spin_coherent_amplitudes(two_j: usize, z: C64) -> Vec<C64> {
    let theta = 2.0 * z.norm().atan();
    let arg = z.arg();
    spin_coherent_magnitudes(two_j, theta)
        .into_iter()
        .enumerate()
        .map(|(k, m)| C64::from_polar(m, k as f64 * arg))
        .collect()
}

/// Product state `|α⟩ ⊗ |z⟩`, renormalized after truncation. Fails if the
/// discarded boson weight exceeds `tail_tol`.
pub fn coherent_product_state(alpha: C64, z: C64, basis: &BasisSpec, tail_tol: f64) -> Result<StateVector> {
    if !(alpha.re.is_finite() && alpha.im.is_finite() && z.re.is_finite() && z.im.is_finite()) {
        return Err(invalid("coherent state", "alpha and z must be finite"));
    }
    let boson = boson_coherent_amplitudes(alpha, basis.n_max());
    let kept: f64 = boson.iter().map(|a| a.norm_sqr()).sum();
    if 1.0 - kept > tail_tol {
        let required = boson_cutoff_for(alpha, tail_tol);
        return Err(Error::CutoffTooSmall {
            required,
            reason: format!("coherent boson weight {:.3e} lies beyond n_max = {}", 1.0 - kept, basis.n_max()),
        });
    }
    let spin = spin_coherent_amplitudes(basis.two_j(), z);
    let mut amps = Vec::with_capacity(basis.dim());
    for b in &boson {
        for s in &spin {
            amps.push(b * s);
        }
    }
    let mut psi = StateVector { basis: *basis, amps };
    psi.normalize();
    Ok(psi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::quantum::operators::{build_boson_ops, build_spin_ops};

    #[test]
    fn vacuum_product() {
        let b = BasisSpec::new(2.5, 4).unwrap();
        let psi = coherent_product_state(C64::new(0.0, 0.0), C64::new(0.0, 0.0), &b, 1e-8).unwrap();
        assert_eq!(psi, StateVector::basis_state(b, 0, 0));
    }

    #[test]
    fn expectation_values_match_chart() {
        let b = BasisSpec::new(4.5, 64).unwrap();
        let s = build_spin_ops(&b);
        let o = build_boson_ops(&b);
        let alpha = C64::new(1.5, 0.5);
        for z in [C64::new(0.3, -0.4), C64::new(1.7, 0.2), C64::new(-0.2, 2.5)] {
            let psi = coherent_product_state(alpha, z, &b, 1e-8).unwrap();
            assert!((psi.norm() - 1.0).abs() < 1e-14);
            let spin = crate::model::planar_to_spin(z);
            let j = b.j();
            assert!((psi.expectation(&s.jz).re / j - spin.jz).abs() < 1e-10);
            assert!((psi.expectation(&s.jx).re / j - spin.jx).abs() < 1e-10);
            assert!((psi.expectation(&s.jy).re / j - spin.jy).abs() < 1e-10);
            assert!((psi.expectation(&o.a) - alpha).norm() < 1e-10);
        }
    }

    #[test]
    fn tail_violation_reports_cutoff() {
        let b = BasisSpec::new(1.0, 10).unwrap();
        match coherent_product_state(C64::new(3.0, 0.0), C64::new(0.0, 0.0), &b, 1e-8) {
            Err(Error::CutoffTooSmall { required, .. }) => {
                assert!(required > 10);
                let b2 = b.with_n_max(required);
                assert!(coherent_product_state(C64::new(3.0, 0.0), C64::new(0.0, 0.0), &b2, 1e-8).is_ok());
                let b3 = b.with_n_max(required - 1);
                assert!(coherent_product_state(C64::new(3.0, 0.0), C64::new(0.0, 0.0), &b3, 1e-8).is_err());
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn large_spin_magnitudes_stay_finite() {
        let m = spin_coherent_magnitudes(800, 1.0);
        let total: f64 = m.iter().map(|x| x * x).sum();
        assert!((total - 1.0).abs() < 1e-12);
        let m = spin_coherent_magnitudes(800, 0.0);
        assert_eq!(m[0], 1.0);
        assert!(m[1..].iter().all(|&x| x == 0.0));
        let (sn, cs) = (0.35f64).sin_cos();
        let binom: [f64; 7] = [1.0, 6.0, 15.0, 20.0, 15.0, 6.0, 1.0];
        for (k, v) in spin_coherent_magnitudes(6, 0.7).iter().enumerate() {
            let direct = binom[k].sqrt() * sn.powi(k as i32) * cs.powi(6 - k as i32);
            assert!((v - direct).abs() < 1e-15);
        }
        let m = spin_coherent_magnitudes(6, std::f64::consts::PI);
        assert!((m[6] - 1.0).abs() < 1e-15);
    }
}
