//! Uniform `(θ, φ)` meshes and sampled phase-space densities.

use std::f64::consts::PI;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GridSpec {
    /// Samples in `θ ∈ [0, π]`, endpoints included.
    pub n_theta: usize,
    /// Samples in `φ ∈ [0, 2π)`.
    pub n_phi: usize,
}

impl Default for GridSpec {
    fn default() -> Self {
        Self { n_theta: 181, n_phi: 360 }
    }
}

impl GridSpec {
    pub fn new(n_theta: usize, n_phi: usize) -> Result<Self> {
        if n_theta < 2 || n_phi < 1 {
            return Err(Error::InvalidGrid(format!("need n_theta >= 2 and n_phi >= 1, got {n_theta} x {n_phi}")));
        }
        Ok(Self { n_theta, n_phi })
    }

    pub fn thetas(&self) -> Vec<f64> {
        (0..self.n_theta).map(|i| PI * i as f64 / (self.n_theta - 1) as f64).collect()
    }

    pub fn phis(&self) -> Vec<f64> {
        (0..self.n_phi).map(|k| 2.0 * PI * k as f64 / self.n_phi as f64).collect()
    }
}

/// Values on a `(θ, φ)` mesh, row-major in `θ`. Masked nodes hold NaN.
#[derive(Debug, Clone, PartialEq)]
pub struct HusimiGrid {
    pub theta: Vec<f64>,
    pub phi: Vec<f64>,
    pub values: Vec<f64>,
}

impl HusimiGrid {
    pub fn zeros(spec: GridSpec) -> Self {
        Self { theta: spec.thetas(), phi: spec.phis(), values: vec![0.0; spec.n_theta * spec.n_phi] }
    }

    pub fn get(&self, i_theta: usize, i_phi: usize) -> f64 {
        self.values[i_theta * self.phi.len() + i_phi]
    }

    pub fn row(&self, i_theta: usize) -> &[f64] {
        let n = self.phi.len();
        &self.values[i_theta * n..(i_theta + 1) * n]
    }

    /// Largest unmasked value and its `(θ, φ)`.
    pub fn max(&self) -> Option<(f64, f64, f64)> {
        let n = self.phi.len();
        self.values
            .iter()
            .enumerate()
            .filter(|(_, v)| v.is_finite())
            .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
            .map(|(i, v)| (*v, self.theta[i / n], self.phi[i % n]))
    }

    /// `∫ Q sinθ dθ dφ` (trapezoid in θ, periodic sum in φ); masked nodes count as zero.
    pub fn sphere_integral(&self) -> f64 {
        let n = self.phi.len();
        let dphi = 2.0 * PI / n as f64;
        let rows: Vec<f64> = (0..self.theta.len())
            .map(|i| self.row(i).iter().filter(|v| v.is_finite()).sum::<f64>() * dphi * self.theta[i].sin())
            .collect();
        crate::chebyshev::kpm::trapezoid(&self.theta, &rows)
    }

    /// `(2j+1)/(4π) ∫ Q dΩ`, equal to 1 for a normalized state.
    pub fn normalization(&self, j: f64) -> f64 {
        (2.0 * j + 1.0) / (4.0 * PI) * self.sphere_integral()
    }

    /// Multiply by `(2j+1)/(4π)`, turning `Q` into a density on the sphere.
    pub fn density_normalized(&self, j: f64) -> Self {
        let f = (2.0 * j + 1.0) / (4.0 * PI);
        Self { values: self.values.iter().map(|v| v * f).collect(), ..self.clone() }
    }

    /// Bilinear interpolation, periodic in `φ`. NaN outside `[θ_0, θ_last]`.
    pub fn interpolate(&self, theta: f64, phi: f64) -> f64 {
        let nt = self.theta.len();
        let (t0, t1) = (self.theta[0], self.theta[nt - 1]);
        if !(theta >= t0 && theta <= t1) {
            return f64::NAN;
        }
        let ft = (theta - t0) / (t1 - t0) * (nt - 1) as f64;
        let i = (ft.floor() as usize).min(nt - 2);
        let wt = ft - i as f64;
        let np = self.phi.len();
        let fp = phi.rem_euclid(2.0 * PI) / (2.0 * PI) * np as f64;
        let k = (fp.floor() as usize) % np;
        let wp = fp - fp.floor();
        let k1 = (k + 1) % np;
        let v = |a: usize, b: usize| self.get(a, b);
        (1.0 - wt) * ((1.0 - wp) * v(i, k) + wp * v(i, k1)) + wt * ((1.0 - wp) * v(i + 1, k) + wp * v(i + 1, k1))
    }
}
