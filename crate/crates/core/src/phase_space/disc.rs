//! Polar disc projection of the lower hemisphere `θ ≤ π/2`.
//!
//! `θ` grows linearly from 0 at the center to `π/2` on the rim, and `φ`
//! runs counterclockwise from the top of the disc.

use std::f64::consts::FRAC_PI_2;

use super::grid::HusimiGrid;

/// Square raster, row 0 at the top. Pixels outside the disc hold NaN.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscRaster {
    pub size: usize,
    pub values: Vec<f64>,
}

impl DiscRaster {
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.values[row * self.size + col]
    }

    /// Disc coordinates `(x, y) ∈ [-1, 1]²` of a pixel center.
    pub fn pixel_xy(&self, row: usize, col: usize) -> (f64, f64) {
        let s = self.size as f64;
        let x = 2.0 * (col as f64 + 0.5) / s - 1.0;
        let y = 1.0 - 2.0 * (row as f64 + 0.5) / s;
        (x, y)
    }
}

/// `(θ, φ)` shown at disc point `(x, y)`, or `None` outside the rim.
pub fn disc_angles(x: f64, y: f64) -> Option<(f64, f64)> {
    let r = x.hypot(y);
    if r > 1.0 {
        return None;
    }
    let phi = (-x).atan2(y).rem_euclid(2.0 * std::f64::consts::PI);
    Some((r * FRAC_PI_2, phi))
}

/// Resample `grid` onto a `size × size` disc by bilinear interpolation.
pub fn husimi_disc_projection(grid: &HusimiGrid, size: usize) -> DiscRaster {
    let mut out = DiscRaster { size, values: vec![f64::NAN; size * size] };
    for row in 0..size {
        for col in 0..size {
            let (x, y) = out.pixel_xy(row, col);
            if let Some((t, p)) = disc_angles(x, y) {
                out.values[row * size + col] = grid.interpolate(t, p);
            }
        }
    }
    out
}
