//! Peak positions and weights of a sampled spectrum.

use super::kpm::Spectrum;

/// Default relative height below which maxima are ignored.
pub const DEFAULT_REL_THRESHOLD: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Peak {
    pub position: f64,
    pub height: f64,
    /// Trapezoidal area between the flanking minima.
    pub weight: f64,
}

/// Local maxima above `rel_threshold · max`, ordered by position.
pub fn peak_extract(s: &Spectrum, rel_threshold: f64) -> Vec<Peak> {
    extract(&s.omega, &s.values, rel_threshold)
}

pub fn extract(x: &[f64], y: &[f64], rel_threshold: f64) -> Vec<Peak> {
    let n = y.len();
    if n < 3 {
        return Vec::new();
    }
    let top = y.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if top <= 0.0 {
        return Vec::new();
    }
    let cut = rel_threshold * top;
    let mut out = Vec::new();
    let mut i = 1;
    while i < n - 1 {
        // a plateau counts once, at its left edge
        let mut r = i;
        while r + 1 < n && y[r + 1] == y[i] {
            r += 1;
        }
        if y[i] > y[i - 1] && r + 1 < n && y[r] > y[r + 1] && y[i] >= cut {
            let mut lo = i;
            while lo > 0 && y[lo - 1] <= y[lo] {
                lo -= 1;
            }
            let mut hi = r;
            while hi + 1 < n && y[hi + 1] <= y[hi] {
                hi += 1;
            }
            let weight = super::kpm::trapezoid(&x[lo..=hi], &y[lo..=hi]);
            let (position, height) = if r == i { refine(x, y, i) } else { (0.5 * (x[i] + x[r]), y[i]) };
            out.push(Peak { position, height, weight });
        }
        i = r + 1;
    }
    out
}

/// Vertex of the parabola through the three samples around `i`.
fn refine(x: &[f64], y: &[f64], i: usize) -> (f64, f64) {
    let (x0, x1, x2) = (x[i - 1], x[i], x[i + 1]);
    let (y0, y1, y2) = (y[i - 1], y[i], y[i + 1]);
    let d01 = (y1 - y0) / (x1 - x0);
    let d12 = (y2 - y1) / (x2 - x1);
    let c = (d12 - d01) / (x2 - x0);
    if c >= 0.0 {
        return (x1, y1);
    }
    let b = d01 - c * (x0 + x1);
    let xv = (-b / (2.0 * c)).clamp(x0, x2);
    let yv = y1 + d01 * (xv - x1) + c * (xv - x0) * (xv - x1);
    (xv, yv)
}

/// The `k` heaviest peaks with positive position, sorted by position.
pub fn dominant_positive(peaks: &[Peak], k: usize) -> Vec<Peak> {
    let mut pos: Vec<Peak> = peaks.iter().copied().filter(|p| p.position > 0.0).collect();
    pos.sort_by(|a, b| b.weight.partial_cmp(&a.weight).unwrap());
    pos.truncate(k);
    pos.sort_by(|a, b| a.position.partial_cmp(&b.position).unwrap());
    pos
}
