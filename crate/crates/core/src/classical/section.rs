//! Poincaré sections on the plane `Q = Re ᾱ = 0`.

use num_complex::Complex64 as C64;
use rayon::prelude::*;

use super::dynamics::{check_tol, failure, ClassicalSystem};
use crate::error::{invalid, Error, Result};
use crate::model::{planar_to_spin, ClassicalState};

/// Crossings are polished until `|Re ᾱ|` drops below this.
pub const CROSSING_TOL: f64 = 1e-10;

/// Seed on the section: lower-hemisphere spin with the given `(jx, jy)`,
/// `Q = 0` and `P ≥ 0` fixed by the energy.
pub fn initial_state_from_section(energy: f64, jx: f64, jy: f64, kappa: f64) -> Result<ClassicalState> {
    if !(kappa > 0.0) {
        return Err(invalid("kappa", "must be > 0 for section seeding (P is undetermined at kappa = 0)"));
    }
    let rho2 = jx * jx + jy * jy;
    if !(rho2 <= 1.0) {
        return Err(Error::Domain(format!("jx^2 + jy^2 = {rho2} exceeds 1")));
    }
    let jz = -(1.0 - rho2).sqrt();
    let p2 = 2.0 * (energy - jz) / kappa;
    if p2 < 0.0 {
        return Err(Error::EnergyUnreachable { energy, jx, jy });
    }
    let z = C64::new(jx, -jy) / (1.0 - jz);
    Ok(ClassicalState::new(z, C64::new(0.0, p2.sqrt())))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SectionPoint {
    pub t: f64,
    pub jx: f64,
    pub jy: f64,
    pub jz: f64,
    pub p: f64,
    /// `+1` when `Q` increases through zero (`P > 0`), `-1` otherwise.
    pub direction: i8,
    pub seed: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PoincareSection {
    pub points: Vec<SectionPoint>,
    pub energy: f64,
    pub kappa: f64,
}

/// Crossings of `Q = 0` along one orbit, excluding the starting point.
pub fn section_crossings(
    sys: &ClassicalSystem,
    state0: &ClassicalState,
    max_crossings: usize,
    t_max: f64,
    tol: f64,
) -> Result<Vec<SectionPoint>> {
    check_tol(tol)?;
    let mut solver = sys.solver(state0, tol);
    let mut out = Vec::new();
    while out.len() < max_crossings && solver.t() < t_max {
        let q_old = solver.y()[0];
        solver.step(t_max).map_err(|e| failure(e, solver.y()))?;
        let q_new = solver.y()[0];
        let crossed = (q_old < 0.0 && q_new >= 0.0) || (q_old > 0.0 && q_new <= 0.0);
        if !crossed {
            continue;
        }
        let (t_lo, t_hi) = (solver.t_old(), solver.t());
        let (t, y) = if q_new == 0.0 {
            (t_hi, *solver.y())
        } else {
            let dense = solver.dense();
            let t = illinois(|t| dense.eval(t)[0], t_lo, q_old, t_hi, q_new);
            (t, dense.eval(t))
        };
        out_point(&mut out, t, &y);
    }
    Ok(out)
}

fn out_point(out: &mut Vec<SectionPoint>, t: f64, y: &[f64; 4]) {
    let s = ClassicalState::from_array(y);
    let spin = planar_to_spin(s.z);
    out.push(SectionPoint {
        t,
        jx: spin.jx,
        jy: spin.jy,
        jz: spin.jz,
        p: s.p(),
        direction: if s.p() >= 0.0 { 1 } else { -1 },
        seed: 0,
    });
}

/// Regula falsi with the Illinois modification on a sign-changing bracket.
fn illinois(f: impl Fn(f64) -> f64, mut a: f64, mut fa: f64, mut b: f64, mut fb: f64) -> f64 {
    let mut side = 0i8;
    for _ in 0..200 {
        let c = (a * fb - b * fa) / (fb - fa);
        let c = if c > a.min(b) && c < a.max(b) { c } else { 0.5 * (a + b) };
        let fc = f(c);
        if fc.abs() < CROSSING_TOL * 1e-2 || (b - a).abs() < 4.0 * f64::EPSILON * c.abs().max(1.0) {
            return c;
        }
        if (fc > 0.0) == (fb > 0.0) {
            b = c;
            fb = fc;
            if side == -1 {
                fa *= 0.5;
            }
            side = -1;
        } else {
            a = c;
            fa = fc;
            if side == 1 {
                fb *= 0.5;
            }
            side = 1;
        }
    }
    if fa.abs() < fb.abs() {
        a
    } else {
        b
    }
}

/// Section of several orbits on the same energy shell. Seeds are
/// integrated independently and their points concatenated in seed order.
pub fn poincare_section(
    sys: &ClassicalSystem,
    energy: f64,
    seeds: &[ClassicalState],
    max_crossings: usize,
    t_max: f64,
    tol: f64,
) -> Result<PoincareSection> {
    for (i, s) in seeds.iter().enumerate() {
        let e = s.energy(sys.kappa);
        if (e - energy).abs() > 1e-8 * energy.abs().max(1.0) {
            return Err(invalid("seeds", format!("seed {i} has energy {e}, expected {energy}")));
        }
    }
    let per_seed: Vec<Result<Vec<SectionPoint>>> =
        seeds.par_iter().map(|s| section_crossings(sys, s, max_crossings, t_max, tol)).collect();
    let mut points = Vec::new();
    for (i, r) in per_seed.into_iter().enumerate() {
        points.extend(r?.into_iter().map(|mut p| {
            p.seed = i;
            p
        }));
    }
    Ok(PoincareSection { points, energy, kappa: sys.kappa })
}

/// Fraction of `cells × cells` bins covering the unit disc that contain at
/// least one point, relative to the bins inside the energetically allowed
/// part of the disc. Used as a coarse chaos indicator.
pub fn coverage_fraction(points: &[SectionPoint], energy: f64, kappa: f64, cells: usize) -> f64 {
    let mut occupied = vec![false; cells * cells];
    let cell = |v: f64| (((v + 1.0) * 0.5 * cells as f64) as usize).min(cells - 1);
    for p in points {
        occupied[cell(p.jy) * cells + cell(p.jx)] = true;
    }
    let mut allowed = 0usize;
    let mut hit = 0usize;
    for iy in 0..cells {
        for ix in 0..cells {
            let x = -1.0 + (ix as f64 + 0.5) * 2.0 / cells as f64;
            let y = -1.0 + (iy as f64 + 0.5) * 2.0 / cells as f64;
            if initial_state_from_section(energy, x, y, kappa).is_ok() {
                allowed += 1;
                if occupied[iy * cells + ix] {
                    hit += 1;
                }
            }
        }
    }
    if allowed == 0 {
        0.0
    } else {
        hit as f64 / allowed as f64
    }
}
