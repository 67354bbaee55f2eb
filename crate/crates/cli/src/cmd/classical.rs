use rayon::prelude::*;

use dicke_core::classical::{lyapunov_spectrum, section_crossings, ClassicalSystem};
use dicke_core::ClassicalState;

use super::{couplings, has_initial_state, initial_state, load_seeds, ode_tol, sample_times, Clock};
use crate::config::RunConfig;
use crate::error::{CliError, CliResult};
use crate::output::Output;

/// Initial states labelled by `(jx, jy)`: section seeds on the `--e-target`
/// shell, else the single state from `--theta --phi --q --p`.
fn starts(cfg: &RunConfig, kappa: f64) -> CliResult<Vec<((f64, f64), ClassicalState)>> {
    if cfg.raw("seeds").is_some() || cfg.raw("seed").is_some() {
        let e = cfg.f64_req("e-target")?;
        return load_seeds(cfg, e, kappa);
    }
    if !has_initial_state(cfg) {
        return Err(CliError::Usage("no initial state (`--seeds`, `--seed` or `--theta`)".into()));
    }
    let s = initial_state(cfg, kappa)?;
    let sp = s.spin();
    Ok(vec![((sp.jx, sp.jy), s)])
}

fn system(cfg: &RunConfig) -> CliResult<(ClassicalSystem, Clock, f64)> {
    let (kappa, omega, delta) = couplings(cfg)?;
    let sys = ClassicalSystem::new(kappa, omega, delta)?;
    Ok((sys, Clock::new(cfg, delta)?, ode_tol(cfg)?))
}

pub fn orbit(cfg: &RunConfig) -> CliResult<()> {
    let (sys, clock, tol) = system(cfg)?;
    let starts = starts(cfg, sys.kappa)?;
    let times = sample_times(cfg, 10.0, 1001)?;
    let raw: Vec<f64> = times.iter().map(|&t| clock.to_raw(t)).collect();
    let trajs: Vec<_> = starts.par_iter().map(|(_, s)| sys.integrate_at_signed(s, &raw, tol)).collect();
    let mut rows = Vec::new();
    let mut drift: f64 = 0.0;
    for (i, tr) in trajs.into_iter().enumerate() {
        let tr = tr?;
        drift = drift.max(tr.energy_drift());
        for (k, s) in tr.states.iter().enumerate() {
            let sp = s.spin();
            rows.push(vec![i as f64, times[k], sp.jx, sp.jy, sp.jz, s.q(), s.p(), tr.energies[k]]);
        }
    }
    let out = Output::new(cfg, &[("time-unit", clock.label()), ("seed-count", starts.len().to_string())])?;
    out.csv("orbit.csv", &[], &["seed", "t", "jx", "jy", "jz", "q", "p", "energy"], &rows)?;
    println!("orbit: {} seeds, {} rows, max energy drift {drift:.2e}", starts.len(), rows.len());
    Ok(())
}

pub fn poincare(cfg: &RunConfig) -> CliResult<()> {
    let (sys, clock, tol) = system(cfg)?;
    let starts = starts(cfg, sys.kappa)?;
    let count = cfg.usize_or("count", 500)?;
    let t_max = clock.to_raw(cfg.f64_or("t-max", 1e5)?);
    if count == 0 || t_max <= 0.0 {
        return Err(CliError::Usage("`count` and `t-max` must be positive".into()));
    }
    let per: Vec<_> = starts.par_iter().map(|(_, s)| section_crossings(&sys, s, count, t_max, tol)).collect();
    let mut rows = Vec::new();
    for (i, pts) in per.into_iter().enumerate() {
        for p in pts? {
            rows.push(vec![i as f64, clock.to_user(p.t), p.jx, p.jy, p.jz, p.p, p.direction as f64]);
        }
    }
    if rows.is_empty() {
        return Err(CliError::Empty("no section crossings found".into()));
    }
    let out = Output::new(cfg, &[("time-unit", clock.label()), ("seed-count", starts.len().to_string())])?;
    out.csv("poincare.csv", &[], &["seed", "t", "jx", "jy", "jz", "p", "direction"], &rows)?;
    println!("poincare: {} seeds, {} points", starts.len(), rows.len());
    Ok(())
}

pub fn lyapunov(cfg: &RunConfig) -> CliResult<()> {
    let (sys, clock, tol) = system(cfg)?;
    let starts = starts(cfg, sys.kappa)?;
    let t_end = clock.to_raw(cfg.f64_or("t-max", 6000.0)?);
    let renorm = clock.to_raw(cfg.f64_or("renorm", 1.0)?);
    let res: Vec<_> = starts.par_iter().map(|(_, s)| lyapunov_spectrum(&sys, s, t_end, renorm, tol)).collect();
    let mut rows = Vec::new();
    let mut finals = Vec::new();
    for (i, r) in res.into_iter().enumerate() {
        let r = r?;
        for k in 0..r.times.len() {
            rows.push(vec![i as f64, clock.to_user(r.times[k]), r.lambda1[k], r.lambda2[k]]);
        }
        finals.push(r.final_values());
    }
    let out = Output::new(cfg, &[("time-unit", clock.label()), ("exponent-unit", "delta".into())])?;
    out.csv("lyapunov.csv", &[], &["seed", "t", "lambda1", "lambda2"], &rows)?;
    for (((jx, jy), _), (l1, l2)) in starts.iter().zip(&finals) {
        println!("seed ({jx:.6}, {jy:.6}): lambda1 {l1:.6e}, lambda2 {l2:.6e}");
    }
    Ok(())
}
