pub mod classical;
pub mod green;
pub mod husimi;
pub mod modes;
pub mod propagate;

use std::f64::consts::PI;

use num_complex::Complex64 as C64;

use dicke_core::classical::{initial_state_from_section, ClassicalSystem};
use dicke_core::io::parse_seeds;
use dicke_core::model::spin_to_planar;
use dicke_core::phase_space::GridSpec;
use dicke_core::quantum::cutoff::initial_n_max;
use dicke_core::quantum::states::boson_cutoff_for;
use dicke_core::{ClassicalState, Error, ModelParams};

use crate::config::RunConfig;
use crate::error::{CliError, CliResult};

pub const DEFAULT_TOL: f64 = 1e-10;

/// `(κ, Ω, Δ)` with `κ ≥ 0` and positive frequencies.
pub fn couplings(cfg: &RunConfig) -> CliResult<(f64, f64, f64)> {
    let kappa = cfg.f64_req("kappa")?;
    if kappa < 0.0 {
        return Err(CliError::Usage(format!("`kappa` must be >= 0, got {kappa}")));
    }
    Ok((kappa, cfg.positive("omega", 1.0)?, cfg.positive("delta", 1.0)?))
}

pub fn quantum_params(cfg: &RunConfig) -> CliResult<ModelParams> {
    let (kappa, omega, delta) = couplings(cfg)?;
    let j = cfg.f64_req("j")?;
    if !(j > 0.0 && (2.0 * j).fract() == 0.0) {
        return Err(CliError::Usage(format!("`j` must be a positive multiple of 1/2, got {j}")));
    }
    Ok(ModelParams::from_kappa(kappa, omega, delta, j)?)
}

pub fn ode_tol(cfg: &RunConfig) -> CliResult<f64> {
    let tol = cfg.f64_or("tol", DEFAULT_TOL)?;
    if !(1e-13..=1e-4).contains(&tol) {
        return Err(CliError::Usage(format!("`tol` must lie in [1e-13, 1e-4], got {tol}")));
    }
    Ok(tol)
}

/// User time units (2π/Δ unless `--raw-time`) against internal units of 1/Δ.
#[derive(Debug, Clone, Copy)]
pub struct Clock {
    unit: f64,
}

impl Clock {
    pub fn new(cfg: &RunConfig, delta: f64) -> CliResult<Self> {
        let raw = cfg.flag("raw-time")?;
        Ok(Self { unit: if raw { 1.0 } else { 2.0 * PI / delta } })
    }

    pub fn to_raw(self, t: f64) -> f64 {
        t * self.unit
    }

    pub fn to_user(self, t: f64) -> f64 {
        t / self.unit
    }

    pub fn label(self) -> String {
        if self.unit == 1.0 {
            "1/delta".into()
        } else {
            "2pi/delta".into()
        }
    }
}

pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    if n == 1 {
        return vec![a];
    }
    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
}

/// Sample times in user units: `--times`, else `samples` points on `[0, t-max]`.
pub fn sample_times(cfg: &RunConfig, t_max_default: f64, samples_default: usize) -> CliResult<Vec<f64>> {
    if let Some(t) = cfg.list_opt("times")? {
        if t.windows(2).any(|w| w[1] < w[0]) {
            return Err(CliError::Usage("`times` must be non-decreasing".into()));
        }
        return Ok(t);
    }
    let t_max = cfg.f64_or("t-max", t_max_default)?;
    let n = cfg.usize_or("samples", samples_default)?;
    if t_max < 0.0 || n == 0 {
        return Err(CliError::Usage("`t-max` must be >= 0 and `samples` >= 1".into()));
    }
    Ok(linspace(0.0, t_max, n))
}

pub fn parse_pair(key: &str, v: &str) -> CliResult<(f64, f64)> {
    match parse_seeds(v).as_slice() {
        [(_, Ok(p))] => Ok(*p),
        _ => Err(CliError::Usage(format!("`{key}` expects `jx,jy`, got `{v}`"))),
    }
}

/// Initial classical state from `--seed jx,jy` on the `--e-target` shell,
/// or from `--theta --phi --q --p`.
pub fn initial_state(cfg: &RunConfig, kappa: f64) -> CliResult<ClassicalState> {
    if let Some(seed) = cfg.raw("seed") {
        let (jx, jy) = parse_pair("seed", &seed)?;
        let e = cfg.f64_opt("e-target")?.ok_or_else(|| CliError::Usage("`--seed` needs `--e-target`".into()))?;
        return Ok(initial_state_from_section(e, jx, jy, kappa)?);
    }
    let theta = cfg.f64_opt("theta")?.ok_or_else(|| CliError::Usage("give either `--seed` with `--e-target` or `--theta`".into()))?;
    let phi = cfg.f64_or("phi", 0.0)?;
    let q = cfg.f64_or("q", 0.0)?;
    let p = cfg.f64_or("p", 0.0)?;
    Ok(ClassicalState::new(spin_to_planar(theta, phi)?, C64::new(q, p)))
}

pub fn has_initial_state(cfg: &RunConfig) -> bool {
    cfg.raw("seed").is_some() || cfg.raw("theta").is_some()
}

/// Section seeds from `--seeds FILE` and `--seed`. Unparsable or off-shell
/// lines are reported and skipped.
pub fn load_seeds(cfg: &RunConfig, energy: f64, kappa: f64) -> CliResult<Vec<((f64, f64), ClassicalState)>> {
    let mut raw = Vec::new();
    if let Some(path) = cfg.raw("seeds") {
        let text = std::fs::read_to_string(&path).map_err(|e| CliError::Usage(format!("cannot read seeds {path}: {e}")))?;
        for (line, r) in parse_seeds(&text) {
            match r {
                Ok(p) => raw.push((format!("{path}:{line}"), p)),
                Err(e) => eprintln!("warning: {path}:{line}: {e}"),
            }
        }
    }
    if let Some(s) = cfg.raw("seed") {
        raw.push(("--seed".into(), parse_pair("seed", &s)?));
    }
    if raw.is_empty() {
        return Err(CliError::Usage("no seeds given (`--seeds FILE` or `--seed jx,jy`)".into()));
    }
    let mut out = Vec::new();
    for (origin, (jx, jy)) in raw {
        match initial_state_from_section(energy, jx, jy, kappa) {
            Ok(s) => out.push(((jx, jy), s)),
            Err(e @ (Error::EnergyUnreachable { .. } | Error::Domain(_))) => eprintln!("warning: {origin}: seed skipped: {e}"),
            Err(e) => return Err(e.into()),
        }
    }
    if out.is_empty() {
        return Err(CliError::Empty("no seed lies on the requested energy shell".into()));
    }
    Ok(out)
}

/// Cutoff covering a boson amplitude `|ᾱ| ≤ amax`.
pub fn cutoff_for(params: &ModelParams, amax: f64) -> usize {
    initial_n_max(params).max(boson_cutoff_for(C64::new(amax * params.alpha_scale(), 0.0), 1e-12) + 16)
}

/// Cutoff from the largest amplitude on the classical orbit over `times` (raw units).
pub fn orbit_cutoff(params: &ModelParams, s: &ClassicalState, times: &[f64], tol: f64) -> CliResult<usize> {
    let sys = ClassicalSystem::new(params.kappa(), params.omega, params.delta)?;
    let mut t: Vec<f64> = times.to_vec();
    t.push(0.0);
    t.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let (lo, hi) = (t[0], t[t.len() - 1]);
    let dense = linspace(lo, hi, 2001);
    let tr = sys.integrate_at_signed(s, &dense, tol)?;
    let amax = tr.states.iter().map(|x| x.alpha_bar.norm()).fold(0.0, f64::max);
    Ok(cutoff_for(params, amax))
}

/// Cutoff covering the whole classical energy shell `E`:
/// `E ≥ -1 - κ|ᾱ| + κ|ᾱ|²/2` bounds `|ᾱ|`.
pub fn shell_cutoff(params: &ModelParams, energy: f64) -> usize {
    let k = params.kappa();
    if k <= 0.0 {
        return initial_n_max(params);
    }
    let amax = 1.0 + (1.0 + 2.0 * (energy + 1.0).max(0.0) / k).sqrt();
    cutoff_for(params, amax)
}

pub fn grid_spec(cfg: &RunConfig) -> CliResult<GridSpec> {
    Ok(GridSpec::new(cfg.usize_or("grid-theta", 181)?, cfg.usize_or("grid-phi", 360)?)?)
}
