use dicke_core::chebyshev::ChebyshevPropagator;
use dicke_core::phase_space::husimi::{husimi_from_matrix, time_averaged_matrix, time_averaged_matrix_sampled};
use dicke_core::phase_space::{poincare_husimi, spin_husimi};
use dicke_core::quantum::cutoff::top_level_weight;
use dicke_core::quantum::{build_hamiltonian, coherent_product_state, eigenpairs_near, overlap_rank, BasisSpec, StateVector};
use dicke_core::{ClassicalState, Error, ModelParams};

use super::propagate::LEAK_WARN;
use super::{grid_spec, has_initial_state, initial_state, linspace, ode_tol, orbit_cutoff, quantum_params, shell_cutoff, Clock};
use crate::config::RunConfig;
use crate::error::{CliError, CliResult};
use crate::output::Output;

pub fn run(cfg: &RunConfig) -> CliResult<()> {
    let params = quantum_params(cfg)?;
    let disc = cfg.usize_or("disc", 201)?;
    match cfg.string_or("mode", "snapshot").as_str() {
        "snapshot" => snapshot(cfg, &params, disc),
        "timeavg" => timeavg(cfg, &params, disc),
        "eigen" => eigen(cfg, &params, disc, false),
        "poincare" => eigen(cfg, &params, disc, true),
        m => Err(CliError::Usage(format!("unknown mode `{m}` (snapshot, timeavg, eigen or poincare)"))),
    }
}

fn coherent(params: &ModelParams, s: &ClassicalState, basis: &BasisSpec) -> CliResult<StateVector> {
    Ok(coherent_product_state(s.alpha_bar * params.alpha_scale(), s.z, basis, 1e-10)?)
}

fn snapshot(cfg: &RunConfig, params: &ModelParams, disc: usize) -> CliResult<()> {
    let clock = Clock::new(cfg, params.delta)?;
    let tol = ode_tol(cfg)?;
    let s0 = initial_state(cfg, params.kappa())?;
    let times = cfg.list_opt("times")?.unwrap_or_else(|| vec![0.0]);
    let raw: Vec<f64> = times.iter().map(|&t| clock.to_raw(t)).collect();
    let spec = grid_spec(cfg)?;
    let fixed = cfg.usize_opt("nmax")?;
    let mut n_max = match fixed {
        Some(n) => n,
        None => orbit_cutoff(params, &s0, &raw, tol)?,
    };
    let mut states = evolve(params, &s0, &raw, n_max)?;
    let leak = |st: &[StateVector]| st.iter().map(top_level_weight).fold(0.0, f64::max);
    if fixed.is_none() && leak(&states) > LEAK_WARN {
        n_max = shell_cutoff(params, s0.energy(params.kappa())).max(n_max + n_max / 2);
        states = evolve(params, &s0, &raw, n_max)?;
    }
    if leak(&states) > LEAK_WARN {
        eprintln!("warning: weight {:.2e} in the top boson levels; raise --nmax", leak(&states));
    }
    let out = Output::new(cfg, &[("time-unit", clock.label()), ("nmax-used", n_max.to_string())])?;
    for (k, (t, psi)) in times.iter().zip(&states).enumerate() {
        let g = spin_husimi(psi, spec);
        out.husimi(&format!("husimi_t{k:03}"), &[("t", format!("{t}"))], &g, disc)?;
        if let Some((v, th, ph)) = g.max() {
            println!("t = {t}: max {v:.6} at theta {th:.4}, phi {ph:.4}");
        }
    }
    Ok(())
}

fn evolve(params: &ModelParams, s0: &ClassicalState, raw: &[f64], n_max: usize) -> CliResult<Vec<StateVector>> {
    let basis = BasisSpec::new(params.j, n_max)?;
    let h = build_hamiltonian(params, &basis)?;
    let prop = ChebyshevPropagator::new(&h)?;
    Ok(prop.propagate_series(&coherent(params, s0, &basis)?, raw)?)
}

fn timeavg(cfg: &RunConfig, params: &ModelParams, disc: usize) -> CliResult<()> {
    let clock = Clock::new(cfg, params.delta)?;
    let tol = ode_tol(cfg)?;
    let s0 = initial_state(cfg, params.kappa())?;
    let t_user = cfg.f64_or("t-max", 1.25)?;
    if t_user < 0.0 {
        return Err(CliError::Usage("`t-max` must be >= 0".into()));
    }
    let t_half = clock.to_raw(t_user);
    let method = cfg.string_or("method", "auto");
    let samples = cfg.usize_or("samples", 200)?;
    let spec = grid_spec(cfg)?;
    let n_max = match cfg.usize_opt("nmax")? {
        Some(n) => n,
        None => orbit_cutoff(params, &s0, &linspace(-t_half, t_half, 401), tol)?,
    };
    let basis = BasisSpec::new(params.j, n_max)?;
    let h = build_hamiltonian(params, &basis)?;
    let prop = ChebyshevPropagator::new(&h)?;
    let psi0 = coherent(params, &s0, &basis)?;
    let (m, used) = match method.as_str() {
        "matrix" => (time_averaged_matrix(&prop, &psi0, t_half, None)?, "matrix"),
        "sampled" => (time_averaged_matrix_sampled(&prop, &psi0, t_half, samples)?, "sampled"),
        "auto" => match time_averaged_matrix(&prop, &psi0, t_half, None) {
            Ok(m) => (m, "matrix"),
            Err(Error::DimensionOverflow { .. }) => (time_averaged_matrix_sampled(&prop, &psi0, t_half, samples)?, "sampled"),
            Err(e) => return Err(e.into()),
        },
        m => return Err(CliError::Usage(format!("unknown method `{m}` (auto, matrix or sampled)"))),
    };
    let g = husimi_from_matrix(&m, basis.two_j(), spec);
    let derived = [("time-unit", clock.label()), ("nmax-used", n_max.to_string()), ("method-used", used.to_string())];
    let out = Output::new(cfg, &derived)?;
    out.husimi("husimi_timeavg", &[("window", format!("[-{t_user}, {t_user}]"))], &g, disc)?;
    println!("timeavg: window [-{t_user}, {t_user}], method {used}, dim {}", basis.dim());
    Ok(())
}

/// Eigenstates near `--e-target`, ranked by overlap with the initial
/// coherent state when one is given and by energy distance otherwise.
fn eigen(cfg: &RunConfig, params: &ModelParams, disc: usize, section: bool) -> CliResult<()> {
    let e_target = cfg.f64_req("e-target")?;
    let count = cfg.usize_or("count", 4)?;
    let window = cfg.usize_or("window", (4 * count).max(20))?;
    if count == 0 || window < count {
        return Err(CliError::Usage("need `count` >= 1 and `window` >= `count`".into()));
    }
    let spec = grid_spec(cfg)?;
    let s0 = if has_initial_state(cfg) { Some(initial_state(cfg, params.kappa())?) } else { None };
    let n_max = match cfg.usize_opt("nmax")? {
        Some(n) => n,
        None => shell_cutoff(params, e_target),
    };
    let basis = BasisSpec::new(params.j, n_max)?;
    let h = build_hamiltonian(params, &basis)?;
    let scale = params.j * params.delta;
    let pairs = eigenpairs_near(&h, &basis, e_target * scale, window)?;
    let (energies, states): (Vec<f64>, Vec<StateVector>) = pairs.into_iter().unzip();
    let ranked: Vec<(usize, f64)> = match &s0 {
        Some(s) => overlap_rank(&states, &energies, &coherent(params, s, &basis)?),
        None => {
            let mut idx: Vec<usize> = (0..states.len()).collect();
            idx.sort_by(|&a, &b| (energies[a] - e_target * scale).abs().partial_cmp(&(energies[b] - e_target * scale).abs()).unwrap().then(a.cmp(&b)));
            idx.into_iter().map(|i| (i, f64::NAN)).collect()
        }
    };
    let ranked = &ranked[..count.min(ranked.len())];
    let leak = ranked.iter().map(|&(i, _)| top_level_weight(&states[i])).fold(0.0, f64::max);
    if leak > LEAK_WARN {
        eprintln!("warning: eigenstate weight {leak:.2e} in the top boson levels; raise --nmax");
    }

    let derived = [("nmax-used", n_max.to_string()), ("dim", basis.dim().to_string()), ("energy-unit", "j*delta".to_string())];
    let out = Output::new(cfg, &derived)?;
    let rows: Vec<Vec<f64>> = ranked.iter().enumerate().map(|(r, &(i, ov))| vec![r as f64, i as f64, energies[i] / scale, ov]).collect();
    out.csv("eigen_rank.csv", &[], &["rank", "index", "energy", "overlap"], &rows)?;
    for (r, &(i, ov)) in ranked.iter().enumerate() {
        let e = energies[i] / scale;
        let g = if section { poincare_husimi(&states[i], e, params, spec)? } else { spin_husimi(&states[i], spec) };
        let stem = if section { format!("husimi_poincare_r{r:02}") } else { format!("husimi_eigen_r{r:02}") };
        out.husimi(&stem, &[("rank", r.to_string()), ("energy", format!("{e}"))], &g, disc)?;
        println!("rank {r}: window index {i}, E/(j delta) {e:.8}, overlap {ov:.6}");
    }
    Ok(())
}
