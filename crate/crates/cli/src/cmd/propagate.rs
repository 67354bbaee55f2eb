use num_complex::Complex64 as C64;

use dicke_core::chebyshev::ChebyshevPropagator;
use dicke_core::classical::ClassicalSystem;
use dicke_core::phase_space::{spin_covariance, spin_variance_normalized};
use dicke_core::quantum::cutoff::top_level_weight;
use dicke_core::quantum::{build_boson_ops, build_hamiltonian, coherent_product_state, BasisSpec, SparseOperator, StateVector};
use dicke_core::{ClassicalState, ModelParams};

use super::{initial_state, ode_tol, orbit_cutoff, quantum_params, sample_times, shell_cutoff, Clock};
use crate::config::RunConfig;
use crate::error::CliResult;
use crate::output::Output;

/// Leaked weight in the top boson levels above which a warning is printed.
pub const LEAK_WARN: f64 = 1e-8;

pub fn run(cfg: &RunConfig) -> CliResult<()> {
    let params = quantum_params(cfg)?;
    let kappa = params.kappa();
    let clock = Clock::new(cfg, params.delta)?;
    let tol = ode_tol(cfg)?;
    let s0 = initial_state(cfg, kappa)?;
    let times = sample_times(cfg, 10.0, 201)?;
    let classical = cfg.flag("classical")?;
    let dump = cfg.flag("dump-state")?;
    let raw: Vec<f64> = times.iter().map(|&t| clock.to_raw(t)).collect();
    let fixed = cfg.usize_opt("nmax")?;
    let cl = if classical {
        let sys = ClassicalSystem::new(kappa, params.omega, params.delta)?;
        Some(sys.integrate_at_signed(&s0, &raw, tol)?)
    } else {
        None
    };
    let dump_to = if dump { Some(Output::new(cfg, &[])?) } else { None };

    let mut n_max = match fixed {
        Some(n) => n,
        None => orbit_cutoff(&params, &s0, &raw, tol)?,
    };
    let mut run = evolve(&params, &s0, &raw, n_max, dump_to.as_ref())?;
    // the quantum state spreads beyond the classical orbit; retry once on the whole shell
    if fixed.is_none() && run.leak > LEAK_WARN {
        n_max = shell_cutoff(&params, s0.energy(kappa)).max(n_max + n_max / 2);
        run = evolve(&params, &s0, &raw, n_max, dump_to.as_ref())?;
    }
    let leak = run.leak;
    let dim = run.dim;

    let derived = [("time-unit", clock.label()), ("nmax-used", n_max.to_string()), ("dim", dim.to_string())];
    let out = Output::new(cfg, &derived)?;
    let rows: Vec<Vec<f64>> = run
        .rows
        .into_iter()
        .enumerate()
        .map(|(k, mut row)| {
            row.insert(0, times[k]);
            if let Some(tr) = &cl {
                let sp = tr.states[k].spin();
                row.extend([sp.jx, sp.jy, sp.jz, tr.states[k].q(), tr.states[k].p()]);
            }
            row
        })
        .collect();

    let mut cols = vec!["t", "jx", "jy", "jz", "re_a", "im_a", "dj_par", "norm"];
    if classical {
        cols.extend(["cl_jx", "cl_jy", "cl_jz", "cl_q", "cl_p"]);
    }
    out.csv("propagate.csv", &[("max-top-level-weight", format!("{leak:e}"))], &cols, &rows)?;
    if leak > LEAK_WARN {
        eprintln!("warning: weight {leak:.2e} in the top boson levels; raise --nmax");
    }
    println!("propagate: {} times, dim {dim}, max top-level weight {leak:.2e}", rows.len());
    Ok(())
}

struct Evolution {
    rows: Vec<Vec<f64>>,
    leak: f64,
    dim: usize,
}

/// Quantum observables at `raw` times: forward from ψ₀ for `t ≥ 0`,
/// backward for `t < 0`, one state in memory per branch.
fn evolve(params: &ModelParams, s0: &ClassicalState, raw: &[f64], n_max: usize, dump: Option<&Output>) -> CliResult<Evolution> {
    let basis = BasisSpec::new(params.j, n_max)?;
    let h = build_hamiltonian(params, &basis)?;
    let prop = ChebyshevPropagator::new(&h)?;
    let a = build_boson_ops(&basis).a;
    let psi0 = coherent_product_state(s0.alpha_bar * params.alpha_scale(), s0.z, &basis, 1e-10)?;
    let mut rows = vec![Vec::new(); raw.len()];
    let mut leak: f64 = 0.0;
    let split = raw.partition_point(|&t| t < 0.0);
    let forward: Vec<usize> = (split..raw.len()).collect();
    let backward: Vec<usize> = (0..split).rev().collect();
    for branch in [forward, backward] {
        let (mut psi, mut t_cur) = (psi0.clone(), 0.0);
        for k in branch {
            psi = prop.propagate(&psi, raw[k] - t_cur)?;
            t_cur = raw[k];
            leak = leak.max(top_level_weight(&psi));
            if let Some(out) = dump {
                out.state(&format!("state_{k:05}.bin"), &psi)?;
            }
            rows[k] = observables(&psi, &a, params.j);
        }
    }
    Ok(Evolution { rows, leak, dim: basis.dim() })
}

/// `⟨J⟩/j`, `⟨a⟩`, the normalized spin variance and the norm.
fn observables(psi: &StateVector, a: &SparseOperator, j: f64) -> Vec<f64> {
    let (mean, _) = spin_covariance(psi);
    let av: C64 = psi.expectation(a);
    vec![mean[0] / j, mean[1] / j, mean[2] / j, av.re, av.im, spin_variance_normalized(psi), psi.norm()]
}
