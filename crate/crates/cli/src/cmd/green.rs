use std::f64::consts::PI;

use dicke_core::chebyshev::kpm::{default_grid, kpm_green_function_with, LORENTZ_LAMBDA, MIN_MOMENTS};
use dicke_core::chebyshev::peaks::{dominant_positive, peak_extract, DEFAULT_REL_THRESHOLD};
use dicke_core::chebyshev::{ChebyshevPropagator, Kernel};
use dicke_core::modes::collective_modes;
use dicke_core::quantum::basis::BasisSpec;
use dicke_core::quantum::cutoff::auto_n_max;
use dicke_core::quantum::eigen::ground_state;
use dicke_core::quantum::operators::{build_hamiltonian, build_spin_ops};

use super::quantum_params;
use crate::config::RunConfig;
use crate::error::{CliError, CliResult};
use crate::output::Output;

pub fn run(cfg: &RunConfig) -> CliResult<()> {
    let params = quantum_params(cfg)?;
    let moments = cfg.usize_or("moments", 1024)?;
    if moments < MIN_MOMENTS {
        return Err(CliError::Usage(format!("`moments` must be >= {MIN_MOMENTS}")));
    }
    let points = cfg.usize_or("points", 4 * moments)?;
    if points < 3 {
        return Err(CliError::Usage("`points` must be >= 3".into()));
    }
    let kernel = match cfg.string_or("kernel", "jackson").as_str() {
        "jackson" => Kernel::Jackson,
        "lorentz" => Kernel::Lorentz { lambda: LORENTZ_LAMBDA },
        k => return Err(CliError::Usage(format!("unknown kernel `{k}` (jackson or lorentz)"))),
    };
    let sigma = cfg.f64_or("sigma", 0.0)?;
    if sigma < 0.0 {
        return Err(CliError::Usage("`sigma` must be >= 0".into()));
    }
    let n_max = match cfg.usize_opt("nmax")? {
        Some(n) => n,
        None => auto_n_max(&params, None, 1e-10)?,
    };

    let basis = BasisSpec::new(params.j, n_max)?;
    let h = build_hamiltonian(&params, &basis)?;
    let (e0, gs) = ground_state(&h, &basis)?;
    let ops = build_spin_ops(&basis);
    let prop = ChebyshevPropagator::new(&h)?;
    let grid = default_grid(prop.bounds(), e0, points);
    let mut g = kpm_green_function_with(&prop, &gs, &ops.jx, &ops.jy, moments, &grid, kernel)?;
    let raw_integral = g.integral();
    if sigma > 0.0 {
        g = g.smoothed(sigma);
    }
    let target = -2.0 * PI * gs.expectation(&ops.jz).re;
    let norm = g.scaled(1.0 / target);
    let peaks = peak_extract(&norm, DEFAULT_REL_THRESHOLD);
    if peaks.is_empty() {
        return Err(CliError::Empty("spectrum has no peaks above threshold".into()));
    }
    let residual = (raw_integral - target).abs() / target.abs();

    let derived = [
        ("nmax-used", n_max.to_string()),
        ("dim", basis.dim().to_string()),
        ("e0", format!("{e0}")),
        ("bounds", format!("{} {}", prop.bounds().0, prop.bounds().1)),
        ("sum-rule-target", format!("{target}")),
        ("sum-rule-residual", format!("{residual}")),
    ];
    let out = Output::new(cfg, &derived)?;
    let rows: Vec<Vec<f64>> = (0..g.omega.len()).map(|i| vec![g.omega[i], g.values[i], norm.values[i]]).collect();
    out.csv("green_spectrum.csv", &[], &["omega", "g", "g_norm"], &rows)?;
    let prow: Vec<Vec<f64>> = peaks.iter().map(|p| vec![p.position, p.height, p.weight]).collect();
    out.csv("green_peaks.csv", &[], &["position", "height", "weight"], &prow)?;

    println!("sum rule: integral {raw_integral:.10e}, -2pi<Jz> {target:.10e}, residual {residual:.3e}");
    let dom = dominant_positive(&peaks, 2);
    let listed: Vec<String> = dom.iter().map(|p| format!("{:.6} (weight {:.4})", p.position, 2.0 * p.weight)).collect();
    let m = collective_modes(params.kappa(), params.omega, params.delta);
    println!("dominant peaks: {}; classical {:.6} ({:.4}), {:.6} ({:.4})", listed.join(", "), m.omega_minus, m.w_minus, m.omega_plus, m.w_plus);
    Ok(())
}
