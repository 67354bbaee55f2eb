use dicke_core::modes::collective_modes;

use crate::config::RunConfig;
use crate::error::{CliError, CliResult};
use crate::output::Output;

pub fn run(cfg: &RunConfig) -> CliResult<()> {
    let mut kappas = cfg.range_or("kappa", (0.0, 2.0, 201))?;
    let omega = cfg.positive("omega", 1.0)?;
    let delta = cfg.positive("delta", 1.0)?;
    if kappas[0] < 0.0 {
        return Err(CliError::Usage("`kappa` range must start at >= 0".into()));
    }
    // the transition point is always reported when the scan spans it
    let (lo, hi) = (kappas[0], kappas[kappas.len() - 1]);
    if lo < 1.0 && hi > 1.0 && !kappas.contains(&1.0) {
        let at = kappas.partition_point(|&k| k < 1.0);
        kappas.insert(at, 1.0);
    }
    let out = Output::new(cfg, &[])?;
    let rows: Vec<Vec<f64>> = kappas
        .iter()
        .map(|&k| {
            let m = collective_modes(k, omega, delta);
            vec![k, m.omega_minus, m.omega_plus, m.w_minus, m.w_plus]
        })
        .collect();
    out.csv("modes.csv", &[], &["kappa", "omega_minus", "omega_plus", "w_minus", "w_plus"], &rows)?;
    println!("modes: {} rows", rows.len());
    Ok(())
}
