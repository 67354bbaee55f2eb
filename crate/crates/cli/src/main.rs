//! `dicke`: batch driver for the semiclassical and quantum Dicke model
//! computations. Every command writes CSV (and raster) files with a
//! `#` header block recording the full resolved configuration.

mod cmd;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::RunConfig;
use error::{CliError, CliResult};

#[derive(Parser)]
#[command(name = "dicke", version, about = "Semiclassical and quantum dynamics of the Dicke model")]
struct Cli {
    /// Configuration file of `key = value` lines; flags override it.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Collective mode frequencies and weights over a κ range.
    Modes(Flags),
    /// Ground-state Green function ⟨⟨Jx;Jy⟩⟩ and its peaks.
    Green(Flags),
    /// Classical trajectories from section seeds.
    Orbit(Flags),
    /// Poincaré section `Q = 0` from section seeds.
    Poincare(Flags),
    /// Lyapunov exponent series from section seeds.
    Lyapunov(Flags),
    /// Quantum propagation of a coherent state with observables.
    Propagate(Flags),
    /// Husimi functions: snapshot, timeavg, eigen or poincare mode.
    Husimi(Flags),
}

/// Shared flags. Times are in units of 2π/Δ unless `--raw-time` is set.
#[derive(Args, Debug, Default)]
struct Flags {
    #[arg(long)]
    j: Option<String>,
    /// Coupling κ; `modes` also accepts a range `a:b:n`.
    #[arg(long)]
    kappa: Option<String>,
    #[arg(long)]
    omega: Option<String>,
    #[arg(long)]
    delta: Option<String>,
    /// Boson cutoff; chosen automatically when absent.
    #[arg(long)]
    nmax: Option<String>,
    #[arg(long)]
    moments: Option<String>,
    #[arg(long)]
    tol: Option<String>,
    #[arg(long)]
    grid_theta: Option<String>,
    #[arg(long)]
    grid_phi: Option<String>,
    #[arg(long)]
    t_max: Option<String>,
    /// Comma-separated sample times.
    #[arg(long)]
    times: Option<String>,
    /// File with one `jx, jy` seed per line.
    #[arg(long)]
    seeds: Option<String>,
    /// Single `jx,jy` seed.
    #[arg(long, allow_hyphen_values = true)]
    seed: Option<String>,
    /// Output directory.
    #[arg(long)]
    out: Option<String>,
    /// Dimensionless energy E/(jΔ) of the shell or eigenstate target.
    #[arg(long, allow_hyphen_values = true)]
    e_target: Option<String>,
    #[arg(long)]
    count: Option<String>,
    /// Husimi mode: snapshot, timeavg, eigen or poincare.
    #[arg(long)]
    mode: Option<String>,
    /// Frequency grid points for `green`.
    #[arg(long)]
    points: Option<String>,
    /// KPM kernel: jackson or lorentz.
    #[arg(long)]
    kernel: Option<String>,
    /// Gaussian smoothing width for `green` (0 disables).
    #[arg(long)]
    sigma: Option<String>,
    /// Renormalization interval for `lyapunov`.
    #[arg(long)]
    renorm: Option<String>,
    /// Sample count for orbits and sampled time averages.
    #[arg(long)]
    samples: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    theta: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    phi: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    q: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    p: Option<String>,
    /// Add classical columns to `propagate` output.
    #[arg(long)]
    classical: bool,
    /// Read and write times in units of 1/Δ.
    #[arg(long)]
    raw_time: bool,
    /// Also write binary state dumps.
    #[arg(long)]
    dump_state: bool,
    /// Disc raster size for Husimi output (0 disables).
    #[arg(long)]
    disc: Option<String>,
    /// Eigenpairs computed around the target before ranking.
    #[arg(long)]
    window: Option<String>,
    /// Time-average method: auto, matrix or sampled.
    #[arg(long)]
    method: Option<String>,
}

impl Flags {
    fn into_pairs(self) -> Vec<(&'static str, String)> {
        let opt = [
            ("j", self.j),
            ("kappa", self.kappa),
            ("omega", self.omega),
            ("delta", self.delta),
            ("nmax", self.nmax),
            ("moments", self.moments),
            ("tol", self.tol),
            ("grid-theta", self.grid_theta),
            ("grid-phi", self.grid_phi),
            ("t-max", self.t_max),
            ("times", self.times),
            ("seeds", self.seeds),
            ("seed", self.seed),
            ("out", self.out),
            ("e-target", self.e_target),
            ("count", self.count),
            ("mode", self.mode),
            ("points", self.points),
            ("kernel", self.kernel),
            ("sigma", self.sigma),
            ("renorm", self.renorm),
            ("samples", self.samples),
            ("theta", self.theta),
            ("phi", self.phi),
            ("q", self.q),
            ("p", self.p),
            ("disc", self.disc),
            ("window", self.window),
            ("method", self.method),
        ];
        let mut out: Vec<(&'static str, String)> = opt.into_iter().filter_map(|(k, v)| v.map(|v| (k, v))).collect();
        for (k, set) in [("classical", self.classical), ("raw-time", self.raw_time), ("dump-state", self.dump_state)] {
            if set {
                out.push((k, "true".into()));
            }
        }
        out
    }
}

fn init_threads() -> CliResult<()> {
    if let Ok(v) = std::env::var("DICKE_THREADS") {
        let n: usize = v.trim().parse().map_err(|_| CliError::Usage(format!("DICKE_THREADS must be a positive integer, got `{v}`")))?;
        if n == 0 {
            return Err(CliError::Usage("DICKE_THREADS must be >= 1".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Usage(format!("cannot size worker pool: {e}")))?;
    }
    Ok(())
}

type Handler = fn(&RunConfig) -> CliResult<()>;

fn run(cli: Cli) -> CliResult<()> {
    init_threads()?;
    let mut cfg = RunConfig::load(cli.config.as_deref())?;
    let (name, flags, f): (&str, Flags, Handler) = match cli.command {
        Command::Modes(fl) => ("modes", fl, cmd::modes::run),
        Command::Green(fl) => ("green", fl, cmd::green::run),
        Command::Orbit(fl) => ("orbit", fl, cmd::classical::orbit),
        Command::Poincare(fl) => ("poincare", fl, cmd::classical::poincare),
        Command::Lyapunov(fl) => ("lyapunov", fl, cmd::classical::lyapunov),
        Command::Propagate(fl) => ("propagate", fl, cmd::propagate::run),
        Command::Husimi(fl) => ("husimi", fl, cmd::husimi::run),
    };
    cfg.overlay(flags.into_pairs());
    cfg.set_command(name);
    f(&cfg)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("dicke: {e}");
            e.exit_code()
        }
    }
}
