//! Thin command-line front end over the pipeline drivers.

use clap::{Args, Parser, Subcommand};
use pwave::config::RunConfig;
use pwave::pipeline;
use pwave::solver::BcMode;
use std::path::PathBuf;

#[derive(Parser)]
#[command(
    name = "pwave",
    version,
    about = "Equivariant vortex profiles of the two-component p-wave Ginzburg-Landau system"
)]
struct Cli {
    /// JSON configuration file; individual flags override single fields.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory for artifacts and the manifest.
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,
    /// Worker threads for independent sweep points.
    #[arg(long, global = true)]
    jobs: Option<usize>,
    /// Seed recorded in the manifest (reserved for randomized diagnostics).
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Args, Clone, Copy, Default)]
struct SolverFlags {
    /// Radial domain size R.
    #[arg(long = "R")]
    r_max: Option<f64>,
    /// Number of radial cells.
    #[arg(long = "N")]
    n: Option<usize>,
    /// Coupling strength in [0, 1].
    #[arg(long)]
    t: Option<f64>,
    /// Newton convergence threshold.
    #[arg(long)]
    tol: Option<f64>,
    /// Continuation step in t.
    #[arg(long)]
    dt: Option<f64>,
    /// Boundary mode: 'asymptotic' or 'sharp'.
    #[arg(long)]
    bc: Option<BcMode>,
}

#[derive(Args, Clone, Copy, Default)]
struct ExtendFlags {
    #[command(flatten)]
    solver: SolverFlags,
    /// Target radius of the extended domain.
    #[arg(long)]
    r_new: Option<f64>,
    /// Radial cells on the extended domain.
    #[arg(long)]
    n_new: Option<usize>,
}

#[derive(Args, Clone, Copy, Default)]
struct PlanarFlags {
    #[command(flatten)]
    solver: SolverFlags,
    /// Anisotropy, |nu| < 1.
    #[arg(long)]
    nu: Option<f64>,
    /// Potential strength.
    #[arg(long)]
    kappa: Option<f64>,
    /// Rings of the disk mesh.
    #[arg(long = "n-r")]
    n_r: Option<usize>,
    /// Angular nodes of the disk mesh.
    #[arg(long = "n-theta")]
    n_theta: Option<usize>,
}

#[derive(Subcommand)]
enum Cmd {
    /// Decoupled (t = 0) scalar vortex profile.
    Classical(SolverFlags),
    /// Coupled profile at a single t (continuation from t = 0).
    Solve(SolverFlags),
    /// Full continuation family up to t.
    Continue(SolverFlags),
    /// Re-solve on a larger domain and report interior drift.
    Extend(ExtendFlags),
    /// Far-field fits, barriers and a-priori bounds.
    Asym(SolverFlags),
    /// Pohozaev-type identity residuals at t = 1.
    Pohozaev(SolverFlags),
    /// Linearized-operator eigenvalues and the corrector profile.
    Stability(SolverFlags),
    /// Planar disk minimization with vortex rim data.
    Planar(PlanarFlags),
    /// Continuation sweep with per-member tail verification.
    Sweep(SolverFlags),
}

fn apply_solver(cfg: &mut RunConfig, f: &SolverFlags) {
    if let Some(v) = f.r_max {
        cfg.r_max = v;
    }
    if let Some(v) = f.n {
        cfg.n = v;
    }
    if let Some(v) = f.t {
        cfg.t = v;
    }
    if let Some(v) = f.tol {
        cfg.tol = v;
    }
    if let Some(v) = f.dt {
        cfg.dt = v;
    }
    if let Some(v) = f.bc {
        cfg.bc = v;
    }
}

fn run() -> pwave::Result<()> {
    let cli = Cli::parse();
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::from_path(path)?,
        None => RunConfig::default(),
    };
    if let Some(jobs) = cli.jobs {
        cfg.jobs = jobs;
    }
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    let out = &cli.out;
    match &cli.command {
        Cmd::Classical(f) => {
            apply_solver(&mut cfg, f);
            pipeline::run_classical(&cfg, out)?;
        }
        Cmd::Solve(f) => {
            apply_solver(&mut cfg, f);
            pipeline::run_solve(&cfg, out)?;
        }
        Cmd::Continue(f) => {
            apply_solver(&mut cfg, f);
            pipeline::run_continue(&cfg, out)?;
        }
        Cmd::Extend(f) => {
            apply_solver(&mut cfg, &f.solver);
            if let Some(v) = f.r_new {
                cfg.r_new = v;
            }
            if let Some(v) = f.n_new {
                cfg.n_new = v;
            }
            pipeline::run_extend(&cfg, out)?;
        }
        Cmd::Asym(f) => {
            apply_solver(&mut cfg, f);
            pipeline::run_asym(&cfg, out)?;
        }
        Cmd::Pohozaev(f) => {
            apply_solver(&mut cfg, f);
            pipeline::run_pohozaev(&cfg, out)?;
        }
        Cmd::Stability(f) => {
            apply_solver(&mut cfg, f);
            pipeline::run_stability(&cfg, out)?;
        }
        Cmd::Planar(f) => {
            apply_solver(&mut cfg, &f.solver);
            if let Some(v) = f.nu {
                cfg.nu = v;
            }
            if let Some(v) = f.kappa {
                cfg.kappa = v;
            }
            if let Some(v) = f.n_r {
                cfg.n_r = v;
            }
            if let Some(v) = f.n_theta {
                cfg.n_theta = v;
            }
            pipeline::run_planar(&cfg, out)?;
        }
        Cmd::Sweep(f) => {
            apply_solver(&mut cfg, f);
            pipeline::run_sweep(&cfg, out)?;
        }
    }
    Ok(())
}

fn main() {
    if let Err(e) = run() {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}
