//! Flat run configuration shared by the command-line interface and the
//! pipeline drivers. A JSON file supplies defaults; individual flags
//! override single fields. Unknown keys are rejected so typos fail loudly.

use crate::error::{Error, Result};
use crate::solver::BcMode;
use serde::{Deserialize, Serialize};
use std::path::Path;

fn d_r_max() -> f64 {
    100.0
}
fn d_n() -> usize {
    10_000
}
fn d_t() -> f64 {
    1.0
}
fn d_tol() -> f64 {
    1e-10
}
fn d_dt() -> f64 {
    0.05
}
fn d_dt_min() -> f64 {
    1e-4
}
fn d_bc() -> BcMode {
    BcMode::Asymptotic
}
fn d_degree() -> i32 {
    -1
}
fn d_delta() -> f64 {
    0.02
}
fn d_nu() -> f64 {
    0.0
}
fn d_kappa() -> f64 {
    1.0
}
fn d_n_r() -> usize {
    100
}
fn d_n_theta() -> usize {
    64
}
fn d_planar_max_iter() -> usize {
    20_000
}
fn d_planar_tol() -> f64 {
    1e-6
}
fn d_flow_steps() -> usize {
    400
}
fn d_flow_dt() -> f64 {
    2e-4
}
fn d_r_new() -> f64 {
    200.0
}
fn d_n_new() -> usize {
    20_000
}
fn d_seed() -> u64 {
    42
}
fn d_jobs() -> usize {
    1
}

/// All tunable quantities of a run, flat so that a JSON config stays simple.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Radial domain size R.
    pub r_max: f64,
    /// Number of radial cells (N+1 nodes).
    pub n: usize,
    /// Coupling strength t in [0, 1].
    pub t: f64,
    /// Newton convergence threshold on the sup-norm of the residual.
    pub tol: f64,
    /// Continuation step in t.
    pub dt: f64,
    /// Smallest continuation step before giving up.
    pub dt_min: f64,
    /// Outer boundary condition mode.
    pub bc: BcMode,
    /// Equivariance degree of the first component.
    pub degree: i32,
    /// Lower edge of the tail-fit window (defaults to 0.4 R when absent).
    pub window_lo: Option<f64>,
    /// Upper edge of the tail-fit window (defaults to 0.9 R when absent).
    pub window_hi: Option<f64>,
    /// Barrier offset for the super/sub-solution check.
    pub delta: f64,
    /// Planar anisotropy, |nu| < 1.
    pub nu: f64,
    /// Planar potential strength.
    pub kappa: f64,
    /// Planar rings.
    pub n_r: usize,
    /// Planar angular nodes.
    pub n_theta: usize,
    /// Planar descent iteration budget.
    pub planar_max_iter: usize,
    /// Planar descent gradient threshold.
    pub planar_tol: f64,
    /// Gradient-flow step budget.
    pub flow_steps: usize,
    /// Gradient-flow time step.
    pub flow_dt: f64,
    /// Target radius for domain extension.
    pub r_new: f64,
    /// Radial cells on the extended domain.
    pub n_new: usize,
    /// Seed recorded in manifests (reserved for randomized diagnostics).
    pub seed: u64,
    /// Worker threads for independent sweep points.
    pub jobs: usize,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            r_max: d_r_max(),
            n: d_n(),
            t: d_t(),
            tol: d_tol(),
            dt: d_dt(),
            dt_min: d_dt_min(),
            bc: d_bc(),
            degree: d_degree(),
            window_lo: None,
            window_hi: None,
            delta: d_delta(),
            nu: d_nu(),
            kappa: d_kappa(),
            n_r: d_n_r(),
            n_theta: d_n_theta(),
            planar_max_iter: d_planar_max_iter(),
            planar_tol: d_planar_tol(),
            flow_steps: d_flow_steps(),
            flow_dt: d_flow_dt(),
            r_new: d_r_new(),
            n_new: d_n_new(),
            seed: d_seed(),
            jobs: d_jobs(),
        }
    }
}

impl RunConfig {
    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let cfg: Self = serde_json::from_str(&text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.t) {
            return Err(Error::InvalidArgument(format!(
                "coupling t must lie in [0, 1], got {}",
                self.t
            )));
        }
        if self.nu.abs() >= 1.0 {
            return Err(Error::InvalidArgument(format!(
                "anisotropy nu must satisfy |nu| < 1, got {}",
                self.nu
            )));
        }
        if !(self.tol > 0.0) || !(self.dt > 0.0) || !(self.dt_min > 0.0) {
            return Err(Error::InvalidArgument(
                "tol, dt and dt_min must all be positive".into(),
            ));
        }
        if self.jobs == 0 {
            return Err(Error::InvalidArgument("jobs must be at least 1".into()));
        }
        Ok(())
    }

    /// Tail-fit window with defaults relative to the domain size.
    pub fn fit_window(&self) -> (f64, f64) {
        (
            self.window_lo.unwrap_or(0.4 * self.r_max),
            self.window_hi.unwrap_or(0.9 * self.r_max),
        )
    }

    pub fn to_value(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("config serializes")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip_through_json() {
        let cfg = RunConfig::default();
        let text = serde_json::to_string(&cfg).unwrap();
        let back: RunConfig = serde_json::from_str(&text).unwrap();
        assert_eq!(back.n, cfg.n);
        assert_eq!(back.bc, cfg.bc);
        assert_eq!(back.window_lo, None);
    }

    #[test]
    fn partial_files_fill_in_defaults_and_unknown_keys_fail() {
        let cfg: RunConfig = serde_json::from_str(r#"{"t": 0.5, "n": 500}"#).unwrap();
        assert_eq!(cfg.t, 0.5);
        assert_eq!(cfg.n, 500);
        assert_eq!(cfg.r_max, 100.0);
        let bad: std::result::Result<RunConfig, _> =
            serde_json::from_str(r#"{"tee": 0.5}"#);
        assert!(bad.is_err());
    }

    #[test]
    fn validation_rejects_out_of_range_values() {
        let mut cfg = RunConfig::default();
        cfg.t = 1.5;
        assert!(cfg.validate().is_err());
        cfg.t = 0.5;
        cfg.nu = -1.0;
        assert!(cfg.validate().is_err());
        cfg.nu = 0.0;
        cfg.jobs = 0;
        assert!(cfg.validate().is_err());
    }
}
