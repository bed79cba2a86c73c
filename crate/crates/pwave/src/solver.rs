//! Damped Newton iteration for the coupled system, continuation in the
//! coupling t, domain extension, energy-monotone gradient flow, and the
//! exploratory general-degree solver.

use crate::asym::TailCoeffs;
use crate::error::{Error, Result};
use crate::grid::RadialGrid;
use crate::profile::ProfilePair;
use crate::radial::{energy_radial, jacobian, residual, residual_raw, sup_norm};
use crate::report::{FlowReport, SolveReport};
use serde::{Deserialize, Serialize};
use std::str::FromStr;

/// Boundary-condition mode at r = R.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BcMode {
    /// Truncated far-field expansion: f₋(R) = 1 + a₋/R² + b₋/R⁴,
    /// f₊(R) = t(a₊/R² + b₊/R⁴).
    Asymptotic,
    /// Sharp vacuum values (1, 0).
    Sharp,
}

impl FromStr for BcMode {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "asymptotic" => Ok(BcMode::Asymptotic),
            "sharp" => Ok(BcMode::Sharp),
            other => Err(Error::InvalidArgument(format!(
                "unknown boundary mode '{other}' (expected 'asymptotic' or 'sharp')"
            ))),
        }
    }
}

impl std::fmt::Display for BcMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            BcMode::Asymptotic => write!(f, "asymptotic"),
            BcMode::Sharp => write!(f, "sharp"),
        }
    }
}

/// Boundary values (f₋(R), f₊(R)) at coupling t under the given mode.
pub fn boundary_values(t: f64, r_max: f64, bc: BcMode) -> Result<(f64, f64)> {
    match bc {
        BcMode::Sharp => Ok((1.0, 0.0)),
        BcMode::Asymptotic => {
            let c = TailCoeffs::new(t)?;
            let s = 1.0 / (r_max * r_max);
            Ok((
                1.0 + c.a_minus * s + c.b_minus * s * s,
                t * (c.a_plus * s + c.b_plus * s * s),
            ))
        }
    }
}

/// Knobs for the damped Newton iteration.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct NewtonOptions {
    pub tol: f64,
    pub max_iter: usize,
    pub max_backtracks: usize,
}

impl Default for NewtonOptions {
    fn default() -> Self {
        Self {
            tol: 1e-10,
            max_iter: 60,
            max_backtracks: 30,
        }
    }
}

/// Newton-iterate the profile in place (boundary nodes are data and stay
/// fixed). Line search: Armijo decrease on the residual sup-norm.
pub fn newton(p: &mut ProfilePair, opts: &NewtonOptions) -> Result<SolveReport> {
    let start = std::time::Instant::now();
    let mut damping_events = 0;
    for iter in 0..opts.max_iter {
        let res = residual(p);
        let norm = sup_norm(&res);
        if !norm.is_finite() {
            return Err(Error::NumericalBreakdown(
                "non-finite residual in Newton iteration".into(),
            ));
        }
        if norm <= opts.tol {
            return Ok(SolveReport {
                converged: true,
                iterations: iter,
                final_residual: norm,
                tol: opts.tol,
                damping_events,
                wall_ms: start.elapsed().as_secs_f64() * 1e3,
            });
        }
        let j = jacobian(p);
        let rhs: Vec<f64> = res.iter().map(|&x| -x).collect();
        let delta = j.solve(&rhs)?;
        let mut lam = 1.0;
        let mut accepted = false;
        for bt in 0..opts.max_backtracks {
            let mut trial = p.clone();
            for i in 0..p.grid.len() {
                trial.f_minus[i] += lam * delta[2 * i];
                trial.f_plus[i] += lam * delta[2 * i + 1];
            }
            let norm_trial = sup_norm(&residual(&trial));
            if norm_trial <= (1.0 - 1e-4 * lam) * norm {
                *p = trial;
                accepted = true;
                if bt > 0 {
                    damping_events += 1;
                }
                break;
            }
            lam *= 0.5;
        }
        if !accepted {
            return Err(Error::SolverFailure {
                final_residual: norm,
                iterations: iter,
                tol: opts.tol,
            });
        }
    }
    Err(Error::SolverFailure {
        final_residual: sup_norm(&residual(p)),
        iterations: opts.max_iter,
        tol: opts.tol,
    })
}

/// Single-shot solve at coupling t from an optional initial guess (defaults
/// to the inverse-power tail seed, which lies in the Newton basin across the
/// whole homotopy on the grids used here). Boundary nodes are overwritten
/// with the requested mode's values before iterating.
pub fn solve_pwave(
    grid: RadialGrid,
    t: f64,
    bc: BcMode,
    init: Option<&ProfilePair>,
    opts: &NewtonOptions,
) -> Result<(ProfilePair, SolveReport)> {
    let mut p = match init {
        Some(q) => {
            let mut p = q.interp_onto(grid)?;
            p.t = t;
            p
        }
        None => ProfilePair::tail_seed(grid, t)?,
    };
    let (bm, bp) = boundary_values(t, p.grid.r_max, bc)?;
    let n = p.grid.n;
    p.f_minus[0] = 0.0;
    p.f_plus[0] = 0.0;
    p.f_minus[n] = bm;
    p.f_plus[n] = bp;
    let report = newton(&mut p, opts)?;
    Ok((p, report))
}

/// One converged member of a continuation family.
#[derive(Debug, Clone)]
pub struct FamilyMember {
    pub t: f64,
    pub profile: ProfilePair,
    pub report: SolveReport,
}

/// Continue the solution branch from the classical base at t = 0 up to
/// `t_end` in steps of `dt` (targets are k·dt by index, so sweep points like
/// 0.25/0.5/0.75 are hit exactly). Failed steps are bisected recursively down
/// to `dt_min`; intermediate bisection points are not recorded.
pub fn continue_in_t(
    grid: RadialGrid,
    t_end: f64,
    dt: f64,
    dt_min: f64,
    bc: BcMode,
    opts: &NewtonOptions,
) -> Result<Vec<FamilyMember>> {
    if !(0.0..=1.0).contains(&t_end) {
        return Err(Error::InvalidArgument(format!(
            "continuation target t must lie in [0, 1], got {t_end}"
        )));
    }
    if !(dt > 0.0 && dt_min > 0.0 && dt_min <= dt) {
        return Err(Error::InvalidArgument(format!(
            "continuation needs 0 < dt_min <= dt, got dt = {dt}, dt_min = {dt_min}"
        )));
    }
    let (base, base_report) = crate::classical::solve_classical(grid, bc, opts.tol, opts.max_iter)?;
    let mut members = vec![FamilyMember {
        t: 0.0,
        profile: base,
        report: base_report,
    }];
    let steps = (t_end / dt - 1e-12).ceil().max(0.0) as usize;
    let mut prev: Option<ProfilePair> = None; // member before the current head
    for k in 1..=steps {
        let target = (k as f64 * dt).min(t_end);
        let head = members.last().unwrap().profile.clone();
        let (profile, report) = advance(&head, prev.as_ref(), target, dt_min, bc, opts)?;
        prev = Some(head);
        members.push(FamilyMember {
            t: target,
            profile,
            report,
        });
    }
    Ok(members)
}

/// Advance from a converged profile to coupling `target`, bisecting on
/// failure. `prev` is an earlier member used for linear extrapolation.
fn advance(
    from: &ProfilePair,
    prev: Option<&ProfilePair>,
    target: f64,
    dt_min: f64,
    bc: BcMode,
    opts: &NewtonOptions,
) -> Result<(ProfilePair, SolveReport)> {
    let mut guess = from.clone();
    guess.t = target;
    if let Some(q) = prev {
        // Linear predictor in t (captures the O(t) growth of f₊ directly).
        let span = from.t - q.t;
        if span > 1e-14 {
            let s = (target - from.t) / span;
            for i in 0..guess.grid.len() {
                guess.f_minus[i] += s * (from.f_minus[i] - q.f_minus[i]);
                guess.f_plus[i] += s * (from.f_plus[i] - q.f_plus[i]);
            }
        }
    }
    let (bm, bp) = boundary_values(target, guess.grid.r_max, bc)?;
    let n = guess.grid.n;
    guess.f_minus[n] = bm;
    guess.f_plus[n] = bp;
    match newton(&mut guess, opts) {
        Ok(report) => Ok((guess, report)),
        Err(Error::SolverFailure { .. }) | Err(Error::NumericalBreakdown(_)) => {
            let gap = target - from.t;
            if gap <= dt_min {
                return Err(Error::ContinuationStalled {
                    reached_t: from.t,
                    stalled_at: target,
                });
            }
            let mid = from.t + 0.5 * gap;
            let (mid_profile, _) = advance(from, prev, mid, dt_min, bc, opts)?;
            advance(&mid_profile, Some(from), target, dt_min, bc, opts)
        }
        Err(e) => Err(e),
    }
}

/// Re-solve a converged profile on a larger domain: interpolate, pad with the
/// far-field model, refresh boundary data, Newton-polish.
pub fn extend_domain(
    p: &ProfilePair,
    r_new: f64,
    n_new: usize,
    bc: BcMode,
    opts: &NewtonOptions,
) -> Result<(ProfilePair, SolveReport)> {
    if r_new <= p.grid.r_max {
        return Err(Error::InvalidArgument(format!(
            "extension radius {r_new} must exceed the current radius {}",
            p.grid.r_max
        )));
    }
    let grid = RadialGrid::new(r_new, n_new)?;
    solve_pwave(grid, p.t, bc, Some(p), opts)
}

/// Energy-monotone gradient flow: f ← f + 2·dt·raw (the L²(r dr) descent
/// direction), with the step halved until the discrete energy does not
/// increase. Boundary nodes stay fixed. Runs `steps` accepted steps.
pub fn gradient_flow(
    p0: &ProfilePair,
    steps: usize,
    dt: f64,
) -> Result<(ProfilePair, FlowReport)> {
    if !(dt > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "flow step must be positive, got {dt}"
        )));
    }
    let mut p = p0.clone();
    let mut energy = energy_radial(&p)?.total;
    let initial_energy = energy;
    let initial_residual = sup_norm(&residual(&p));
    let mut dt_eff = dt;
    let mut halvings = 0;
    let mut energy_trace = Vec::with_capacity(steps.min(100_000) + 1);
    energy_trace.push(energy);
    for _ in 0..steps {
        let raw = residual_raw(&p);
        loop {
            let mut trial = p.clone();
            for i in 1..p.grid.n {
                trial.f_minus[i] += 2.0 * dt_eff * raw[2 * i];
                trial.f_plus[i] += 2.0 * dt_eff * raw[2 * i + 1];
            }
            let e_trial = energy_radial(&trial)?.total;
            if !e_trial.is_finite() {
                return Err(Error::NumericalBreakdown(
                    "non-finite energy along the gradient flow".into(),
                ));
            }
            if e_trial <= energy + 1e-12 * energy.abs().max(1.0) {
                p = trial;
                energy = e_trial;
                energy_trace.push(energy);
                // Gently re-open the step after a successful move.
                dt_eff = (dt_eff * 1.2).min(dt);
                break;
            }
            dt_eff *= 0.5;
            halvings += 1;
            if dt_eff < dt / 1e6 {
                return Err(Error::StepSizeFailure(format!(
                    "flow step collapsed below {:.3e} without energy decrease",
                    dt / 1e6
                )));
            }
        }
    }
    let final_residual = sup_norm(&residual(&p));
    Ok((
        p,
        FlowReport {
            steps,
            halvings,
            initial_energy,
            final_energy: energy,
            initial_residual_sup: initial_residual,
            final_residual_sup: final_residual,
            energy_trace,
        },
    ))
}

/// Exploratory solver for other equivariance degrees (components e^{inθ},
/// e^{i(n+2)θ}) at full coupling with sharp boundary data. Convergence is not
/// guaranteed away from n = −1; failures surface as `SolverFailure`.
pub fn solve_general_degree(
    grid: RadialGrid,
    degree: i32,
    opts: &NewtonOptions,
) -> Result<(ProfilePair, SolveReport)> {
    let n = grid.n;
    let f_minus: Vec<f64> = grid.r.iter().map(|&r| r / (r * r + 1.0).sqrt()).collect();
    let f_plus: Vec<f64> = grid.r.iter().map(|&r| -0.1 * r / (1.0 + r * r)).collect();
    let mut p = ProfilePair::new(grid, 1.0, f_minus, f_plus)?;
    p.degree = degree;
    p.f_minus[0] = 0.0;
    p.f_plus[0] = 0.0;
    p.f_minus[n] = 1.0;
    p.f_plus[n] = 0.0;
    let report = newton(&mut p, opts)?;
    Ok((p, report))
}
