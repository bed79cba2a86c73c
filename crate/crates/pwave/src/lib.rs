//! Equivariant vortex profiles for a two-component p-wave Ginzburg–Landau system.
//!
//! The order parameter is a pair of complex fields (η₋, η₊) on a disk of radius R.
//! In the degree-(−1) equivariant class, η₋ = f₋(r)e^{−iθ} and η₊ = f₊(r)e^{iθ},
//! and the Euler–Lagrange equations reduce to a coupled radial system for
//! (f₋, f₊) with a coupling strength t ∈ [0, 1]:
//!
//! ```text
//!   Δ_r f∓ − f∓/r² + (t/2)(Δ_r f± − f±/r²) = f∓(f∓² − 1) + 2 f∓ f±²
//! ```
//!
//! where Δ_r = d²/dr² + (1/r) d/dr. At t = 0 the system decouples into two copies
//! of the classical Ginzburg–Landau vortex equation (one with trivial data), which
//! is the base point of the continuation in t implemented here.
//!
//! The crate provides, roughly bottom-up:
//!
//! - [`grid`]: uniform radial grids and r-weighted quadrature;
//! - [`profile`]: radial profile pairs, CSV (de)serialization, interpolation;
//! - [`linalg`]: scalar and 2×2-block tridiagonal solvers, a Sturm-sequence
//!   bisection eigenvalue oracle, and plain conjugate gradients;
//! - [`asym`]: far-field expansion coefficients, super/subsolution tail models
//!   and their exact residuals, inverse-power tail fits, Pohozaev-type identity
//!   checks;
//! - [`radial`]: energy densities, quadratures, the nonlinear residual in raw and
//!   diagonalized form, and analytic Jacobians;
//! - [`classical`]: the decoupled (classical) vortex profile solver;
//! - [`solver`]: damped Newton iteration, continuation in t, domain extension,
//!   gradient flow, and the exploratory general-degree solver;
//! - [`linearization`]: radial Schrödinger-type operators around a profile,
//!   smallest eigenvalues, quadratic forms, the first-order corrector problem,
//!   and the pointwise embedding inequality check;
//! - [`planar`]: the full planar (non-equivariant) energy on a polar disk mesh,
//!   its gradient, a Barzilai–Borwein minimizer, radial embedding, angular mode
//!   analysis, and a coercivity estimate for the kinetic form;
//! - [`config`], [`report`], [`pipeline`]: run configuration, serializable
//!   reports/manifests, and the end-to-end command implementations used by the
//!   `pwave` binary and the examples.

pub mod asym;
pub mod classical;
pub mod config;
pub mod error;
pub mod grid;
pub mod linalg;
pub mod linearization;
pub mod pipeline;
pub mod planar;
pub mod profile;
pub mod radial;
pub mod report;
pub mod solver;

pub use error::{Error, Result};
