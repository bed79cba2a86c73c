//! Radial energy densities, quadratures, nonlinear residuals (raw and
//! diagonalized form) and analytic Jacobians for the coupled system.
//!
//! Conventions. With L := Δ_r − k²/r² acting componentwise (k the angular
//! degree of each component) and G∓ := f∓(f∓² + 2f±² − 1), the raw residual is
//!
//! ```text
//!   raw∓ = L f∓ + (t/2)·C± f± − G∓
//! ```
//!
//! (C± collects the cross-kinetic operator; for the physical degree n = −1 it
//! is simply Δ_r − 1/r²). Multiplying the pair by −τM⁻¹, where M is the
//! principal-part matrix [[1, t/2], [t/2, 1]] and τ = det M = 1 − t²/4, gives
//! the diagonalized residual
//!
//! ```text
//!   res∓ = N∓ − τ(Δ_r − 1/r²) f∓,   N∓ = G∓ − (t/2) G±,
//! ```
//!
//! whose principal part is uncoupled. Newton iterates on the diagonalized
//! form; the raw form is the L²(r dr) energy gradient (δI/δf = −2·raw) used
//! by the gradient flow, and its Jacobian is the discrete energy Hessian.

use crate::asym::nonlinearity;
use crate::error::{Error, Result};
use crate::linalg::BlockTridiag;
use crate::profile::ProfilePair;
use serde::{Deserialize, Serialize};

/// Renormalized potential density ẽ = ½(f₋² + f₊² − 1)² + f₋²f₊².
pub fn epot_renorm(fm: f64, fp: f64) -> f64 {
    let q = fm * fm + fp * fp - 1.0;
    0.5 * q * q + fm * fm * fp * fp
}

/// Integrated a-priori quantity 2∫₀ᴿ ẽ r dr (approaches 1 from below as R→∞
/// on the physical branch).
pub fn renormalized_potential_integral(p: &ProfilePair) -> f64 {
    let e: Vec<f64> = p
        .f_minus
        .iter()
        .zip(&p.f_plus)
        .map(|(&a, &b)| epot_renorm(a, b))
        .collect();
    2.0 * p.grid.trapz_r(&e)
}

/// Energy split into kinetic (diagonal), kinetic (cross) and potential parts.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct EnergyBreakdown {
    pub kinetic_diag: f64,
    pub kinetic_cross: f64,
    pub potential: f64,
    pub total: f64,
}

fn derivatives(p: &ProfilePair) -> (Vec<f64>, Vec<f64>) {
    let n = p.grid.n;
    let h = p.grid.h;
    let d = |f: &[f64]| -> Vec<f64> {
        let mut df = vec![0.0; n + 1];
        df[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h);
        for i in 1..n {
            df[i] = (f[i + 1] - f[i - 1]) / (2.0 * h);
        }
        df[n] = (3.0 * f[n] - 4.0 * f[n - 1] + f[n - 2]) / (2.0 * h);
        df
    };
    (d(&p.f_minus), d(&p.f_plus))
}

/// Nodal energy densities (diagonal-kinetic, cross-kinetic, potential) for the
/// physical degree; the r = 0 entries carry the limiting values.
pub fn energy_densities(p: &ProfilePair) -> Result<(Vec<f64>, Vec<f64>, Vec<f64>)> {
    if p.degree != -1 {
        return Err(Error::Unsupported(format!(
            "energy densities are implemented for degree -1 only, got {}",
            p.degree
        )));
    }
    let n = p.grid.n;
    let (dm, dp) = derivatives(p);
    let mut kin = vec![0.0; n + 1];
    let mut cross = vec![0.0; n + 1];
    let mut pot = vec![0.0; n + 1];
    for i in 0..=n {
        pot[i] = epot_renorm(p.f_minus[i], p.f_plus[i]);
        if i == 0 {
            // limits: f/r → f′(0), so f′² + f²/r² → 2f′(0)².
            kin[0] = 2.0 * (dm[0] * dm[0] + dp[0] * dp[0]);
            cross[0] = p.t * (2.0 * dm[0]) * (2.0 * dp[0]);
        } else {
            let r = p.grid.r[i];
            let am = p.f_minus[i] / r;
            let ap = p.f_plus[i] / r;
            kin[i] = dm[i] * dm[i] + am * am + dp[i] * dp[i] + ap * ap;
            cross[i] = p.t * (dm[i] + am) * (dp[i] + ap);
        }
    }
    Ok((kin, cross, pot))
}

/// Trapezoidal energy of a profile pair (physical degree only).
pub fn energy_radial(p: &ProfilePair) -> Result<EnergyBreakdown> {
    let (kin, cross, pot) = energy_densities(p)?;
    let kinetic_diag = p.grid.trapz_r(&kin);
    let kinetic_cross = p.grid.trapz_r(&cross);
    let potential = p.grid.trapz_r(&pot);
    Ok(EnergyBreakdown {
        kinetic_diag,
        kinetic_cross,
        potential,
        total: kinetic_diag + kinetic_cross + potential,
    })
}

/// Independent midpoint-rule energy: cell-average values, cell-slope
/// derivatives, midpoint radii. Agrees with [`energy_radial`] to O(h²) and
/// serves as a quadrature cross-check.
pub fn energy_radial_midpoint(p: &ProfilePair) -> Result<EnergyBreakdown> {
    if p.degree != -1 {
        return Err(Error::Unsupported(format!(
            "energy densities are implemented for degree -1 only, got {}",
            p.degree
        )));
    }
    let n = p.grid.n;
    let h = p.grid.h;
    let mut kinetic_diag = 0.0;
    let mut kinetic_cross = 0.0;
    let mut potential = 0.0;
    for i in 0..n {
        let r = (i as f64 + 0.5) * h;
        let fm = 0.5 * (p.f_minus[i] + p.f_minus[i + 1]);
        let fp = 0.5 * (p.f_plus[i] + p.f_plus[i + 1]);
        let dm = (p.f_minus[i + 1] - p.f_minus[i]) / h;
        let dp = (p.f_plus[i + 1] - p.f_plus[i]) / h;
        let w = h * r;
        kinetic_diag += w * (dm * dm + fm * fm / (r * r) + dp * dp + fp * fp / (r * r));
        kinetic_cross += w * p.t * (dm + fm / r) * (dp + fp / r);
        potential += w * epot_renorm(fm, fp);
    }
    Ok(EnergyBreakdown {
        kinetic_diag,
        kinetic_cross,
        potential,
        total: kinetic_diag + kinetic_cross + potential,
    })
}

/// Raw residual, interleaved [raw₋ᵢ, raw₊ᵢ]; boundary rows are zero
/// (Dirichlet data). Supports any equivariance degree n (components carry
/// angular factors e^{inθ} and e^{i(n+2)θ}).
pub fn residual_raw(p: &ProfilePair) -> Vec<f64> {
    let n = p.grid.n;
    let h = p.grid.h;
    let t = p.t;
    let deg = p.degree as f64;
    let k_m2 = deg * deg; // centrifugal weight for the minus component
    let k_p2 = (deg + 2.0) * (deg + 2.0);
    let mix = deg * (deg + 2.0); // cross centrifugal weight
    let first = 2.0 * (deg + 1.0); // cross first-derivative weight
    let mut out = vec![0.0; 2 * (n + 1)];
    for i in 1..n {
        let r = p.grid.r[i];
        let lap = |f: &[f64]| -> (f64, f64) {
            let d2 = (f[i + 1] - 2.0 * f[i] + f[i - 1]) / (h * h);
            let d1 = (f[i + 1] - f[i - 1]) / (2.0 * h);
            (d2 + d1 / r, d1)
        };
        let (lm, dm) = lap(&p.f_minus);
        let (lp, dp) = lap(&p.f_plus);
        let fm = p.f_minus[i];
        let fp = p.f_plus[i];
        let gm = fm * (fm * fm + 2.0 * fp * fp - 1.0);
        let gp = fp * (fp * fp + 2.0 * fm * fm - 1.0);
        let cross_on_plus = lp + first * dp / r + mix * fp / (r * r);
        let cross_on_minus = lm - first * dm / r + mix * fm / (r * r);
        out[2 * i] = lm - k_m2 * fm / (r * r) + 0.5 * t * cross_on_plus - gm;
        out[2 * i + 1] = lp - k_p2 * fp / (r * r) + 0.5 * t * cross_on_minus - gp;
    }
    out
}

/// Diagonalized residual res∓ = N∓ − τ(Δ_r − 1/r²)f∓, interleaved, zero
/// boundary rows. For the physical degree this is evaluated directly; other
/// degrees go through the −τM⁻¹ transform of the raw residual.
pub fn residual(p: &ProfilePair) -> Vec<f64> {
    if p.degree != -1 {
        return transform_raw(p.t, &residual_raw(p));
    }
    let n = p.grid.n;
    let h = p.grid.h;
    let tau = 1.0 - p.t * p.t / 4.0;
    let mut out = vec![0.0; 2 * (n + 1)];
    for i in 1..n {
        let r = p.grid.r[i];
        let lap = |f: &[f64]| -> f64 {
            (f[i + 1] - 2.0 * f[i] + f[i - 1]) / (h * h)
                + (f[i + 1] - f[i - 1]) / (2.0 * h * r)
                - f[i] / (r * r)
        };
        let (nm, np) = nonlinearity(p.t, p.f_minus[i], p.f_plus[i]);
        out[2 * i] = nm - tau * lap(&p.f_minus);
        out[2 * i + 1] = np - tau * lap(&p.f_plus);
    }
    out
}

/// Apply −τM⁻¹ = [[−1, t/2], [t/2, −1]] pairwise to an interleaved raw residual.
pub fn transform_raw(t: f64, raw: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; raw.len()];
    for i in 0..raw.len() / 2 {
        let (a, b) = (raw[2 * i], raw[2 * i + 1]);
        out[2 * i] = -a + 0.5 * t * b;
        out[2 * i + 1] = 0.5 * t * a - b;
    }
    out
}

/// Sup norm over the interleaved residual vector.
pub fn sup_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0_f64, |m, &x| m.max(x.abs()))
}

/// Jacobian of the raw residual (the discrete energy Hessian up to the −2r
/// weight): block tridiagonal with identity boundary rows.
pub fn jacobian_raw(p: &ProfilePair) -> BlockTridiag {
    let n = p.grid.n;
    let h = p.grid.h;
    let t = p.t;
    let deg = p.degree as f64;
    let k_m2 = deg * deg;
    let k_p2 = (deg + 2.0) * (deg + 2.0);
    let mix = deg * (deg + 2.0);
    let first = 2.0 * (deg + 1.0);
    let mut j = BlockTridiag::zeros(n + 1);
    j.diag[0] = [1.0, 0.0, 0.0, 1.0];
    j.diag[n] = [1.0, 0.0, 0.0, 1.0];
    for i in 1..n {
        let r = p.grid.r[i];
        let fm = p.f_minus[i];
        let fp = p.f_plus[i];
        let lap_c = -2.0 / (h * h); // ∂(Δf)ᵢ/∂fᵢ
        let lap_u = 1.0 / (h * h) + 1.0 / (2.0 * h * r);
        let lap_l = 1.0 / (h * h) - 1.0 / (2.0 * h * r);
        let dgm_dm = 3.0 * fm * fm + 2.0 * fp * fp - 1.0;
        let dgm_dp = 4.0 * fm * fp;
        let dgp_dp = 3.0 * fp * fp + 2.0 * fm * fm - 1.0;
        let dgp_dm = 4.0 * fm * fp;
        // Row for raw₋: ∂/∂f₋ then ∂/∂f₊.
        j.diag[i][0] = lap_c - k_m2 / (r * r) - dgm_dm;
        j.diag[i][1] = 0.5 * t * (lap_c + mix / (r * r)) - dgm_dp;
        j.diag[i][2] = 0.5 * t * (lap_c + mix / (r * r)) - dgp_dm;
        j.diag[i][3] = lap_c - k_p2 / (r * r) - dgp_dp;
        j.upper[i][0] = lap_u;
        j.upper[i][1] = 0.5 * t * (lap_u + first / (2.0 * h * r));
        j.upper[i][2] = 0.5 * t * (lap_u - first / (2.0 * h * r));
        j.upper[i][3] = lap_u;
        j.lower[i][0] = lap_l;
        j.lower[i][1] = 0.5 * t * (lap_l - first / (2.0 * h * r));
        j.lower[i][2] = 0.5 * t * (lap_l + first / (2.0 * h * r));
        j.lower[i][3] = lap_l;
    }
    j
}

/// Jacobian of the diagonalized residual: −τM⁻¹ applied blockwise to the raw
/// Jacobian, with boundary rows reset to identity.
pub fn jacobian(p: &ProfilePair) -> BlockTridiag {
    let t = p.t;
    let mut j = jacobian_raw(p);
    let tfm = |b: &[f64; 4]| -> [f64; 4] {
        // [[−1, t/2], [t/2, −1]] · b
        [
            -b[0] + 0.5 * t * b[2],
            -b[1] + 0.5 * t * b[3],
            0.5 * t * b[0] - b[2],
            0.5 * t * b[1] - b[3],
        ]
    };
    let n = j.n - 1;
    for i in 1..n {
        j.diag[i] = tfm(&j.diag[i]);
        j.upper[i] = tfm(&j.upper[i]);
        j.lower[i] = tfm(&j.lower[i]);
    }
    j
}
