//! Far-field asymptotics: expansion coefficients, super/subsolution tail
//! models with exact residuals, inverse-power tail fits, and the
//! Pohozaev-type identity at full coupling.

use crate::error::{Error, Result};
use crate::profile::ProfilePair;
use serde::{Deserialize, Serialize};

/// Coefficients of the far-field expansion
/// f₋ = 1 + a₋/r² + b₋/r⁴ + O(r⁻⁶),  f₊ = t·(a₊/r² + b₊/r⁴ + O(r⁻⁶)).
///
/// Both orders reduce to 2×2 linear systems with matrix
/// [[2, −t²/2], [−1, 1]] (determinant 2τ, τ = 1 − t²/4 ≥ 3/4, so the systems
/// are uniformly solvable on t ∈ [0, 1]).
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct TailCoeffs {
    pub t: f64,
    pub tau: f64,
    pub a_minus: f64,
    pub a_plus: f64,
    pub b_minus: f64,
    pub b_plus: f64,
}

fn solve_2x2(m: [[f64; 2]; 2], rhs: [f64; 2]) -> Result<[f64; 2]> {
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    if det.abs() < 1e-12 {
        return Err(Error::NumericalBreakdown(format!(
            "singular 2x2 coefficient system (det {det:.3e})"
        )));
    }
    Ok([
        (rhs[0] * m[1][1] - m[0][1] * rhs[1]) / det,
        (m[0][0] * rhs[1] - rhs[0] * m[1][0]) / det,
    ])
}

impl TailCoeffs {
    /// Solve the two coefficient systems at coupling t ∈ [0, 1].
    pub fn new(t: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::InvalidArgument(format!(
                "coupling t must lie in [0, 1], got {t}"
            )));
        }
        let tau = 1.0 - t * t / 4.0;
        let m = [[2.0, -t * t / 2.0], [-1.0, 1.0]];
        let [a_minus, a_plus] = solve_2x2(m, [-tau, 0.0])?;
        // Second-order right-hand side: quadratic feedback of the a-terms plus
        // the radial Laplacian acting on a/r² (Δ_r r⁻² = 4 r⁻⁴, net 3a/r⁴ after
        // subtracting the centrifugal term).
        let rb0 = 3.0 * tau * a_minus - 3.0 * a_minus * a_minus + 2.0 * t * t * a_plus * a_minus
            - 2.0 * t * t * a_plus * a_plus;
        let rb1 = 3.0 * tau * a_plus + 1.5 * a_minus * a_minus + t * t * a_plus * a_plus
            - 4.0 * a_plus * a_minus;
        let [b_minus, b_plus] = solve_2x2(m, [rb0, rb1])?;
        Ok(Self {
            t,
            tau,
            a_minus,
            a_plus,
            b_minus,
            b_plus,
        })
    }
}

/// The coupling nonlinearity of the diagonalized system,
/// N₋ = f₋(2f₊² + f₋² − 1) − (t/2)·f₊(2f₋² + f₊² − 1) and its mirror image.
pub(crate) fn nonlinearity(t: f64, fm: f64, fp: f64) -> (f64, f64) {
    let nm = fm * (2.0 * fp * fp + fm * fm - 1.0) - 0.5 * t * fp * (2.0 * fm * fm + fp * fp - 1.0);
    let np = fp * (2.0 * fm * fm + fp * fp - 1.0) - 0.5 * t * fm * (2.0 * fp * fp + fm * fm - 1.0);
    (nm, np)
}

/// A three-term inverse-power tail model
/// w₋ = 1 + a₋/r² + b₋/r⁴ + c₋R⁶/r⁶,  w₊ = t·(a₊/r² + b₊/r⁴ + c₊R⁶/r⁶),
/// used as a super- or subsolution candidate beyond the anchor radius R.
#[derive(Debug, Clone, Copy)]
pub struct TailModel {
    pub coeffs: TailCoeffs,
    /// Anchor radius R entering the r⁻⁶ terms as R⁶.
    pub r_anchor: f64,
    pub c_minus: f64,
    pub c_plus: f64,
}

impl TailModel {
    /// Supersolution candidate: c₋ = δ, c₊ = 2δ.
    pub fn supersolution(t: f64, r_anchor: f64, delta: f64) -> Result<Self> {
        if !(delta > 0.0) || !(r_anchor > 0.0) {
            return Err(Error::InvalidArgument(
                "supersolution needs delta > 0 and anchor radius > 0".into(),
            ));
        }
        Ok(Self {
            coeffs: TailCoeffs::new(t)?,
            r_anchor,
            c_minus: delta,
            c_plus: 2.0 * delta,
        })
    }

    /// Subsolution candidate: the mirror image with c₋ = −δ, c₊ = −2δ.
    pub fn subsolution(t: f64, r_anchor: f64, delta: f64) -> Result<Self> {
        let mut m = Self::supersolution(t, r_anchor, delta)?;
        m.c_minus = -m.c_minus;
        m.c_plus = -m.c_plus;
        Ok(m)
    }

    /// Plain truncated expansion (no r⁻⁶ correction).
    pub fn plain(t: f64) -> Result<Self> {
        Ok(Self {
            coeffs: TailCoeffs::new(t)?,
            r_anchor: 1.0,
            c_minus: 0.0,
            c_plus: 0.0,
        })
    }

    /// Model values (w₋, w₊) at radius r.
    pub fn value(&self, r: f64) -> (f64, f64) {
        let s = 1.0 / (r * r);
        let r6 = self.r_anchor.powi(6);
        let c = &self.coeffs;
        let wm = 1.0 + c.a_minus * s + c.b_minus * s * s + self.c_minus * r6 * s * s * s;
        let wp = c.t * (c.a_plus * s + c.b_plus * s * s + self.c_plus * r6 * s * s * s);
        (wm, wp)
    }

    /// Exact elliptic residuals E∓ = −τ(Δ_r − 1/r²)w∓ + N∓(w) at radius r,
    /// using the closed form Δ_r r⁻²ᵏ = 4k² r⁻²ᵏ⁻².
    pub fn residual(&self, r: f64) -> (f64, f64) {
        let c = &self.coeffs;
        let r6 = self.r_anchor.powi(6);
        let (wm, wp) = self.value(r);
        let s = 1.0 / (r * r);
        let lap_m =
            4.0 * c.a_minus * s * s + 16.0 * c.b_minus * s * s * s + 36.0 * self.c_minus * r6 * s * s * s * s;
        let lap_p = c.t
            * (4.0 * c.a_plus * s * s
                + 16.0 * c.b_plus * s * s * s
                + 36.0 * self.c_plus * r6 * s * s * s * s);
        let (nm, np) = nonlinearity(c.t, wm, wp);
        let em = -c.tau * (lap_m - wm * s) + nm;
        let ep = -c.tau * (lap_p - wp * s) + np;
        (em, ep)
    }
}

/// Outcome of sampling a tail model's residuals on [lo, hi].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BarrierCheck {
    pub r_lo: f64,
    pub r_hi: f64,
    pub samples: usize,
    pub min_e_minus: f64,
    pub min_e_plus: f64,
    pub max_e_minus: f64,
    pub max_e_plus: f64,
    /// True when both residuals are strictly positive on the whole window
    /// (supersolution verdict; for a subsolution check the max fields < 0).
    pub all_positive: bool,
    pub all_negative: bool,
}

/// Sample E∓ on a log-uniform grid of `samples` points in [lo, hi].
pub fn barrier_check(model: &TailModel, lo: f64, hi: f64, samples: usize) -> Result<BarrierCheck> {
    if !(lo > 0.0 && hi > lo && samples >= 2) {
        return Err(Error::InvalidArgument(
            "barrier check needs 0 < lo < hi and at least 2 samples".into(),
        ));
    }
    let mut min_m = f64::INFINITY;
    let mut min_p = f64::INFINITY;
    let mut max_m = f64::NEG_INFINITY;
    let mut max_p = f64::NEG_INFINITY;
    let ratio = (hi / lo).ln();
    for k in 0..samples {
        let r = lo * (ratio * k as f64 / (samples - 1) as f64).exp();
        let (em, ep) = model.residual(r);
        min_m = min_m.min(em);
        min_p = min_p.min(ep);
        max_m = max_m.max(em);
        max_p = max_p.max(ep);
    }
    Ok(BarrierCheck {
        r_lo: lo,
        r_hi: hi,
        samples,
        min_e_minus: min_m,
        min_e_plus: min_p,
        max_e_minus: max_m,
        max_e_plus: max_p,
        all_positive: min_m > 0.0 && min_p > 0.0,
        all_negative: max_m < 0.0 && max_p < 0.0,
    })
}

/// Smallest anchor radius R in [2, r_cap] for which the supersolution verdict
/// holds on [R, 10R] (bisection to 1e-3; the verdict is monotone in practice).
pub fn validity_radius(t: f64, delta: f64, r_cap: f64, samples: usize) -> Result<f64> {
    let verdict = |r: f64| -> Result<bool> {
        let m = TailModel::supersolution(t, r, delta)?;
        Ok(barrier_check(&m, r, 10.0 * r, samples)?.all_positive)
    };
    let mut lo = 2.0;
    let mut hi = r_cap;
    if verdict(lo)? {
        return Ok(lo);
    }
    if !verdict(hi)? {
        return Err(Error::NumericalBreakdown(format!(
            "supersolution verdict fails even at anchor radius {r_cap}"
        )));
    }
    while hi - lo > 1e-3 {
        let mid = 0.5 * (lo + hi);
        if verdict(mid)? {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Least-squares fit of nodal values y(r) ≈ p/r² + q/r⁴ over a window.
pub fn fit_inverse_powers(r: &[f64], y: &[f64]) -> Result<(f64, f64)> {
    assert_eq!(r.len(), y.len());
    if r.len() < 8 {
        return Err(Error::InvalidArgument(format!(
            "inverse-power fit needs at least 8 samples, got {}",
            r.len()
        )));
    }
    // Work in the scaled variable u = (r₀/r)² ∈ (0, 1] so the normal
    // equations stay O(1)-conditioned on far-out windows.
    let r0 = r[0];
    let (mut s22, mut s23, mut s33, mut b2, mut b3) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for (&ri, &yi) in r.iter().zip(y) {
        let u = (r0 / ri) * (r0 / ri);
        s22 += u * u;
        s23 += u * u * u;
        s33 += u * u * u * u;
        b2 += u * yi;
        b3 += u * u * yi;
    }
    let [alpha, beta] = solve_2x2([[s22, s23], [s23, s33]], [b2, b3])?;
    Ok((alpha * r0 * r0, beta * r0.powi(4)))
}

/// Result of fitting a solved profile's tail against the expansion model.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FittedTail {
    pub window_lo: f64,
    pub window_hi: f64,
    pub a_minus: f64,
    pub b_minus: f64,
    pub rms_minus: f64,
    /// None at t = 0 where f₊ ≡ 0 carries no tail information.
    pub plus: Option<FittedPlusTail>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct FittedPlusTail {
    pub a_plus: f64,
    pub b_plus: f64,
    pub rms_plus: f64,
}

/// Fit (f₋ − 1) and f₊/t against p/r² + q/r⁴ on the window [lo, hi].
pub fn fit_tail(p: &ProfilePair, lo: f64, hi: f64) -> Result<FittedTail> {
    let idx = p.grid.window(lo, hi)?;
    let r: Vec<f64> = idx.clone().map(|i| p.grid.r[i]).collect();
    let ym: Vec<f64> = idx.clone().map(|i| p.f_minus[i] - 1.0).collect();
    let (a_minus, b_minus) = fit_inverse_powers(&r, &ym)?;
    let rms = |coef: (f64, f64), y: &[f64]| -> f64 {
        let mut acc = 0.0;
        for (&ri, &yi) in r.iter().zip(y) {
            let s = 1.0 / (ri * ri);
            let e = yi - coef.0 * s - coef.1 * s * s;
            acc += e * e;
        }
        (acc / y.len() as f64).sqrt()
    };
    let rms_minus = rms((a_minus, b_minus), &ym);
    let plus = if p.t.abs() < 1e-14 {
        None
    } else {
        let yp: Vec<f64> = idx.map(|i| p.f_plus[i] / p.t).collect();
        let (a_plus, b_plus) = fit_inverse_powers(&r, &yp)?;
        Some(FittedPlusTail {
            a_plus,
            b_plus,
            rms_plus: rms((a_plus, b_plus), &yp),
        })
    };
    Ok(FittedTail {
        window_lo: lo,
        window_hi: hi,
        a_minus,
        b_minus,
        rms_minus,
        plus,
    })
}

/// Fit f′ ≈ c/r³ on a window (centered differences at interior nodes).
/// Returns (c for f₋′, c for f₊′/t; the latter is NaN at t = 0).
pub fn derivative_tail_fit(p: &ProfilePair, lo: f64, hi: f64) -> Result<(f64, f64)> {
    let idx = p.grid.window(lo, hi)?;
    let h = p.grid.h;
    let mut num_m = 0.0;
    let mut num_p = 0.0;
    let mut den = 0.0;
    for i in idx {
        if i == 0 || i == p.grid.n {
            continue;
        }
        let r = p.grid.r[i];
        let w = r.powi(-3);
        let dm = (p.f_minus[i + 1] - p.f_minus[i - 1]) / (2.0 * h);
        let dp = (p.f_plus[i + 1] - p.f_plus[i - 1]) / (2.0 * h);
        num_m += dm * w;
        num_p += dp * w;
        den += w * w;
    }
    if den == 0.0 {
        return Err(Error::InvalidArgument(
            "derivative tail window has no interior nodes".into(),
        ));
    }
    let c_minus = num_m / den;
    let c_plus = if p.t.abs() < 1e-14 {
        f64::NAN
    } else {
        num_p / den / p.t
    };
    Ok((c_minus, c_plus))
}

/// Pohozaev-type identity report at full coupling (t = 1). The pointwise form
/// is dP/dr = r² dẽ/dr with
/// P(r) = r²(f₋′² + f₊′² + f₋′f₊′) − (f₋² + f₊² + f₋f₊) and
/// ẽ = ½(f₋² + f₊² − 1)² + f₋²f₊²; the integrated form is
/// 2∫₀ᴿ ẽ r dr = R²ẽ(R) − P(R).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PohozaevReport {
    /// sup over interior nodes of |dP/dr − r² dẽ/dr| (centered differences).
    pub sup_pointwise_mismatch: f64,
    /// 2∫₀ᴿ ẽ r dr.
    pub integral_lhs: f64,
    /// R²ẽ(R) − P(R) with the derivative cross term r²f₋′f₊′ in P.
    pub boundary_rhs_derivative_variant: f64,
    /// Same but with the cross term replaced by r²f₋f₊ (a commonly mis-stated
    /// form; kept for comparison — it is O(1) wrong in the far field).
    pub boundary_rhs_value_variant: f64,
    pub mismatch_derivative_variant: f64,
    pub mismatch_value_variant: f64,
}

/// Evaluate the identity on a solved profile; only defined at t = 1.
pub fn pohozaev_residual(p: &ProfilePair) -> Result<PohozaevReport> {
    if (p.t - 1.0).abs() > 1e-12 {
        return Err(Error::Unsupported(format!(
            "the Pohozaev identity in this form holds only at t = 1, got t = {}",
            p.t
        )));
    }
    let g = &p.grid;
    let n = g.n;
    let h = g.h;
    let epot = |fm: f64, fp: f64| -> f64 {
        let q = fm * fm + fp * fp - 1.0;
        0.5 * q * q + fm * fm * fp * fp
    };
    // Nodal P and ẽ with centered derivatives at interior nodes.
    let mut pfun = vec![f64::NAN; n + 1];
    let mut e = vec![0.0; n + 1];
    for i in 0..=n {
        e[i] = epot(p.f_minus[i], p.f_plus[i]);
    }
    for i in 1..n {
        let dm = (p.f_minus[i + 1] - p.f_minus[i - 1]) / (2.0 * h);
        let dp = (p.f_plus[i + 1] - p.f_plus[i - 1]) / (2.0 * h);
        let r = g.r[i];
        pfun[i] = r * r * (dm * dm + dp * dp + dm * dp)
            - (p.f_minus[i] * p.f_minus[i]
                + p.f_plus[i] * p.f_plus[i]
                + p.f_minus[i] * p.f_plus[i]);
    }
    let mut sup = 0.0_f64;
    for i in 2..n - 1 {
        let dpdr = (pfun[i + 1] - pfun[i - 1]) / (2.0 * h);
        let dedr = (e[i + 1] - e[i - 1]) / (2.0 * h);
        let r = g.r[i];
        sup = sup.max((dpdr - r * r * dedr).abs());
    }
    // Integrated identity; boundary derivatives by one-sided second order.
    let integral_lhs = 2.0 * g.trapz_r(&e);
    let one_sided = |f: &[f64]| (3.0 * f[n] - 4.0 * f[n - 1] + f[n - 2]) / (2.0 * h);
    let dmr = one_sided(&p.f_minus);
    let dpr = one_sided(&p.f_plus);
    let (fm_r, fp_r) = (p.f_minus[n], p.f_plus[n]);
    let r2 = g.r_max * g.r_max;
    let values = fm_r * fm_r + fp_r * fp_r + fm_r * fp_r;
    let p_deriv = r2 * (dmr * dmr + dpr * dpr + dmr * dpr) - values;
    let p_value = r2 * (dmr * dmr + dpr * dpr + fm_r * fp_r) - values;
    let boundary_rhs_derivative_variant = r2 * e[n] - p_deriv;
    let boundary_rhs_value_variant = r2 * e[n] - p_value;
    Ok(PohozaevReport {
        sup_pointwise_mismatch: sup,
        integral_lhs,
        boundary_rhs_derivative_variant,
        boundary_rhs_value_variant,
        mismatch_derivative_variant: integral_lhs - boundary_rhs_derivative_variant,
        mismatch_value_variant: integral_lhs - boundary_rhs_value_variant,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};

    #[test]
    fn coefficients_match_closed_forms_across_the_sweep() {
        // a∓ = −1/2, b₋ = −(5t² + 9)/8, b₊ = −13/4, uniformly on [0, 1].
        for k in 0..=100 {
            let t = k as f64 / 100.0;
            let c = TailCoeffs::new(t).unwrap();
            assert_abs_diff_eq!(c.a_minus, -0.5, epsilon = 1e-12);
            assert_abs_diff_eq!(c.a_plus, -0.5, epsilon = 1e-12);
            assert_abs_diff_eq!(c.b_minus, -(5.0 * t * t + 9.0) / 8.0, epsilon = 1e-12);
            assert_abs_diff_eq!(c.b_plus, -3.25, epsilon = 1e-12);
            assert_abs_diff_eq!(c.tau, 1.0 - t * t / 4.0, epsilon = 1e-15);
        }
        // Classical limit: b₋(0) = −9/8.
        let c0 = TailCoeffs::new(0.0).unwrap();
        assert_abs_diff_eq!(c0.b_minus, -9.0 / 8.0, epsilon = 1e-13);
        assert!(TailCoeffs::new(-0.1).is_err());
        assert!(TailCoeffs::new(1.2).is_err());
    }

    #[test]
    fn plain_tail_residual_decays_like_r_to_minus_six() {
        // With c∓ = 0 the model solves the system through O(r⁻⁴), so the
        // residual must decay like r⁻⁶: fit the log-log slope on [2R, 10R].
        let model = TailModel::plain(1.0).unwrap();
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for k in 0..40 {
            let r = 60.0 * (1.0 + k as f64 * 0.1);
            let (em, ep) = model.residual(r);
            let e = em.abs().max(ep.abs());
            xs.push(r.ln());
            ys.push(e.ln());
        }
        let n = xs.len() as f64;
        let mx = xs.iter().sum::<f64>() / n;
        let my = ys.iter().sum::<f64>() / n;
        let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
        let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
        let slope = sxy / sxx;
        assert_abs_diff_eq!(slope, -6.0, epsilon = 0.1);
    }

    #[test]
    fn supersolution_is_positive_and_subsolution_negative() {
        for &t in &[0.3, 0.7, 1.0] {
            let sup = TailModel::supersolution(t, 30.0, 0.02).unwrap();
            let chk = barrier_check(&sup, 30.0, 300.0, 400).unwrap();
            assert!(
                chk.all_positive,
                "supersolution residuals must be positive, got min ({:.3e}, {:.3e}) at t={t}",
                chk.min_e_minus, chk.min_e_plus
            );
            let sub = TailModel::subsolution(t, 30.0, 0.02).unwrap();
            let chk = barrier_check(&sub, 30.0, 300.0, 400).unwrap();
            assert!(
                chk.all_negative,
                "subsolution residuals must be negative, got max ({:.3e}, {:.3e}) at t={t}",
                chk.max_e_minus, chk.max_e_plus
            );
        }
    }

    #[test]
    fn validity_radius_brackets_the_verdict() {
        let r1 = validity_radius(1.0, 0.02, 60.0, 200).unwrap();
        assert!(r1 <= 30.0, "expected verdict to hold by R = 30, got {r1}");
        // Just above the returned radius the verdict holds; well below it fails.
        let above = TailModel::supersolution(1.0, r1 * 1.01, 0.02).unwrap();
        assert!(barrier_check(&above, r1 * 1.01, 10.1 * r1, 200)
            .unwrap()
            .all_positive);
        if r1 > 2.5 {
            let below = TailModel::supersolution(1.0, r1 * 0.8, 0.02).unwrap();
            assert!(!barrier_check(&below, r1 * 0.8, 8.0 * r1, 200)
                .unwrap()
                .all_positive);
        }
    }

    #[test]
    fn inverse_power_fit_recovers_exact_tails() {
        let r: Vec<f64> = (0..50).map(|k| 20.0 + k as f64).collect();
        let y: Vec<f64> = r.iter().map(|&ri| -0.5 / (ri * ri) - 1.75 / ri.powi(4)).collect();
        let (p, q) = fit_inverse_powers(&r, &y).unwrap();
        assert_relative_eq!(p, -0.5, max_relative = 1e-10);
        assert_relative_eq!(q, -1.75, max_relative = 1e-8);
        assert!(fit_inverse_powers(&r[..4], &y[..4]).is_err());
    }

    #[test]
    fn pohozaev_requires_full_coupling() {
        let grid = crate::grid::RadialGrid::new(10.0, 100).unwrap();
        let f: Vec<f64> = grid.r.iter().map(|&r| r / (1.0 + r * r).sqrt()).collect();
        let z = vec![0.0; grid.len()];
        let p = ProfilePair::new(grid, 0.5, f, z).unwrap();
        assert!(matches!(
            pohozaev_residual(&p),
            Err(Error::Unsupported(_))
        ));
    }
}
