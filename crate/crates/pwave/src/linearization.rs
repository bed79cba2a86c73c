//! Radial Schrödinger-type operators around a profile, smallest eigenvalues,
//! quadratic forms, the first-order corrector problem, and the pointwise
//! embedding inequality.
//!
//! All operators act in L²(r dr) on [0, R] with Dirichlet ends and have the
//! form Lφ = −Δ_r φ + φ/r² + V φ. The discretization is variational:
//! cell-midpoint gradients and nodal potentials, so quadratic forms, matrices
//! and eigenvalues are all faces of the same discrete object and the
//! inequality chain Q₀(φ) ≥ λ_min‖φ‖² holds in exact arithmetic.

use crate::error::{Error, Result};
use crate::grid::RadialGrid;
use crate::linalg::{solve_tridiagonal, tridiag_smallest_eigenvalue};
use crate::profile::ProfilePair;
use serde::{Deserialize, Serialize};

/// Which linearized operator to build around a scalar profile f.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum RadialOperator {
    /// V = 3f² − 1 (diagonal linearization in the profile's own component).
    LMinus,
    /// V = 2f² − 1 (linearization felt by the orthogonal component).
    LPlus,
}

impl RadialOperator {
    pub fn potential(self, f: f64) -> f64 {
        match self {
            RadialOperator::LMinus => 3.0 * f * f - 1.0,
            RadialOperator::LPlus => 2.0 * f * f - 1.0,
        }
    }
}

/// Assembled symmetric tridiagonal operator A on interior nodes with its
/// lumped mass matrix M = diag(h rᵢ): the matrix form of the quadratic form
/// Q(φ) = Σ_cells h r_mid (Δφ/h)² + Σ_nodes h rᵢ (1/rᵢ² + Vᵢ) φᵢ².
#[derive(Debug, Clone)]
pub struct WeightedOperator {
    pub grid: RadialGrid,
    /// Diagonal of A (interior nodes 1..n−1).
    pub main: Vec<f64>,
    /// Off-diagonal of A (couples interior nodes i and i+1).
    pub off: Vec<f64>,
    /// Lumped mass h rᵢ.
    pub mass: Vec<f64>,
}

/// Build the operator for nodal potential values `v` (length = grid nodes).
pub fn assemble_operator(grid: &RadialGrid, v: &[f64]) -> WeightedOperator {
    assert_eq!(v.len(), grid.len());
    let n = grid.n;
    let h = grid.h;
    let m = n - 1; // interior nodes
    let mut main = vec![0.0; m];
    let mut off = vec![0.0; m - 1];
    let mut mass = vec![0.0; m];
    for i in 1..n {
        let r = grid.r[i];
        let r_lo = r - 0.5 * h;
        let r_hi = r + 0.5 * h;
        main[i - 1] = (r_lo + r_hi) / h + h * r * (1.0 / (r * r) + v[i]);
        mass[i - 1] = h * r;
        if i + 1 < n {
            off[i - 1] = -r_hi / h;
        }
    }
    WeightedOperator {
        grid: grid.clone(),
        main,
        off,
        mass,
    }
}

/// Operator L around the minus-component of a profile.
pub fn operator_around(p: &ProfilePair, which: RadialOperator) -> WeightedOperator {
    let v: Vec<f64> = p.f_minus.iter().map(|&f| which.potential(f)).collect();
    assemble_operator(&p.grid, &v)
}

impl WeightedOperator {
    /// A·x on interior vectors.
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let m = self.main.len();
        assert_eq!(x.len(), m);
        let mut y = vec![0.0; m];
        for i in 0..m {
            y[i] = self.main[i] * x[i];
            if i > 0 {
                y[i] += self.off[i - 1] * x[i - 1];
            }
            if i + 1 < m {
                y[i] += self.off[i] * x[i + 1];
            }
        }
        y
    }

    /// Quadratic form Q(φ) on a full nodal vector with φ(0) = φ(R) = 0.
    pub fn quadratic_form(&self, phi: &[f64]) -> Result<f64> {
        let n = self.grid.n;
        if phi.len() != n + 1 {
            return Err(Error::InvalidArgument(format!(
                "quadratic form needs {} nodal values, got {}",
                n + 1,
                phi.len()
            )));
        }
        if phi[0].abs() > 1e-14 || phi[n].abs() > 1e-14 {
            return Err(Error::InvalidArgument(
                "quadratic form requires Dirichlet values at both ends".into(),
            ));
        }
        let x: Vec<f64> = phi[1..n].to_vec();
        let ax = self.apply(&x);
        Ok(x.iter().zip(&ax).map(|(a, b)| a * b).sum())
    }

    /// Mass norm ‖φ‖² = Σ h rᵢ φᵢ² over interior nodes.
    pub fn mass_norm_sq(&self, phi_interior: &[f64]) -> f64 {
        phi_interior
            .iter()
            .zip(&self.mass)
            .map(|(&p, &m)| m * p * p)
            .sum()
    }

    /// Smallest generalized eigenvalue of (A, M) by inverse power iteration
    /// (Thomas solves). Returns (λ, full nodal eigenvector, iterations).
    pub fn smallest_eigenvalue(&self, tol: f64, max_iter: usize) -> Result<(f64, Vec<f64>, usize)> {
        let m = self.main.len();
        let sub: Vec<f64> = std::iter::once(0.0)
            .chain(self.off.iter().cloned())
            .collect();
        let sup: Vec<f64> = self
            .off
            .iter()
            .cloned()
            .chain(std::iter::once(0.0))
            .collect();
        // Smooth positive start compatible with the Dirichlet ends.
        let mut x: Vec<f64> = (0..m)
            .map(|i| {
                let s = (i + 1) as f64 / (m + 1) as f64;
                (std::f64::consts::PI * s).sin()
            })
            .collect();
        let norm = self.mass_norm_sq(&x).sqrt();
        for v in &mut x {
            *v /= norm;
        }
        let mut lambda_prev = f64::INFINITY;
        for iter in 0..max_iter {
            let rhs: Vec<f64> = x.iter().zip(&self.mass).map(|(&a, &w)| a * w).collect();
            let y = solve_tridiagonal(&sub, &self.main, &sup, &rhs)?;
            let norm = self.mass_norm_sq(&y).sqrt();
            if !(norm > 0.0) || !norm.is_finite() {
                return Err(Error::NumericalBreakdown(
                    "inverse iteration produced a degenerate vector".into(),
                ));
            }
            let xn: Vec<f64> = y.iter().map(|&v| v / norm).collect();
            let ax = self.apply(&xn);
            let num: f64 = xn.iter().zip(&ax).map(|(a, b)| a * b).sum();
            let lambda = num; // ‖x‖_M = 1
            if (lambda - lambda_prev).abs() <= tol * lambda.abs().max(1.0) {
                let mut full = vec![0.0; self.grid.len()];
                full[1..self.grid.n].copy_from_slice(&xn);
                return Ok((lambda, full, iter + 1));
            }
            lambda_prev = lambda;
            x = xn;
        }
        Err(Error::NumericalBreakdown(format!(
            "inverse iteration did not settle within {max_iter} iterations"
        )))
    }

    /// Smallest generalized eigenvalue by Sturm bisection on the
    /// symmetrically scaled matrix B = M^{−1/2} A M^{−1/2} (independent route,
    /// used as a cross-check of the power iteration).
    pub fn smallest_eigenvalue_bisection(&self, tol: f64) -> f64 {
        let m = self.main.len();
        let diag: Vec<f64> = (0..m).map(|i| self.main[i] / self.mass[i]).collect();
        let off: Vec<f64> = (0..m - 1)
            .map(|i| self.off[i] / (self.mass[i] * self.mass[i + 1]).sqrt())
            .collect();
        tridiag_smallest_eigenvalue(&diag, &off, tol)
    }
}

/// Smallest eigenvalue of L∓ around a profile: convenience wrapper returning
/// (λ, eigenvector, bisection cross-check).
pub fn smallest_eigenvalue(
    p: &ProfilePair,
    which: RadialOperator,
    tol: f64,
) -> Result<(f64, Vec<f64>, f64)> {
    let op = operator_around(p, which);
    let (lambda, vec, _iters) = op.smallest_eigenvalue(tol, 500)?;
    let cross = op.smallest_eigenvalue_bisection(tol.min(1e-10));
    Ok((lambda, vec, cross))
}

/// Combined quadratic form Q₀(φ₋, φ₊) = Q_{L₋}(φ₋) + Q_{L₊}(φ₊) around a
/// profile, discretized identically to the assembled operators.
pub fn q0_value(p: &ProfilePair, phi_minus: &[f64], phi_plus: &[f64]) -> Result<f64> {
    let lm = operator_around(p, RadialOperator::LMinus);
    let lp = operator_around(p, RadialOperator::LPlus);
    Ok(lm.quadratic_form(phi_minus)? + lp.quadratic_form(phi_plus)?)
}

/// Solution of the first-order corrector problem
/// L₊ h = −½ f (1 − f²), h(0) = 0, h(R) = −1/(2R²) − 13/(4R⁴),
/// together with the derived diagnostics of the ratio g = h/f near the core.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CorrectorSolution {
    pub h: Vec<f64>,
    pub boundary_value: f64,
    pub h_prime_0: f64,
    pub min_h: f64,
    /// g(0) = h′(0)/f′(0).
    pub g0: f64,
    /// Fitted coefficient of r² in g(r) − g(0) near 0 (estimates g″(0)/2).
    pub g2_estimate: f64,
    /// Leading tail coefficient from fitting h ≈ a/r² + b/r⁴ on [R/2, 0.9R].
    pub tail_a: f64,
}

/// Solve the corrector problem around a classical profile (t = 0 pair).
pub fn solve_corrector(p: &ProfilePair) -> Result<CorrectorSolution> {
    let grid = &p.grid;
    let n = grid.n;
    let h_mesh = grid.h;
    let op = operator_around(p, RadialOperator::LPlus);
    let s = 1.0 / (grid.r_max * grid.r_max);
    let boundary_value = -0.5 * s - 3.25 * s * s;
    // M·rhs with the boundary column folded into the last interior row.
    let mut rhs: Vec<f64> = (1..n)
        .map(|i| {
            let f = p.f_minus[i];
            op.mass[i - 1] * (-0.5 * f * (1.0 - f * f))
        })
        .collect();
    let r_hi_last = grid.r[n - 1] + 0.5 * h_mesh;
    rhs[n - 2] += (r_hi_last / h_mesh) * boundary_value;
    let sub: Vec<f64> = std::iter::once(0.0).chain(op.off.iter().cloned()).collect();
    let sup: Vec<f64> = op.off.iter().cloned().chain(std::iter::once(0.0)).collect();
    let interior = solve_tridiagonal(&sub, &op.main, &sup, &rhs)?;
    let mut h = vec![0.0; n + 1];
    h[1..n].copy_from_slice(&interior);
    h[n] = boundary_value;

    let d0 = |f: &[f64]| (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h_mesh);
    let h_prime_0 = d0(&h);
    let f_prime_0 = d0(&p.f_minus);
    let g0 = h_prime_0 / f_prime_0;
    let min_h = h.iter().cloned().fold(f64::INFINITY, f64::min);

    // Weighted LS fit of g(r) − g0 on {r², r³} for r ∈ (0, 0.2].
    let mut s22 = 0.0;
    let mut s23 = 0.0;
    let mut s33 = 0.0;
    let mut b2 = 0.0;
    let mut b3 = 0.0;
    for i in 1..n {
        let r = grid.r[i];
        if r > 0.2 {
            break;
        }
        let g = h[i] / p.f_minus[i] - g0;
        let (x2, x3) = (r * r, r * r * r);
        s22 += x2 * x2;
        s23 += x2 * x3;
        s33 += x3 * x3;
        b2 += x2 * g;
        b3 += x3 * g;
    }
    let det = s22 * s33 - s23 * s23;
    if det.abs() < 1e-300 {
        return Err(Error::NumericalBreakdown(
            "degenerate core fit for the corrector ratio".into(),
        ));
    }
    let g2_estimate = (b2 * s33 - s23 * b3) / det;

    let (tail_a, _) = {
        let lo = grid.r_max * 0.5;
        let hi = grid.r_max * 0.9;
        let idx = grid.window(lo, hi)?;
        let rr: Vec<f64> = idx.clone().map(|i| grid.r[i]).collect();
        let hh: Vec<f64> = idx.map(|i| h[i]).collect();
        crate::asym::fit_inverse_powers(&rr, &hh)?
    };

    Ok(CorrectorSolution {
        h,
        boundary_value,
        h_prime_0,
        min_h,
        g0,
        g2_estimate,
        tail_a,
    })
}

/// Pointwise embedding margin: H(φ₋) + H(φ₊) − sup_i (φ₋ᵢ² + φ₊ᵢ²), where
/// H(φ) = Σ_cells h r_mid (Δφ/h)² + Σ_nodes h φᵢ²/rᵢ. The margin is
/// provably ≥ 0 in exact arithmetic for fields vanishing at both ends.
pub fn embedding_margin(grid: &RadialGrid, phi_minus: &[f64], phi_plus: &[f64]) -> Result<f64> {
    let n = grid.n;
    for phi in [phi_minus, phi_plus] {
        if phi.len() != n + 1 {
            return Err(Error::InvalidArgument(format!(
                "embedding check needs {} nodal values, got {}",
                n + 1,
                phi.len()
            )));
        }
        if phi[0].abs() > 1e-14 || phi[n].abs() > 1e-14 {
            return Err(Error::InvalidArgument(
                "embedding check requires fields vanishing at both ends".into(),
            ));
        }
    }
    let h = grid.h;
    let hnorm = |phi: &[f64]| -> f64 {
        let mut acc = 0.0;
        for i in 0..n {
            let r_mid = (i as f64 + 0.5) * h;
            let d = (phi[i + 1] - phi[i]) / h;
            acc += h * r_mid * d * d;
        }
        for i in 1..n {
            acc += h * phi[i] * phi[i] / grid.r[i];
        }
        acc
    };
    let mut sup = 0.0_f64;
    for i in 0..=n {
        sup = sup.max(phi_minus[i] * phi_minus[i] + phi_plus[i] * phi_plus[i]);
    }
    Ok(hnorm(phi_minus) + hnorm(phi_plus) - sup)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classical::solve_classical;
    use crate::solver::BcMode;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn classical(r_max: f64, n: usize) -> ProfilePair {
        let grid = RadialGrid::new(r_max, n).unwrap();
        solve_classical(grid, BcMode::Asymptotic, 1e-11, 50).unwrap().0
    }

    #[test]
    fn spectral_gaps_match_frozen_values_and_bisection() {
        let p = classical(30.0, 3000);
        let (lm, vm, lm_cross) = smallest_eigenvalue(&p, RadialOperator::LMinus, 1e-10).unwrap();
        let (lp, _, lp_cross) = smallest_eigenvalue(&p, RadialOperator::LPlus, 1e-10).unwrap();
        // Frozen from an independent dense route.
        assert_abs_diff_eq!(lm, 1.6269, epsilon = 2e-3);
        assert_abs_diff_eq!(lp, 0.9056, epsilon = 2e-3);
        // Dual route: power iteration vs Sturm bisection.
        assert_abs_diff_eq!(lm, lm_cross, epsilon = 1e-8);
        assert_abs_diff_eq!(lp, lp_cross, epsilon = 1e-8);
        // Ground state has a sign.
        let nonneg = vm.iter().all(|&x| x >= -1e-12);
        let nonpos = vm.iter().all(|&x| x <= 1e-12);
        assert!(nonneg || nonpos);
    }

    #[test]
    fn eigenvalue_is_stable_under_domain_growth() {
        let l30 = smallest_eigenvalue(&classical(30.0, 1500), RadialOperator::LPlus, 1e-10)
            .unwrap()
            .0;
        let l60 = smallest_eigenvalue(&classical(60.0, 3000), RadialOperator::LPlus, 1e-10)
            .unwrap()
            .0;
        assert!(l60 <= l30 + 1e-8, "gap must not grow with R");
        assert!(l60 > 0.5, "gap must stay well away from zero");
    }

    #[test]
    fn quadratic_form_dominates_the_smallest_eigenvalue() {
        let p = classical(20.0, 1000);
        let lm_op = operator_around(&p, RadialOperator::LMinus);
        let lp_op = operator_around(&p, RadialOperator::LPlus);
        let lam_m = lm_op.smallest_eigenvalue(1e-11, 500).unwrap().0;
        let lam_p = lp_op.smallest_eigenvalue(1e-11, 500).unwrap().0;
        let lam = lam_m.min(lam_p);
        let mut rng = ChaCha8Rng::seed_from_u64(23);
        for _ in 0..25 {
            let mut pm = vec![0.0; p.grid.len()];
            let mut pp = vec![0.0; p.grid.len()];
            for i in 1..p.grid.n {
                pm[i] = rng.gen_range(-1.0..1.0);
                pp[i] = rng.gen_range(-1.0..1.0);
            }
            let q0 = q0_value(&p, &pm, &pp).unwrap();
            let norm = lm_op.mass_norm_sq(&pm[1..p.grid.n]) + lp_op.mass_norm_sq(&pp[1..p.grid.n]);
            assert!(
                q0 >= lam * norm - 1e-10 * norm.max(1.0),
                "Q₀ = {q0:.6} < λ‖φ‖² = {:.6}",
                lam * norm
            );
        }
    }

    #[test]
    fn form_difference_is_the_profile_weighted_mass() {
        // Q_{L₋}(φ) − Q_{L₊}(φ) = Σ h rᵢ fᵢ² φᵢ² exactly.
        let p = classical(20.0, 1000);
        let mut rng = ChaCha8Rng::seed_from_u64(29);
        let mut phi = vec![0.0; p.grid.len()];
        for i in 1..p.grid.n {
            phi[i] = rng.gen_range(-1.0..1.0);
        }
        let zero = vec![0.0; p.grid.len()];
        let qm = q0_value(&p, &phi, &zero).unwrap();
        let qp = q0_value(&p, &zero, &phi).unwrap();
        let mut expected = 0.0;
        for i in 1..p.grid.n {
            expected += p.grid.h * p.grid.r[i] * p.f_minus[i] * p.f_minus[i] * phi[i] * phi[i];
        }
        // The difference cancels two ≈10⁵-sized stiffness sums down to ≈64,
        // so allow for the amplified rounding of that cancellation.
        assert_relative_eq!(qm - qp, expected, max_relative = 1e-10);
    }

    #[test]
    fn corrector_has_the_frozen_core_and_tail_structure() {
        let p = classical(60.0, 6000);
        let c = solve_corrector(&p).unwrap();
        assert!(c.min_h < 0.0);
        assert!(
            c.h[1..p.grid.n].iter().all(|&v| v < 0.0),
            "corrector must be negative in the interior"
        );
        assert!(c.h_prime_0 < 0.0);
        assert_abs_diff_eq!(c.h_prime_0, -0.19489, epsilon = 2e-4);
        // g″(0)/2 ≈ 1/16 and the tail is −1/(2r²) to leading order.
        assert_relative_eq!(c.g2_estimate, 1.0 / 16.0, max_relative = 0.03);
        assert_relative_eq!(c.tail_a, -0.5, max_relative = 0.02);
    }

    #[test]
    fn embedding_margin_is_nonnegative_for_random_fields() {
        let grid = RadialGrid::new(15.0, 300).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..100 {
            let mut pm = vec![0.0; grid.len()];
            let mut pp = vec![0.0; grid.len()];
            // Random smooth-ish bumps (random nodal data is fine too: the
            // inequality is exact at the discrete level).
            for i in 1..grid.n {
                pm[i] = rng.gen_range(-2.0..2.0);
                pp[i] = rng.gen_range(-2.0..2.0);
            }
            let margin = embedding_margin(&grid, &pm, &pp).unwrap();
            assert!(margin >= -1e-12, "negative margin {margin:.3e}");
        }
        let bad = vec![1.0; grid.len()];
        assert!(embedding_margin(&grid, &bad, &bad).is_err());
    }
}
