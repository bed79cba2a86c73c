//! Small dense/banded linear algebra: tridiagonal and 2×2-block-tridiagonal
//! Thomas solvers, a Sturm-sequence bisection eigenvalue routine for symmetric
//! tridiagonal matrices, and plain conjugate gradients.

use crate::error::{Error, Result};

/// Solve a tridiagonal system in place of the classic Thomas algorithm.
///
/// `sub[i]` multiplies x[i-1] in row i (sub[0] unused), `sup[i]` multiplies
/// x[i+1] (sup[n-1] unused). No pivoting; fails on tiny pivots.
pub fn solve_tridiagonal(sub: &[f64], diag: &[f64], sup: &[f64], rhs: &[f64]) -> Result<Vec<f64>> {
    let n = diag.len();
    assert!(sub.len() == n && sup.len() == n && rhs.len() == n, "band length mismatch");
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut c = vec![0.0; n]; // modified superdiagonal
    let mut d = vec![0.0; n]; // modified rhs
    let scale = diag.iter().fold(0.0_f64, |m, v| m.max(v.abs())).max(1.0);
    let mut piv = diag[0];
    if piv.abs() < 1e-300 * scale {
        return Err(Error::NumericalBreakdown("zero pivot in tridiagonal solve".into()));
    }
    c[0] = sup[0] / piv;
    d[0] = rhs[0] / piv;
    for i in 1..n {
        piv = diag[i] - sub[i] * c[i - 1];
        if piv.abs() < 1e-300 * scale || !piv.is_finite() {
            return Err(Error::NumericalBreakdown(format!(
                "pivot {piv:.3e} in tridiagonal solve at row {i}"
            )));
        }
        c[i] = sup[i] / piv;
        d[i] = (rhs[i] - sub[i] * d[i - 1]) / piv;
    }
    let mut x = d;
    for i in (0..n - 1).rev() {
        x[i] -= c[i] * x[i + 1];
    }
    Ok(x)
}

/// Block-tridiagonal matrix with 2×2 blocks, stored row-major per block:
/// row i couples unknown pairs (i−1, i, i+1) through blocks (lower, diag, upper).
#[derive(Debug, Clone)]
pub struct BlockTridiag {
    pub n: usize,
    /// lower[i] couples row i to pair i−1 (lower[0] unused).
    pub lower: Vec<[f64; 4]>,
    pub diag: Vec<[f64; 4]>,
    /// upper[i] couples row i to pair i+1 (upper[n−1] unused).
    pub upper: Vec<[f64; 4]>,
}

fn mat_mul(a: &[f64; 4], b: &[f64; 4]) -> [f64; 4] {
    [
        a[0] * b[0] + a[1] * b[2],
        a[0] * b[1] + a[1] * b[3],
        a[2] * b[0] + a[3] * b[2],
        a[2] * b[1] + a[3] * b[3],
    ]
}

fn mat_vec(a: &[f64; 4], v: [f64; 2]) -> [f64; 2] {
    [a[0] * v[0] + a[1] * v[1], a[2] * v[0] + a[3] * v[1]]
}

fn mat_inv(a: &[f64; 4]) -> Result<[f64; 4]> {
    let det = a[0] * a[3] - a[1] * a[2];
    let scale = a.iter().fold(0.0_f64, |m, v| m.max(v.abs())).max(1.0);
    if det.abs() < 1e-300 * scale * scale || !det.is_finite() {
        return Err(Error::NumericalBreakdown(format!(
            "singular 2x2 diagonal block (det {det:.3e})"
        )));
    }
    Ok([a[3] / det, -a[1] / det, -a[2] / det, a[0] / det])
}

impl BlockTridiag {
    /// Fresh zero matrix with n block rows.
    pub fn zeros(n: usize) -> Self {
        Self {
            n,
            lower: vec![[0.0; 4]; n],
            diag: vec![[0.0; 4]; n],
            upper: vec![[0.0; 4]; n],
        }
    }

    /// Matrix-vector product, rhs interleaved as [x₀⁻, x₀⁺, x₁⁻, x₁⁺, …].
    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), 2 * self.n);
        let mut y = vec![0.0; 2 * self.n];
        for i in 0..self.n {
            let mut v = mat_vec(&self.diag[i], [x[2 * i], x[2 * i + 1]]);
            if i > 0 {
                let w = mat_vec(&self.lower[i], [x[2 * i - 2], x[2 * i - 1]]);
                v[0] += w[0];
                v[1] += w[1];
            }
            if i + 1 < self.n {
                let w = mat_vec(&self.upper[i], [x[2 * i + 2], x[2 * i + 3]]);
                v[0] += w[0];
                v[1] += w[1];
            }
            y[2 * i] = v[0];
            y[2 * i + 1] = v[1];
        }
        y
    }

    /// Solve via block Thomas elimination; rhs interleaved as in [`Self::apply`].
    pub fn solve(&self, rhs: &[f64]) -> Result<Vec<f64>> {
        assert_eq!(rhs.len(), 2 * self.n);
        let n = self.n;
        if n == 0 {
            return Ok(Vec::new());
        }
        // Forward sweep: D'_i = D_i − L_i (D'_{i−1})⁻¹ U_{i−1};
        //                y_i  = b_i − L_i (D'_{i−1})⁻¹ y_{i−1}.
        let mut dp_inv = Vec::with_capacity(n);
        let mut y = vec![[0.0; 2]; n];
        dp_inv.push(mat_inv(&self.diag[0])?);
        y[0] = [rhs[0], rhs[1]];
        for i in 1..n {
            let li_dinv = mat_mul(&self.lower[i], &dp_inv[i - 1]);
            let li_dinv_u = mat_mul(&li_dinv, &self.upper[i - 1]);
            let dp = [
                self.diag[i][0] - li_dinv_u[0],
                self.diag[i][1] - li_dinv_u[1],
                self.diag[i][2] - li_dinv_u[2],
                self.diag[i][3] - li_dinv_u[3],
            ];
            dp_inv.push(mat_inv(&dp)?);
            let w = mat_vec(&li_dinv, y[i - 1]);
            y[i] = [rhs[2 * i] - w[0], rhs[2 * i + 1] - w[1]];
        }
        // Back substitution: x_i = (D'_i)⁻¹ (y_i − U_i x_{i+1}).
        let mut x = vec![0.0; 2 * n];
        let last = mat_vec(&dp_inv[n - 1], y[n - 1]);
        x[2 * n - 2] = last[0];
        x[2 * n - 1] = last[1];
        for i in (0..n - 1).rev() {
            let w = mat_vec(&self.upper[i], [x[2 * i + 2], x[2 * i + 3]]);
            let v = mat_vec(&dp_inv[i], [y[i][0] - w[0], y[i][1] - w[1]]);
            x[2 * i] = v[0];
            x[2 * i + 1] = v[1];
        }
        Ok(x)
    }
}

/// Number of eigenvalues of the symmetric tridiagonal (diag, off) strictly
/// below x, by the Sturm sequence count.
fn sturm_count(diag: &[f64], off: &[f64], x: f64) -> usize {
    let n = diag.len();
    let mut count = 0;
    let mut q = diag[0] - x;
    if q < 0.0 {
        count += 1;
    }
    for i in 1..n {
        let e2 = off[i - 1] * off[i - 1];
        // Guard the recurrence against exact zeros.
        let denom = if q == 0.0 { 1e-300 } else { q };
        q = (diag[i] - x) - e2 / denom;
        if q < 0.0 {
            count += 1;
        }
    }
    count
}

/// Smallest eigenvalue of a symmetric tridiagonal matrix by Sturm bisection.
/// `off[i]` couples rows i and i+1 (length n−1). Pure oracle-grade routine:
/// robust and simple, O(n log(1/tol)).
pub fn tridiag_smallest_eigenvalue(diag: &[f64], off: &[f64], tol: f64) -> f64 {
    let n = diag.len();
    assert!(n >= 1 && off.len() + 1 == n, "band shape mismatch");
    // Gershgorin bounds.
    let mut lo = f64::INFINITY;
    let mut hi = f64::NEG_INFINITY;
    for i in 0..n {
        let mut radius = 0.0;
        if i > 0 {
            radius += off[i - 1].abs();
        }
        if i + 1 < n {
            radius += off[i].abs();
        }
        lo = lo.min(diag[i] - radius);
        hi = hi.max(diag[i] + radius);
    }
    let mut a = lo;
    let mut b = hi;
    while b - a > tol * (1.0 + a.abs().max(b.abs())) {
        let mid = 0.5 * (a + b);
        if sturm_count(diag, off, mid) >= 1 {
            b = mid;
        } else {
            a = mid;
        }
    }
    0.5 * (a + b)
}

/// Unpreconditioned conjugate gradients for a symmetric positive definite
/// operator given as a closure. Returns the iterate once the residual norm
/// falls below `tol · ‖b‖` or `max_iter` is hit (whichever first).
pub fn conjugate_gradients<F>(apply: F, b: &[f64], tol: f64, max_iter: usize) -> Result<Vec<f64>>
where
    F: Fn(&[f64]) -> Vec<f64>,
{
    let n = b.len();
    let dot = |u: &[f64], v: &[f64]| -> f64 { u.iter().zip(v).map(|(a, b)| a * b).sum() };
    let b_norm = dot(b, b).sqrt();
    if b_norm == 0.0 {
        return Ok(vec![0.0; n]);
    }
    let mut x = vec![0.0; n];
    let mut r = b.to_vec();
    let mut p = r.clone();
    let mut rr = dot(&r, &r);
    for _ in 0..max_iter {
        let ap = apply(&p);
        let pap = dot(&p, &ap);
        if !(pap > 0.0) || !pap.is_finite() {
            return Err(Error::NumericalBreakdown(format!(
                "conjugate gradients: non-positive curvature {pap:.3e}"
            )));
        }
        let alpha = rr / pap;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        let rr_new = dot(&r, &r);
        if rr_new.sqrt() <= tol * b_norm {
            return Ok(x);
        }
        let beta = rr_new / rr;
        rr = rr_new;
        for i in 0..n {
            p[i] = r[i] + beta * p[i];
        }
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn tridiagonal_matches_dense_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        for _ in 0..20 {
            let n = rng.gen_range(3..40);
            let mut sub = vec![0.0; n];
            let mut diag = vec![0.0; n];
            let mut sup = vec![0.0; n];
            let mut rhs = vec![0.0; n];
            let mut dense = nalgebra::DMatrix::<f64>::zeros(n, n);
            for i in 0..n {
                diag[i] = 4.0 + rng.gen_range(-0.5..0.5);
                rhs[i] = rng.gen_range(-1.0..1.0);
                dense[(i, i)] = diag[i];
                if i > 0 {
                    sub[i] = rng.gen_range(-1.0..1.0);
                    dense[(i, i - 1)] = sub[i];
                }
                if i + 1 < n {
                    sup[i] = rng.gen_range(-1.0..1.0);
                    dense[(i, i + 1)] = sup[i];
                }
            }
            let x = solve_tridiagonal(&sub, &diag, &sup, &rhs).unwrap();
            let xo = dense
                .lu()
                .solve(&nalgebra::DVector::from_vec(rhs.clone()))
                .unwrap();
            for i in 0..n {
                assert_relative_eq!(x[i], xo[i], max_relative = 1e-10, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn block_tridiagonal_matches_dense_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..10 {
            let n = rng.gen_range(2..25);
            let mut m = BlockTridiag::zeros(n);
            let mut dense = nalgebra::DMatrix::<f64>::zeros(2 * n, 2 * n);
            let mut rhs = vec![0.0; 2 * n];
            for i in 0..n {
                for k in 0..4 {
                    m.diag[i][k] = rng.gen_range(-1.0..1.0);
                    if i > 0 {
                        m.lower[i][k] = rng.gen_range(-1.0..1.0);
                    }
                    if i + 1 < n {
                        m.upper[i][k] = rng.gen_range(-1.0..1.0);
                    }
                }
                // Make the diagonal blocks strongly dominant so the
                // factorization cannot stumble on a singular pivot.
                m.diag[i][0] += 6.0;
                m.diag[i][3] += 6.0;
                rhs[2 * i] = rng.gen_range(-1.0..1.0);
                rhs[2 * i + 1] = rng.gen_range(-1.0..1.0);
                for (r, c, v) in [
                    (0, 0, m.diag[i][0]),
                    (0, 1, m.diag[i][1]),
                    (1, 0, m.diag[i][2]),
                    (1, 1, m.diag[i][3]),
                ] {
                    dense[(2 * i + r, 2 * i + c)] = v;
                }
                if i > 0 {
                    for (r, c, v) in [
                        (0, 0, m.lower[i][0]),
                        (0, 1, m.lower[i][1]),
                        (1, 0, m.lower[i][2]),
                        (1, 1, m.lower[i][3]),
                    ] {
                        dense[(2 * i + r, 2 * (i - 1) + c)] = v;
                    }
                }
                if i + 1 < n {
                    for (r, c, v) in [
                        (0, 0, m.upper[i][0]),
                        (0, 1, m.upper[i][1]),
                        (1, 0, m.upper[i][2]),
                        (1, 1, m.upper[i][3]),
                    ] {
                        dense[(2 * i + r, 2 * (i + 1) + c)] = v;
                    }
                }
            }
            let x = m.solve(&rhs).unwrap();
            let xo = dense
                .lu()
                .solve(&nalgebra::DVector::from_vec(rhs.clone()))
                .unwrap();
            for i in 0..2 * n {
                assert_relative_eq!(x[i], xo[i], max_relative = 1e-9, epsilon = 1e-11);
            }
            // apply ∘ solve is the identity.
            let back = m.apply(&x);
            for i in 0..2 * n {
                assert_relative_eq!(back[i], rhs[i], max_relative = 1e-9, epsilon = 1e-11);
            }
        }
    }

    #[test]
    fn sturm_bisection_matches_dense_eigen_oracle() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..10 {
            let n = rng.gen_range(5..60);
            let diag: Vec<f64> = (0..n).map(|_| rng.gen_range(0.0..4.0)).collect();
            let off: Vec<f64> = (0..n - 1).map(|_| rng.gen_range(-1.0..1.0)).collect();
            let mut dense = nalgebra::DMatrix::<f64>::zeros(n, n);
            for i in 0..n {
                dense[(i, i)] = diag[i];
                if i + 1 < n {
                    dense[(i, i + 1)] = off[i];
                    dense[(i + 1, i)] = off[i];
                }
            }
            let oracle = dense
                .symmetric_eigen()
                .eigenvalues
                .iter()
                .cloned()
                .fold(f64::INFINITY, f64::min);
            let got = tridiag_smallest_eigenvalue(&diag, &off, 1e-12);
            assert_relative_eq!(got, oracle, max_relative = 1e-9, epsilon = 1e-9);
        }
    }

    #[test]
    fn conjugate_gradients_solves_spd_system() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let n = 40;
        // SPD matrix A = Bᵀ B + I via nalgebra.
        let b = nalgebra::DMatrix::<f64>::from_fn(n, n, |_, _| rng.gen_range(-0.3..0.3));
        let a = b.transpose() * &b + nalgebra::DMatrix::<f64>::identity(n, n);
        let rhs: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let x = conjugate_gradients(
            |v| {
                let v = nalgebra::DVector::from_column_slice(v);
                (&a * v).iter().cloned().collect()
            },
            &rhs,
            1e-12,
            10_000,
        )
        .unwrap();
        let xo = a
            .clone()
            .lu()
            .solve(&nalgebra::DVector::from_vec(rhs.clone()))
            .unwrap();
        for i in 0..n {
            assert_relative_eq!(x[i], xo[i], max_relative = 1e-8, epsilon = 1e-10);
        }
    }
}
