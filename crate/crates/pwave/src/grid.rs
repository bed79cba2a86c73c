//! Uniform radial grids and r-weighted quadrature.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Uniform grid on [0, R] with N cells: nodes r_i = i·h, h = R/N, i = 0..=N.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RadialGrid {
    /// Outer radius R.
    pub r_max: f64,
    /// Number of cells (nodes are 0..=n).
    pub n: usize,
    /// Mesh width h = R/N.
    pub h: f64,
    /// Node coordinates r_i = i·h.
    pub r: Vec<f64>,
}

impl RadialGrid {
    /// Build a uniform grid; fails on non-positive/non-finite R or fewer than 16 cells.
    pub fn new(r_max: f64, n: usize) -> Result<Self> {
        if !r_max.is_finite() || r_max <= 0.0 {
            return Err(Error::InvalidArgument(format!(
                "grid radius must be positive and finite, got {r_max}"
            )));
        }
        if n < 16 {
            return Err(Error::InvalidArgument(format!(
                "grid needs at least 16 cells, got {n}"
            )));
        }
        let h = r_max / n as f64;
        let r = (0..=n).map(|i| i as f64 * h).collect();
        Ok(Self { r_max, n, h, r })
    }

    /// Number of nodes, N + 1.
    pub fn len(&self) -> usize {
        self.n + 1
    }

    /// True only for degenerate grids (never constructed by `new`).
    pub fn is_empty(&self) -> bool {
        self.r.is_empty()
    }

    /// Trapezoidal quadrature of ∫₀ᴿ g(r) r dr from nodal values of g.
    ///
    /// The r-weight kills the center node, so g[0] may be any finite stand-in
    /// for a density defined at r = 0 only by its limit.
    pub fn trapz_r(&self, g: &[f64]) -> f64 {
        assert_eq!(g.len(), self.len(), "integrand length mismatch");
        let mut acc = 0.0;
        for i in 0..=self.n {
            let w = if i == 0 || i == self.n { 0.5 } else { 1.0 };
            acc += w * g[i] * self.r[i];
        }
        acc * self.h
    }

    /// Indices of a fit window [lo, hi]; fails if fewer than 8 nodes fall inside.
    pub fn window(&self, lo: f64, hi: f64) -> Result<std::ops::RangeInclusive<usize>> {
        if !(lo >= 0.0 && hi <= self.r_max + 1e-12 && lo < hi) {
            return Err(Error::InvalidArgument(format!(
                "window [{lo}, {hi}] must satisfy 0 <= lo < hi <= R = {}",
                self.r_max
            )));
        }
        let i_lo = (lo / self.h).ceil() as usize;
        let i_hi = ((hi / self.h).floor() as usize).min(self.n);
        if i_hi < i_lo + 7 {
            return Err(Error::InvalidArgument(format!(
                "window [{lo}, {hi}] contains only {} nodes; need at least 8",
                i_hi.saturating_sub(i_lo) + 1
            )));
        }
        Ok(i_lo..=i_hi)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn rejects_bad_arguments() {
        assert!(RadialGrid::new(-1.0, 100).is_err());
        assert!(RadialGrid::new(0.0, 100).is_err());
        assert!(RadialGrid::new(f64::NAN, 100).is_err());
        assert!(RadialGrid::new(10.0, 8).is_err());
    }

    #[test]
    fn nodes_are_uniform() {
        let g = RadialGrid::new(10.0, 100).unwrap();
        assert_eq!(g.len(), 101);
        assert_relative_eq!(g.h, 0.1);
        assert_relative_eq!(g.r[100], 10.0, max_relative = 1e-15);
        for i in 1..=100 {
            assert_relative_eq!(g.r[i] - g.r[i - 1], g.h, max_relative = 1e-12);
        }
    }

    #[test]
    fn trapezoid_is_exact_on_linear_integrands() {
        // ∫₀ᴿ (a + b r) r dr = a R²/2 + b R³/3; trapezoid in the r-weighted
        // form is exact for a + b r up to the O(h²) error on the cubic term,
        // so test the constant exactly and the linear term to mesh accuracy.
        let g = RadialGrid::new(2.0, 2000).unwrap();
        let ones = vec![1.0; g.len()];
        assert_relative_eq!(g.trapz_r(&ones), 2.0, max_relative = 1e-14);
        let lin: Vec<f64> = g.r.iter().map(|&r| 3.0 * r).collect();
        assert_relative_eq!(g.trapz_r(&lin), 8.0, max_relative = 1e-6);
    }

    #[test]
    fn window_selects_interior_nodes() {
        let g = RadialGrid::new(10.0, 100).unwrap();
        let w = g.window(3.0, 7.0).unwrap();
        assert_eq!(*w.start(), 30);
        assert_eq!(*w.end(), 70);
        assert!(g.window(9.95, 10.0).is_err()); // too few nodes
        assert!(g.window(5.0, 3.0).is_err());
    }
}
