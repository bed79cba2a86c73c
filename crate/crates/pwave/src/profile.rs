//! Radial profile pairs (f₋, f₊) and their serialization.

use crate::asym::TailCoeffs;
use crate::error::{Error, Result};
use crate::grid::RadialGrid;
use std::io::{BufRead, Write};
use std::path::Path;

/// A pair of radial profiles sampled on a uniform grid, together with the
/// coupling strength t and the equivariance degree n (η₋ ~ e^{inθ}; the
/// physical vortex class is n = −1, for which η₊ ~ e^{-i n θ} = e^{iθ}).
#[derive(Debug, Clone)]
pub struct ProfilePair {
    pub grid: RadialGrid,
    pub t: f64,
    pub degree: i32,
    pub f_minus: Vec<f64>,
    pub f_plus: Vec<f64>,
}

impl ProfilePair {
    /// Wrap nodal data; lengths must match the grid.
    pub fn new(grid: RadialGrid, t: f64, f_minus: Vec<f64>, f_plus: Vec<f64>) -> Result<Self> {
        if f_minus.len() != grid.len() || f_plus.len() != grid.len() {
            return Err(Error::InvalidArgument(format!(
                "profile length mismatch: grid has {} nodes, got ({}, {})",
                grid.len(),
                f_minus.len(),
                f_plus.len()
            )));
        }
        Ok(Self {
            grid,
            t,
            degree: -1,
            f_minus,
            f_plus,
        })
    }

    /// Smooth initial guess built from the far-field model: a vortex-like core
    /// ramp matched to the leading tail 1 + a₋/r², with f₊ seeded at its
    /// asymptotic size t·a₊/r² (cut off near the origin).
    pub fn tail_seed(grid: RadialGrid, t: f64) -> Result<Self> {
        let c = TailCoeffs::new(t)?;
        let mut f_minus = Vec::with_capacity(grid.len());
        let mut f_plus = Vec::with_capacity(grid.len());
        for &r in &grid.r {
            // r/sqrt(r² + 1) vanishes linearly at 0 and matches the leading
            // tail 1 + a₋/r² with a₋ = −1/2.
            f_minus.push(r / (r * r + 1.0).sqrt());
            // Linear at the origin, t·a₊/r² in the far field.
            f_plus.push(t * c.a_plus * r / (1.0 + r * r).powf(1.5));
        }
        Self::new(grid, t, f_minus, f_plus)
    }

    /// Sup-norm distance to another pair on the same grid (max over both components).
    pub fn sup_distance(&self, other: &ProfilePair) -> f64 {
        assert_eq!(self.grid.len(), other.grid.len(), "grid mismatch");
        let mut d: f64 = 0.0;
        for i in 0..self.grid.len() {
            d = d.max((self.f_minus[i] - other.f_minus[i]).abs());
            d = d.max((self.f_plus[i] - other.f_plus[i]).abs());
        }
        d
    }

    /// Largest nodal value of f₋² + f₊².
    pub fn max_square_sum(&self) -> f64 {
        self.f_minus
            .iter()
            .zip(&self.f_plus)
            .map(|(&a, &b)| a * a + b * b)
            .fold(0.0, f64::max)
    }

    /// True when 0 < f₋ < 1 and f₊ < 0 strictly at every interior node.
    /// This is the sign structure of the degree-(−1) branch for t > 0.
    pub fn has_expected_signs(&self) -> bool {
        (1..self.grid.n)
            .all(|i| self.f_minus[i] > 0.0 && self.f_minus[i] < 1.0 && self.f_plus[i] < 0.0)
    }

    /// Linear interpolation onto another grid; outside [0, R] the far-field
    /// tail model (with the same t) is used for padding.
    pub fn interp_onto(&self, grid: RadialGrid) -> Result<Self> {
        let tail = TailCoeffs::new(self.t)?;
        let mut f_minus = Vec::with_capacity(grid.len());
        let mut f_plus = Vec::with_capacity(grid.len());
        for &r in &grid.r {
            if r <= self.grid.r_max + 1e-12 {
                let (a, b) = self.sample(r);
                f_minus.push(a);
                f_plus.push(b);
            } else {
                f_minus.push(1.0 + tail.a_minus / (r * r) + tail.b_minus / (r * r * r * r));
                f_plus.push(self.t * (tail.a_plus / (r * r) + tail.b_plus / (r * r * r * r)));
            }
        }
        let mut out = Self::new(grid, self.t, f_minus, f_plus)?;
        out.degree = self.degree;
        Ok(out)
    }

    /// Linear interpolation of both components at radius r ∈ [0, R].
    pub fn sample(&self, r: f64) -> (f64, f64) {
        let h = self.grid.h;
        let x = (r / h).clamp(0.0, self.grid.n as f64);
        let i = (x.floor() as usize).min(self.grid.n - 1);
        let s = x - i as f64;
        (
            (1.0 - s) * self.f_minus[i] + s * self.f_minus[i + 1],
            (1.0 - s) * self.f_plus[i] + s * self.f_plus[i + 1],
        )
    }

    /// Write as CSV with header `r,f_minus,f_plus`. Numbers are printed in
    /// shortest round-trip form, so rereading reproduces the bits exactly.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut out = std::io::BufWriter::new(std::fs::File::create(path)?);
        writeln!(out, "# t = {:?}, degree = {}", self.t, self.degree)?;
        writeln!(out, "r,f_minus,f_plus")?;
        for i in 0..self.grid.len() {
            writeln!(
                out,
                "{:?},{:?},{:?}",
                self.grid.r[i], self.f_minus[i], self.f_plus[i]
            )?;
        }
        Ok(())
    }

    /// Read back a CSV produced by [`ProfilePair::write_csv`].
    pub fn read_csv(path: &Path) -> Result<Self> {
        let file = std::io::BufReader::new(std::fs::File::open(path)?);
        let mut t = 0.0;
        let mut degree = -1;
        let mut r = Vec::new();
        let mut f_minus = Vec::new();
        let mut f_plus = Vec::new();
        for line in file.lines() {
            let line = line?;
            let line = line.trim();
            if line.is_empty() || line == "r,f_minus,f_plus" {
                continue;
            }
            if let Some(meta) = line.strip_prefix('#') {
                for part in meta.split(',') {
                    let mut kv = part.splitn(2, '=');
                    let key = kv.next().unwrap_or("").trim();
                    let val = kv.next().unwrap_or("").trim();
                    match key {
                        "t" => {
                            t = val.parse().map_err(|_| {
                                Error::InvalidArgument(format!("bad t in CSV header: {val}"))
                            })?
                        }
                        "degree" => {
                            degree = val.parse().map_err(|_| {
                                Error::InvalidArgument(format!("bad degree in CSV header: {val}"))
                            })?
                        }
                        _ => {}
                    }
                }
                continue;
            }
            let mut cols = line.split(',');
            let mut next = || -> Result<f64> {
                cols.next()
                    .ok_or_else(|| Error::InvalidArgument(format!("short CSV row: {line}")))?
                    .trim()
                    .parse()
                    .map_err(|_| Error::InvalidArgument(format!("bad CSV number in row: {line}")))
            };
            r.push(next()?);
            f_minus.push(next()?);
            f_plus.push(next()?);
        }
        if r.len() < 17 {
            return Err(Error::InvalidArgument(format!(
                "CSV profile has only {} rows",
                r.len()
            )));
        }
        let n = r.len() - 1;
        let grid = RadialGrid::new(r[n], n)?;
        for (i, &ri) in r.iter().enumerate() {
            if (ri - grid.r[i]).abs() > 1e-9 * grid.r_max.max(1.0) {
                return Err(Error::InvalidArgument(format!(
                    "CSV radii are not a uniform grid near row {i}"
                )));
            }
        }
        let mut p = Self::new(grid, t, f_minus, f_plus)?;
        p.degree = degree;
        Ok(p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn demo_pair() -> ProfilePair {
        let grid = RadialGrid::new(8.0, 64).unwrap();
        let f_minus = grid.r.iter().map(|&r| (r / 8.0).tanh()).collect();
        let f_plus = grid.r.iter().map(|&r| -0.01 * r * (8.0 - r)).collect();
        ProfilePair::new(grid, 0.37, f_minus, f_plus).unwrap()
    }

    #[test]
    fn csv_round_trip_is_bit_exact() {
        let p = demo_pair();
        let dir = std::env::temp_dir().join("pwave_profile_csv_test");
        std::fs::create_dir_all(&dir).unwrap();
        let path = dir.join("pair.csv");
        p.write_csv(&path).unwrap();
        let q = ProfilePair::read_csv(&path).unwrap();
        assert_eq!(p.t, q.t);
        assert_eq!(p.degree, q.degree);
        assert_eq!(p.f_minus, q.f_minus);
        assert_eq!(p.f_plus, q.f_plus);
        assert_eq!(p.grid.len(), q.grid.len());

        // Writing again must reproduce the file byte for byte.
        let path2 = dir.join("pair2.csv");
        q.write_csv(&path2).unwrap();
        assert_eq!(
            std::fs::read(&path).unwrap(),
            std::fs::read(&path2).unwrap()
        );
    }

    #[test]
    fn interpolation_reproduces_nodes_and_pads_tail() {
        let p = demo_pair();
        let fine = RadialGrid::new(8.0, 128).unwrap();
        let q = p.interp_onto(fine).unwrap();
        for i in 0..=64 {
            assert_relative_eq!(q.f_minus[2 * i], p.f_minus[i], max_relative = 1e-14);
            assert_relative_eq!(q.f_plus[2 * i], p.f_plus[i], max_relative = 1e-14);
        }
        let wider = RadialGrid::new(16.0, 128).unwrap();
        let w = p.interp_onto(wider).unwrap();
        // Outside the old domain the minus component follows 1 + a₋/r² + b₋/r⁴.
        let c = TailCoeffs::new(p.t).unwrap();
        let r = w.grid.r[120];
        assert_relative_eq!(
            w.f_minus[120],
            1.0 + c.a_minus / (r * r) + c.b_minus / r.powi(4),
            max_relative = 1e-12
        );
    }

    #[test]
    fn sign_and_bound_helpers() {
        let p = demo_pair();
        assert!(p.has_expected_signs());
        assert!(p.max_square_sum() < 1.1);
        let mut q = p.clone();
        q.f_plus[5] = 0.2;
        assert!(!q.has_expected_signs());
    }
}
