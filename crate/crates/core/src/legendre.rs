//! Legendre polynomials and spherical-design verification.
//!
//! For a point set `X` of size `N`, the degree-`k` residual
//!
//! ```text
//! r_k = (1/N²) Σ_i Σ_j P_k(x_i · x_j)
//! ```
//!
//! equals `4π / ((2k+1) N²) · Σ_ℓ |Σ_i Y_{k,ℓ}(x_i)|²` by the addition
//! theorem, so it is nonnegative and vanishes exactly when the equal-weight
//! rule on `X` integrates every degree-`k` harmonic to zero.

use std::fmt;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::points::PointSet;

/// Default residual tolerance for design verification.
pub const DEFAULT_DESIGN_TOLERANCE: f64 = 1e-8;

const DOMAIN_SLACK: f64 = 1e-12;

/// Rows per block in the residual double sum. Fixed so the summation order
/// does not depend on the thread count.
const ROW_BLOCK: usize = 32;

/// Fills `out[k] = P_k(u)` for `k = 0..out.len()` by the three-term
/// recurrence. `u` is used as given.
pub fn legendre_all(u: f64, out: &mut [f64]) {
    if out.is_empty() {
        return;
    }
    out[0] = 1.0;
    if out.len() == 1 {
        return;
    }
    out[1] = u;
    for k in 1..out.len() - 1 {
        let kf = k as f64;
        out[k + 1] = ((2.0 * kf + 1.0) * u * out[k] - kf * out[k - 1]) / (kf + 1.0);
    }
}

/// Legendre polynomial `P_k(u)`, normalized so `P_k(1) = 1`.
pub fn legendre_p(k: usize, u: f64) -> Result<f64> {
    if u.is_nan() || u.abs() > 1.0 + DOMAIN_SLACK {
        return Err(Error::InvalidArgument(format!(
            "Legendre argument {u} outside [-1, 1]"
        )));
    }
    let u = u.clamp(-1.0, 1.0);
    let (mut prev, mut cur) = (1.0, u);
    if k == 0 {
        return Ok(1.0);
    }
    for j in 1..k {
        let jf = j as f64;
        let next = ((2.0 * jf + 1.0) * u * cur - jf * prev) / (jf + 1.0);
        prev = cur;
        cur = next;
    }
    Ok(cur)
}

/// Raw double sums `S_k = Σ_i Σ_j P_k(x_i·x_j)` for `k = 1..=t_max`.
fn gegenbauer_sums(set: &PointSet, t_max: usize) -> Vec<f64> {
    let pts = set.points();
    let n = pts.len();
    let rows: Vec<usize> = (0..n).collect();
    let partials: Vec<Vec<f64>> = rows
        .par_chunks(ROW_BLOCK)
        .map(|block| {
            let mut acc = vec![0.0; t_max + 1];
            let mut p = vec![0.0; t_max + 1];
            for &i in block {
                for j in i + 1..n {
                    let u = pts[i].dot(&pts[j]).clamp(-1.0, 1.0);
                    legendre_all(u, &mut p);
                    for k in 1..=t_max {
                        acc[k] += p[k];
                    }
                }
            }
            acc
        })
        .collect();
    let mut sums = vec![0.0; t_max + 1];
    for part in &partials {
        for k in 1..=t_max {
            sums[k] += part[k];
        }
    }
    // off-diagonal pairs count twice; each diagonal term is P_k(1) = 1
    (1..=t_max).map(|k| 2.0 * sums[k] + n as f64).collect()
}

fn normalize(sum: f64, n: usize) -> f64 {
    let r = sum / (n as f64 * n as f64);
    debug_assert!(r > -1e-9, "residual {r} far below zero");
    r.max(0.0)
}

/// Degree-`k` design residual `r_k`.
pub fn design_residual(set: &PointSet, k: usize) -> Result<f64> {
    if k == 0 {
        return Err(Error::InvalidArgument("residual degree must be >= 1".into()));
    }
    let sums = gegenbauer_sums(set, k);
    Ok(normalize(sums[k - 1], set.len()))
}

/// Outcome of [`verify_design`].
#[derive(Debug, Clone, PartialEq)]
pub struct DesignReport {
    /// Largest `t` with `r_k <= tolerance` for all `1 <= k <= t`.
    pub max_verified_degree: u32,
    pub residuals: Vec<(u32, f64)>,
    pub tolerance: f64,
}

impl DesignReport {
    pub fn is_design_of_degree(&self, t: u32) -> bool {
        self.max_verified_degree >= t
    }
}

impl fmt::Display for DesignReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{:>6}  {:>14}  ok", "degree", "residual")?;
        for &(k, r) in &self.residuals {
            let mark = if r <= self.tolerance { "yes" } else { "no" };
            writeln!(f, "{k:>6}  {r:>14.6e}  {mark}")?;
        }
        write!(
            f,
            "max verified degree: {} (tol {:e})",
            self.max_verified_degree, self.tolerance
        )
    }
}

/// Computes `r_1..r_{t_max}` in one O(N²·t_max) pass.
pub fn verify_design(set: &PointSet, t_max: u32, tol: f64) -> Result<DesignReport> {
    if t_max == 0 {
        return Err(Error::InvalidArgument("t_max must be >= 1".into()));
    }
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "tolerance must be positive, got {tol}"
        )));
    }
    let sums = gegenbauer_sums(set, t_max as usize);
    let residuals: Vec<(u32, f64)> = sums
        .iter()
        .enumerate()
        .map(|(i, &s)| (i as u32 + 1, normalize(s, set.len())))
        .collect();
    let max_verified_degree = residuals
        .iter()
        .take_while(|(_, r)| *r <= tol)
        .count() as u32;
    Ok(DesignReport {
        max_verified_degree,
        residuals,
        tolerance: tol,
    })
}
