//! Zonal kernels on S² and dense kernel-matrix assembly.

use std::fmt;
use std::str::FromStr;

use faer::Mat;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::points::{PointSet, UnitPoint};

/// Default cap on the size of a single dense kernel matrix (2 GiB).
pub const DEFAULT_MEMORY_BUDGET: usize = 2 << 30;

/// Compactly supported Wendland function `(1-u)₊⁸ (32u³ + 25u² + 8u + 1)`.
pub fn wendland_psi(u: f64) -> f64 {
    let base = (1.0 - u).max(0.0);
    let b2 = base * base;
    let b4 = b2 * b2;
    b4 * b4 * (((32.0 * u + 25.0) * u + 8.0) * u + 1.0)
}

/// A zonal positive-definite kernel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum KernelSpec {
    /// `exp(-‖a-b‖² / (2σ²))`.
    Gaussian { sigma: f64 },
    /// `ψ(‖a-b‖)` with [`wendland_psi`]; support radius 1 in chordal distance.
    Wendland,
}

impl KernelSpec {
    pub fn gaussian(sigma: f64) -> Result<Self> {
        if !(sigma > 0.0 && sigma.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "gaussian width must be positive, got {sigma}"
            )));
        }
        Ok(KernelSpec::Gaussian { sigma })
    }

    pub fn sigma(&self) -> Option<f64> {
        match self {
            KernelSpec::Gaussian { sigma } => Some(*sigma),
            KernelSpec::Wendland => None,
        }
    }

    /// Kernel value as a function of the inner product `a·b`.
    ///
    /// The squared chordal distance is taken as `2 - 2·(a·b)` with the inner
    /// product clamped to `[-1, 1]`.
    #[inline]
    pub fn eval_dot(&self, dot: f64) -> f64 {
        let d2 = (2.0 - 2.0 * dot.clamp(-1.0, 1.0)).max(0.0);
        match self {
            KernelSpec::Gaussian { sigma } => (-d2 / (2.0 * sigma * sigma)).exp(),
            KernelSpec::Wendland => wendland_psi(d2.sqrt()),
        }
    }

    #[inline]
    pub fn eval(&self, a: &UnitPoint, b: &UnitPoint) -> f64 {
        self.eval_dot(a.dot(b))
    }
}

impl fmt::Display for KernelSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            KernelSpec::Gaussian { sigma } => write!(f, "gaussian:{sigma:e}"),
            KernelSpec::Wendland => f.write_str("wendland"),
        }
    }
}

impl FromStr for KernelSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if s.eq_ignore_ascii_case("wendland") {
            return Ok(KernelSpec::Wendland);
        }
        if let Some(rest) = s.strip_prefix("gaussian:") {
            let sigma = rest
                .parse::<f64>()
                .map_err(|e| Error::InvalidArgument(format!("bad gaussian width {rest:?}: {e}")))?;
            return KernelSpec::gaussian(sigma);
        }
        Err(Error::InvalidArgument(format!(
            "unknown kernel {s:?}, expected gaussian:<sigma> or wendland"
        )))
    }
}

/// `spec` evaluated at a pair of points.
pub fn eval_kernel(spec: &KernelSpec, a: &UnitPoint, b: &UnitPoint) -> f64 {
    spec.eval(a, b)
}

/// Dense kernel matrix with entries `k(row_i, col_j)`.
#[derive(Debug, Clone)]
pub struct KernelMatrix {
    entries: Mat<f64>,
    symmetric: bool,
}

impl KernelMatrix {
    pub fn rows(&self) -> usize {
        self.entries.nrows()
    }

    pub fn cols(&self) -> usize {
        self.entries.ncols()
    }

    pub fn is_symmetric(&self) -> bool {
        self.symmetric
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.entries[(i, j)]
    }

    pub fn as_mat(&self) -> &Mat<f64> {
        &self.entries
    }

    pub fn into_mat(self) -> Mat<f64> {
        self.entries
    }
}

fn check_budget(rows: usize, cols: usize, budget: usize) -> Result<()> {
    let bytes = rows
        .checked_mul(cols)
        .and_then(|n| n.checked_mul(std::mem::size_of::<f64>()))
        .unwrap_or(usize::MAX);
    if bytes > budget {
        return Err(Error::MatrixTooLarge {
            rows,
            cols,
            bytes,
            budget,
        });
    }
    Ok(())
}

pub fn cross_matrix(spec: &KernelSpec, rows: &PointSet, cols: &PointSet) -> Result<KernelMatrix> {
    cross_matrix_with_budget(spec, rows, cols, DEFAULT_MEMORY_BUDGET)
}

pub fn cross_matrix_with_budget(
    spec: &KernelSpec,
    rows: &PointSet,
    cols: &PointSet,
    budget: usize,
) -> Result<KernelMatrix> {
    check_budget(rows.len(), cols.len(), budget)?;
    let rp = rows.points();
    let cp = cols.points();
    let mut entries = Mat::<f64>::zeros(rp.len(), cp.len());
    entries
        .par_col_iter_mut()
        .zip(cp.par_iter())
        .for_each(|(mut col, c)| {
            for (i, r) in rp.iter().enumerate() {
                col[i] = spec.eval(r, c);
            }
        });
    Ok(KernelMatrix {
        entries,
        symmetric: false,
    })
}

pub fn gram(spec: &KernelSpec, set: &PointSet) -> Result<KernelMatrix> {
    gram_with_budget(spec, set, DEFAULT_MEMORY_BUDGET)
}

/// Symmetric Gram matrix: the upper triangle is evaluated and mirrored.
pub fn gram_with_budget(spec: &KernelSpec, set: &PointSet, budget: usize) -> Result<KernelMatrix> {
    let n = set.len();
    check_budget(n, n, budget)?;
    let pts = set.points();
    let mut entries = Mat::<f64>::zeros(n, n);
    entries
        .par_col_iter_mut()
        .enumerate()
        .for_each(|(j, mut col)| {
            for i in 0..=j {
                col[i] = spec.eval(&pts[i], &pts[j]);
            }
        });
    for j in 0..n {
        for i in 0..j {
            entries[(j, i)] = entries[(i, j)];
        }
    }
    Ok(KernelMatrix {
        entries,
        symmetric: true,
    })
}
