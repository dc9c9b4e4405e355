//! Regularized least squares with SBF expansions, full and sketched.
//!
//! The sketched estimator restricts the expansion to `m` centers and solves
//!
//! ```text
//! (K_nmᵀ K_nm + λ N K_mm) α = K_nmᵀ y
//! ```
//!
//! with a Moore–Penrose pseudo-inverse; the full estimator solves
//! `(K + λ N I) α = y` on the training points themselves.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;
use std::time::Instant;

use faer::{Col, Mat, Side};

use crate::error::{Error, Result};
use crate::kernels::{cross_matrix, gram, KernelMatrix, KernelSpec};
use crate::points::{PointSet, UnitPoint};

/// Kernel expansion `f(x) = Σ_j α_j k(x, c_j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FittedModel {
    pub kernel: KernelSpec,
    pub centers: PointSet,
    pub coefficients: Vec<f64>,
    pub lambda: f64,
    pub training_size: usize,
}

/// Bookkeeping from a single solve.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveDiagnostics {
    /// Spectral components kept by the pseudo-inverse (or the full size for
    /// a Cholesky solve).
    pub rank_used: usize,
    pub eigen_threshold: f64,
    /// `‖Aα − b‖` of the linear system actually solved.
    pub residual_norm: f64,
    pub wall_time: f64,
    /// Set when `λ = 0` was requested.
    pub unregularized: bool,
    /// Set when the full solve fell back from Cholesky to the pseudo-inverse.
    pub used_fallback: bool,
}

fn check_finite(values: &[f64], what: &'static str) -> Result<()> {
    if values.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite(what))
    }
}

fn check_lambda(lambda: f64, allow_zero: bool) -> Result<()> {
    let ok = lambda.is_finite() && (lambda > 0.0 || (allow_zero && lambda == 0.0));
    if ok {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "regularization parameter {lambda} out of range"
        )))
    }
}

fn to_col(v: &[f64]) -> Col<f64> {
    Col::from_fn(v.len(), |i| v[i])
}

fn col_to_vec(c: &Col<f64>) -> Vec<f64> {
    (0..c.nrows()).map(|i| c[i]).collect()
}

fn residual_norm(a: &Mat<f64>, x: &Col<f64>, b: &Col<f64>) -> f64 {
    let r = a * x - b;
    r.norm_l2()
}

/// Pseudo-inverse solve of a symmetric system via eigendecomposition.
///
/// Eigenvalues at or below `ε = m · machine_epsilon · λ_max` are dropped.
fn pinv_solve(a: &Mat<f64>, b: &Col<f64>) -> Result<(Col<f64>, usize, f64)> {
    let m = a.nrows();
    let evd = a
        .self_adjoint_eigen(Side::Lower)
        .map_err(|e| Error::Numerical(format!("eigendecomposition failed: {e:?}")))?;
    let s = evd.S().column_vector();
    let u = evd.U();
    let lambda_max = (0..m).map(|i| s[i].abs()).fold(0.0, f64::max);
    let threshold = m as f64 * f64::EPSILON * lambda_max;
    let mut coords = u.transpose() * b;
    let mut rank = 0;
    for i in 0..m {
        if s[i] > threshold {
            coords[i] /= s[i];
            rank += 1;
        } else {
            coords[i] = 0.0;
        }
    }
    Ok((u * &coords, rank, threshold))
}

/// Kernel matrices for one (training set, center set, kernel) triple,
/// reusable across label vectors and regularization parameters.
#[derive(Debug, Clone)]
pub struct SketchSystem {
    kernel: KernelSpec,
    centers: PointSet,
    knm: Mat<f64>,
    ktk: Mat<f64>,
    kmm: Mat<f64>,
}

impl SketchSystem {
    pub fn new(inputs: &PointSet, centers: &PointSet, kernel: KernelSpec) -> Result<Self> {
        let knm = cross_matrix(&kernel, inputs, centers)?.into_mat();
        let kmm = gram(&kernel, centers)?.into_mat();
        let ktk = knm.transpose() * &knm;
        Ok(Self {
            kernel,
            centers: centers.clone(),
            knm,
            ktk,
            kmm,
        })
    }

    pub fn training_size(&self) -> usize {
        self.knm.nrows()
    }

    pub fn center_count(&self) -> usize {
        self.knm.ncols()
    }

    pub fn kmm(&self) -> &Mat<f64> {
        &self.kmm
    }

    pub fn solve(&self, labels: &[f64], lambda: f64) -> Result<(FittedModel, SolveDiagnostics)> {
        let start = Instant::now();
        let n = self.training_size();
        if labels.len() != n {
            return Err(Error::DimensionMismatch {
                what: "inputs vs labels",
                left: n,
                right: labels.len(),
            });
        }
        check_finite(labels, "labels")?;
        check_lambda(lambda, true)?;

        let m = self.center_count();
        let scale = lambda * n as f64;
        let mut a = Mat::from_fn(m, m, |i, j| self.ktk[(i, j)] + scale * self.kmm[(i, j)]);
        for j in 0..m {
            for i in 0..j {
                let v = 0.5 * (a[(i, j)] + a[(j, i)]);
                a[(i, j)] = v;
                a[(j, i)] = v;
            }
        }
        let b = self.knm.transpose() * to_col(labels);
        let (alpha, rank, threshold) = pinv_solve(&a, &b)?;
        let coefficients = col_to_vec(&alpha);
        check_finite(&coefficients, "coefficients")
            .map_err(|_| Error::Numerical("non-finite coefficients".into()))?;
        let diagnostics = SolveDiagnostics {
            rank_used: rank,
            eigen_threshold: threshold,
            residual_norm: residual_norm(&a, &alpha, &b),
            wall_time: start.elapsed().as_secs_f64(),
            unregularized: lambda == 0.0,
            used_fallback: false,
        };
        let model = FittedModel {
            kernel: self.kernel,
            centers: self.centers.clone(),
            coefficients,
            lambda,
            training_size: n,
        };
        Ok((model, diagnostics))
    }
}

/// Sketched regularized least squares with expansion centers `centers`.
pub fn fit_sketched(
    inputs: &PointSet,
    labels: &[f64],
    centers: &PointSet,
    kernel: KernelSpec,
    lambda: f64,
) -> Result<(FittedModel, SolveDiagnostics)> {
    let start = Instant::now();
    if inputs.len() != labels.len() {
        return Err(Error::DimensionMismatch {
            what: "inputs vs labels",
            left: inputs.len(),
            right: labels.len(),
        });
    }
    check_finite(labels, "labels")?;
    check_lambda(lambda, true)?;
    let (model, mut diag) = SketchSystem::new(inputs, centers, kernel)?.solve(labels, lambda)?;
    diag.wall_time = start.elapsed().as_secs_f64();
    Ok((model, diag))
}

/// Gram matrix of a training set, reusable across labels and `λ`.
#[derive(Debug, Clone)]
pub struct FullSystem {
    kernel: KernelSpec,
    inputs: PointSet,
    gram: Mat<f64>,
}

impl FullSystem {
    pub fn new(inputs: &PointSet, kernel: KernelSpec) -> Result<Self> {
        Ok(Self {
            kernel,
            inputs: inputs.clone(),
            gram: gram(&kernel, inputs)?.into_mat(),
        })
    }

    pub fn solve(&self, labels: &[f64], lambda: f64) -> Result<(FittedModel, SolveDiagnostics)> {
        let start = Instant::now();
        let n = self.inputs.len();
        if labels.len() != n {
            return Err(Error::DimensionMismatch {
                what: "inputs vs labels",
                left: n,
                right: labels.len(),
            });
        }
        check_finite(labels, "labels")?;
        check_lambda(lambda, false)?;
        let shift = lambda * n as f64;
        let mut a = self.gram.clone();
        for i in 0..n {
            a[(i, i)] += shift;
        }
        let b = to_col(labels);
        let (alpha, rank, threshold, used_fallback) = match a.llt(Side::Lower) {
            Ok(llt) => {
                use faer::linalg::solvers::Solve;
                (llt.solve(&b), n, 0.0, false)
            }
            Err(_) => {
                let (x, rank, threshold) = pinv_solve(&a, &b)?;
                (x, rank, threshold, true)
            }
        };
        let coefficients = col_to_vec(&alpha);
        check_finite(&coefficients, "coefficients")
            .map_err(|_| Error::Numerical("non-finite coefficients".into()))?;
        let diagnostics = SolveDiagnostics {
            rank_used: rank,
            eigen_threshold: threshold,
            residual_norm: residual_norm(&a, &alpha, &b),
            wall_time: start.elapsed().as_secs_f64(),
            unregularized: false,
            used_fallback,
        };
        let model = FittedModel {
            kernel: self.kernel,
            centers: self.inputs.clone(),
            coefficients,
            lambda,
            training_size: n,
        };
        Ok((model, diagnostics))
    }
}

/// Standard regularized least squares `(K + λN I) α = y` with the training
/// points as centers.
pub fn fit_full(
    inputs: &PointSet,
    labels: &[f64],
    kernel: KernelSpec,
    lambda: f64,
) -> Result<(FittedModel, SolveDiagnostics)> {
    let start = Instant::now();
    if inputs.len() != labels.len() {
        return Err(Error::DimensionMismatch {
            what: "inputs vs labels",
            left: inputs.len(),
            right: labels.len(),
        });
    }
    check_lambda(lambda, false)?;
    let (model, mut diag) = FullSystem::new(inputs, kernel)?.solve(labels, lambda)?;
    diag.wall_time = start.elapsed().as_secs_f64();
    Ok((model, diag))
}

impl FittedModel {
    /// Predictions from a precomputed `points × centers` kernel matrix.
    pub fn predict_with(&self, cross: &KernelMatrix) -> Result<Vec<f64>> {
        if cross.cols() != self.coefficients.len() {
            return Err(Error::DimensionMismatch {
                what: "kernel matrix columns vs coefficients",
                left: cross.cols(),
                right: self.coefficients.len(),
            });
        }
        let v = cross.as_mat() * to_col(&self.coefficients);
        Ok(col_to_vec(&v))
    }

    /// Value of the expansion at a single point.
    pub fn value_at(&self, p: &UnitPoint) -> f64 {
        self.centers
            .iter()
            .zip(&self.coefficients)
            .map(|(c, a)| a * self.kernel.eval(p, c))
            .sum()
    }

    /// `αᵀ K_mm α`, the squared native-space norm of the expansion.
    pub fn native_norm_sq(&self) -> Result<f64> {
        let kmm = gram(&self.kernel, &self.centers)?;
        let a = to_col(&self.coefficients);
        let ka = kmm.as_mat() * &a;
        Ok((0..a.nrows()).map(|i| a[i] * ka[i]).sum())
    }
}

/// Evaluates the fitted expansion at `points`.
pub fn predict(model: &FittedModel, points: &PointSet) -> Result<Vec<f64>> {
    let cross = cross_matrix(&model.kernel, points, &model.centers)?;
    model.predict_with(&cross)
}

const MODEL_MAGIC: &str = "# sphere-sketch model v1";

/// Text model format: a magic comment, `kernel`, `lambda` and
/// `training_size` header lines, then `x y z alpha` per center.
pub fn format_model(model: &FittedModel) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{MODEL_MAGIC}");
    let _ = writeln!(out, "kernel {}", model.kernel);
    let _ = writeln!(out, "lambda {:.16e}", model.lambda);
    let _ = writeln!(out, "training_size {}", model.training_size);
    for (c, a) in model.centers.iter().zip(&model.coefficients) {
        let _ = writeln!(out, "{:.16e} {:.16e} {:.16e} {:.16e}", c.x, c.y, c.z, a);
    }
    out
}

pub fn parse_model(text: &str, origin: &Path) -> Result<FittedModel> {
    let mut kernel = None;
    let mut lambda = None;
    let mut training_size = None;
    let mut centers = Vec::new();
    let mut coefficients = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |msg: String| Error::Parse {
            path: origin.to_path_buf(),
            line: lineno + 1,
            msg,
        };
        let fields: Vec<&str> = line.split_whitespace().collect();
        match fields[0] {
            "kernel" if fields.len() == 2 => kernel = Some(fields[1].parse::<KernelSpec>()?),
            "lambda" if fields.len() == 2 => {
                lambda = Some(
                    fields[1]
                        .parse::<f64>()
                        .map_err(|e| err(format!("bad lambda: {e}")))?,
                )
            }
            "training_size" if fields.len() == 2 => {
                training_size = Some(
                    fields[1]
                        .parse::<usize>()
                        .map_err(|e| err(format!("bad training size: {e}")))?,
                )
            }
            _ if fields.len() == 4 => {
                let mut v = [0.0; 4];
                for (slot, f) in v.iter_mut().zip(&fields) {
                    *slot = f
                        .parse::<f64>()
                        .map_err(|e| err(format!("bad number {f:?}: {e}")))?;
                }
                let p = UnitPoint::new(v[0], v[1], v[2])
                    .ok_or_else(|| err("zero center".into()))?;
                centers.push(p);
                coefficients.push(v[3]);
            }
            _ => return Err(err(format!("unrecognized line {line:?}"))),
        }
    }
    let missing = |what: &str| Error::Parse {
        path: origin.to_path_buf(),
        line: 0,
        msg: format!("missing {what}"),
    };
    Ok(FittedModel {
        kernel: kernel.ok_or_else(|| missing("kernel"))?,
        lambda: lambda.ok_or_else(|| missing("lambda"))?,
        training_size: training_size.ok_or_else(|| missing("training_size"))?,
        centers: PointSet::new(centers, origin.display().to_string())
            .map_err(|_| missing("centers"))?,
        coefficients,
    })
}

pub fn write_model(model: &FittedModel, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, format_model(model)).map_err(|e| Error::io(path, e))
}

pub fn load_model(path: impl AsRef<Path>) -> Result<FittedModel> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_model(&text, path)
}
