//! Target functions, truncated Gaussian noise, datasets and error metrics.
//!
//! Noise streams come from `ChaCha20Rng::seed_from_u64(seed)` and standard
//! normal variates from `rand_distr::StandardNormal` (ziggurat). Streams are
//! reproducible for a given seed within this implementation.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::kernels::wendland_psi;
use crate::points::{eq_area_centers, PointSet, UnitPoint};
use crate::rls::{predict, FittedModel};

/// Number of Wendland bumps in the default second target.
pub const WENDLAND_TARGET_CENTERS: usize = 20;

/// Default half-width of the noise truncation interval.
pub const DEFAULT_NOISE_BOUND: f64 = 10.0;

/// Renka's modification of the Franke function on ambient coordinates.
pub fn franke_f1(p: &UnitPoint) -> f64 {
    let (x, y, z) = (9.0 * p.x, 9.0 * p.y, 9.0 * p.z);
    let sq = |v: f64| v * v;
    0.75 * (-sq(x - 2.0) / 4.0 - sq(y - 2.0) / 4.0 - sq(z - 2.0) / 4.0).exp()
        + 0.75 * (-sq(x + 1.0) / 49.0 - (y + 1.0) / 10.0 - (z + 1.0) / 10.0).exp()
        + 0.5 * (-sq(x - 7.0) / 4.0 - sq(y - 3.0) / 4.0 - sq(z - 5.0) / 4.0).exp()
        - 0.2 * (-sq(x - 4.0) - sq(y - 7.0) - sq(z - 5.0)).exp()
}

/// Sum of Wendland bumps `Σ_i ψ(‖p − z_i‖)`.
pub fn wendland_target_f2(p: &UnitPoint, centers: &PointSet) -> f64 {
    centers
        .iter()
        .map(|c| wendland_psi((2.0 - 2.0 * p.dot(c).clamp(-1.0, 1.0)).max(0.0).sqrt()))
        .sum()
}

#[derive(Debug, Clone, PartialEq)]
pub enum TargetFunction {
    Franke,
    WendlandSum(PointSet),
}

impl TargetFunction {
    /// Wendland sum over the default 20 equal-area centers.
    pub fn wendland_default() -> Self {
        TargetFunction::WendlandSum(
            eq_area_centers(WENDLAND_TARGET_CENTERS).expect("20 > 0 regions"),
        )
    }

    /// Parses `f1` / `f2`.
    pub fn from_id(id: &str) -> Result<Self> {
        match id.trim() {
            "f1" => Ok(TargetFunction::Franke),
            "f2" => Ok(Self::wendland_default()),
            other => Err(Error::InvalidArgument(format!(
                "unknown target {other:?}, expected f1 or f2"
            ))),
        }
    }

    pub fn id(&self) -> &'static str {
        match self {
            TargetFunction::Franke => "f1",
            TargetFunction::WendlandSum(_) => "f2",
        }
    }

    pub fn eval(&self, p: &UnitPoint) -> f64 {
        match self {
            TargetFunction::Franke => franke_f1(p),
            TargetFunction::WendlandSum(c) => wendland_target_f2(p, c),
        }
    }

    pub fn eval_set(&self, set: &PointSet) -> Vec<f64> {
        set.iter().map(|p| self.eval(p)).collect()
    }
}

/// Gaussian noise `N(0, δ²)` clipped to `[-bound, bound]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseModel {
    pub delta: f64,
    pub bound: f64,
    pub seed: u64,
}

impl NoiseModel {
    pub fn new(delta: f64, seed: u64) -> Result<Self> {
        Self::with_bound(delta, DEFAULT_NOISE_BOUND, seed)
    }

    pub fn with_bound(delta: f64, bound: f64, seed: u64) -> Result<Self> {
        if !(delta >= 0.0 && delta.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "noise level must be >= 0, got {delta}"
            )));
        }
        if bound.is_nan() || bound <= 0.0 {
            return Err(Error::InvalidArgument(format!(
                "noise bound must be positive, got {bound}"
            )));
        }
        Ok(Self { delta, bound, seed })
    }
}

pub fn sample_truncated_gaussian(noise: &NoiseModel, count: usize) -> Vec<f64> {
    let mut rng = ChaCha20Rng::seed_from_u64(noise.seed);
    (0..count)
        .map(|_| {
            let z: f64 = rng.sample(StandardNormal);
            (noise.delta * z).clamp(-noise.bound, noise.bound)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub inputs: PointSet,
    pub labels: Vec<f64>,
    pub target: TargetFunction,
    pub noise: NoiseModel,
}

/// Labels `y_i = f(x_i) + ε_i`.
pub fn make_dataset(inputs: &PointSet, target: &TargetFunction, noise: &NoiseModel) -> Dataset {
    let eps = sample_truncated_gaussian(noise, inputs.len());
    let labels = inputs
        .iter()
        .zip(&eps)
        .map(|(p, e)| target.eval(p) + e)
        .collect();
    Dataset {
        inputs: inputs.clone(),
        labels,
        target: target.clone(),
        noise: *noise,
    }
}

/// Root-mean-square difference between two equal-length vectors.
pub fn rmse_values(predictions: &[f64], labels: &[f64]) -> Result<f64> {
    if predictions.len() != labels.len() {
        return Err(Error::DimensionMismatch {
            what: "predictions vs labels",
            left: predictions.len(),
            right: labels.len(),
        });
    }
    if labels.is_empty() {
        return Err(Error::InvalidArgument("empty test set".into()));
    }
    let sum: f64 = predictions
        .iter()
        .zip(labels)
        .map(|(p, y)| (p - y) * (p - y))
        .sum();
    Ok((sum / labels.len() as f64).sqrt())
}

/// Test RMSE of `model` on `(test_inputs, test_labels)`.
pub fn rmse(model: &FittedModel, test_inputs: &PointSet, test_labels: &[f64]) -> Result<f64> {
    if test_inputs.len() != test_labels.len() {
        return Err(Error::DimensionMismatch {
            what: "test inputs vs labels",
            left: test_inputs.len(),
            right: test_labels.len(),
        });
    }
    rmse_values(&predict(model, test_inputs)?, test_labels)
}

/// CSV with header `x,y,z,label`, 17 significant digits.
pub fn format_dataset_csv(inputs: &PointSet, labels: &[f64]) -> String {
    let mut out = String::from("x,y,z,label\n");
    for (p, y) in inputs.iter().zip(labels) {
        let _ = writeln!(out, "{:.16e},{:.16e},{:.16e},{:.16e}", p.x, p.y, p.z, y);
    }
    out
}

pub fn write_dataset_csv(dataset: &Dataset, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, format_dataset_csv(&dataset.inputs, &dataset.labels))
        .map_err(|e| Error::io(path, e))
}

/// Reads labels from a CSV file. Accepts either the dataset schema
/// (`x,y,z,label`, label taken from the `label` column) or a single column
/// of numbers with an optional header.
pub fn load_labels_csv(path: impl AsRef<Path>) -> Result<Vec<f64>> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut lines = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty() && !l.trim_start().starts_with('#'))
        .peekable();
    let mut column = 0;
    if let Some((_, first)) = lines.peek() {
        let cells: Vec<&str> = first.split(',').map(str::trim).collect();
        if cells.iter().any(|c| c.parse::<f64>().is_err()) {
            column = cells.iter().position(|c| *c == "label").unwrap_or(cells.len() - 1);
            lines.next();
        } else {
            column = cells.len() - 1;
        }
    }
    let mut labels = Vec::new();
    for (lineno, line) in lines {
        let cells: Vec<&str> = line.split(',').map(str::trim).collect();
        let cell = cells.get(column).ok_or_else(|| Error::Parse {
            path: path.to_path_buf(),
            line: lineno + 1,
            msg: format!("missing column {column}"),
        })?;
        labels.push(cell.parse::<f64>().map_err(|e| Error::Parse {
            path: path.to_path_buf(),
            line: lineno + 1,
            msg: format!("bad number {cell:?}: {e}"),
        })?);
    }
    if labels.is_empty() {
        return Err(Error::EmptyFile {
            path: path.to_path_buf(),
        });
    }
    Ok(labels)
}
