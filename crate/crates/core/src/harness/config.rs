use std::fs;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::error::{Error, Result};

/// Training design degree used by default (1656 points).
pub const DESK_TRAINING_DEGREE: u32 = 57;
/// Training design degree restored by `full_scale` (10014 points).
pub const FULL_TRAINING_DEGREE: u32 = 141;

/// Overrides for the hyperparameter grids. Missing entries fall back to the
/// defaults in [`super::GridSpec`].
#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub lambdas: Option<Vec<f64>>,
    pub sigmas: Option<Vec<f64>>,
    /// Keep only every `lambda_stride`-th value of the default λ grid.
    pub lambda_stride: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Sim3Config {
    pub delta: f64,
    pub s_star: u32,
    pub field_points: usize,
}

impl Default for Sim3Config {
    fn default() -> Self {
        Self {
            delta: 0.01,
            s_star: 29,
            field_points: 40_000,
        }
    }
}

/// Settings shared by the three simulations, read from TOML.
///
/// ```toml
/// target = "f2"
/// training_degree = 57
/// deltas = [0.0, 0.001, 0.1, 0.5]
/// design_dir = "data/designs"
///
/// [grid]
/// lambda_stride = 2
///
/// [sim3]
/// delta = 0.5
/// s_star = 19
/// ```
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    /// `f1` (Franke, Gaussian kernel) or `f2` (Wendland sum, Wendland kernel).
    pub target: String,
    pub training_degree: u32,
    /// Use the 141-design for training regardless of `training_degree`.
    pub full_scale: bool,
    /// Noise levels; each simulation has its own default.
    pub deltas: Option<Vec<f64>>,
    /// Sketch degrees; each simulation has its own default.
    pub s_stars: Option<Vec<u32>>,
    /// Replicates of the random sketch.
    pub n_seeds: usize,
    pub noise_seed: u64,
    pub sketch_seed: u64,
    /// Number of spiral test points.
    pub test_points: usize,
    pub design_dir: PathBuf,
    /// Record wall times in `fit_seconds`; when off the column holds zeros
    /// so result files are reproducible byte for byte.
    pub record_timings: bool,
    pub grid: GridConfig,
    pub sim3: Sim3Config,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            target: "f2".into(),
            training_degree: DESK_TRAINING_DEGREE,
            full_scale: false,
            deltas: None,
            s_stars: None,
            n_seeds: 10,
            noise_seed: 2023,
            sketch_seed: 7,
            test_points: 10_000,
            design_dir: PathBuf::from("data/designs"),
            record_timings: false,
            grid: GridConfig::default(),
            sim3: Sim3Config::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Reads a config file. Relative `design_dir` paths are resolved against
    /// the config file's directory.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|e| match e.kind() {
            std::io::ErrorKind::NotFound => Error::Config(format!("{} not found", path.display())),
            _ => Error::io(path, e),
        })?;
        let mut cfg = Self::from_toml(&text)?;
        if cfg.design_dir.is_relative() {
            if let Some(parent) = path.parent() {
                cfg.design_dir = parent.join(&cfg.design_dir);
            }
        }
        Ok(cfg)
    }

    pub fn effective_training_degree(&self) -> u32 {
        if self.full_scale {
            FULL_TRAINING_DEGREE
        } else {
            self.training_degree
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::Config(msg));
        if self.target != "f1" && self.target != "f2" {
            return bad(format!("target must be f1 or f2, got {:?}", self.target));
        }
        let t = self.effective_training_degree();
        if t.is_multiple_of(2) {
            return bad(format!("training degree must be odd, got {t}"));
        }
        if let Some(d) = &self.deltas {
            if d.is_empty() || d.iter().any(|v| !(*v >= 0.0 && v.is_finite())) {
                return bad("deltas must be a nonempty list of nonnegative reals".into());
            }
        }
        if let Some(s) = &self.s_stars {
            if s.is_empty() || s.iter().any(|v| v.is_multiple_of(2)) {
                return bad("s_stars must be a nonempty list of odd degrees".into());
            }
        }
        if self.n_seeds == 0 {
            return bad("n_seeds must be positive".into());
        }
        if self.test_points < 2 {
            return bad("test_points must be at least 2".into());
        }
        if let Some(l) = &self.grid.lambdas {
            if l.is_empty() || l.iter().any(|v| !(*v > 0.0 && v.is_finite())) {
                return bad("grid.lambdas must be positive".into());
            }
        }
        if let Some(s) = &self.grid.sigmas {
            if s.is_empty() || s.iter().any(|v| !(*v > 0.0 && v.is_finite())) {
                return bad("grid.sigmas must be positive".into());
            }
        }
        if self.grid.lambda_stride == Some(0) {
            return bad("grid.lambda_stride must be positive".into());
        }
        let s3 = &self.sim3;
        if s3.s_star.is_multiple_of(2) || s3.field_points < 2 || s3.delta.is_nan() || s3.delta < 0.0 {
            return bad("sim3 needs an odd s_star, field_points >= 2 and delta >= 0".into());
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_and_overrides() {
        let cfg = ExperimentConfig::from_toml("").unwrap();
        assert_eq!(cfg, ExperimentConfig::default());
        assert_eq!(cfg.effective_training_degree(), 57);

        let cfg = ExperimentConfig::from_toml(
            "target = \"f1\"\nfull_scale = true\ndeltas = [0.0, 0.5]\n[grid]\nsigmas = [0.3]\n[sim3]\ns_star = 9\n",
        )
        .unwrap();
        assert_eq!(cfg.effective_training_degree(), 141);
        assert_eq!(cfg.deltas, Some(vec![0.0, 0.5]));
        assert_eq!(cfg.grid.sigmas, Some(vec![0.3]));
        assert_eq!(cfg.sim3.s_star, 9);
        assert_eq!(cfg.sim3.field_points, 40_000);
    }

    #[test]
    fn rejects_bad_configs() {
        for text in [
            "target = \"f3\"",
            "training_degree = 56",
            "deltas = [-1.0]",
            "s_stars = [8]",
            "n_seeds = 0",
            "unknown_key = 1",
            "[grid]\nlambdas = [0.0]",
            "deltas = \"x\"",
        ] {
            assert!(
                matches!(ExperimentConfig::from_toml(text), Err(Error::Config(_))),
                "{text}"
            );
        }
    }
}
