use std::fs;
use std::path::Path;

use rayon::prelude::*;

use super::config::ExperimentConfig;
use super::csv::{format_field_csv, format_results_csv, format_summary_csv, sort_rows};
use super::designs::DesignLibrary;
use super::search::{
    grid_search, grid_search_full, GridSpec, KernelFamily, ResultRow, SketchMethod,
};
use crate::data::{make_dataset, sample_truncated_gaussian, Dataset, NoiseModel, TargetFunction};
use crate::error::{Error, Result};
use crate::kernels::KernelSpec;
use crate::points::{generate_spiral, PointSet};
use crate::rls::{predict, FullSystem, SketchSystem};

const SIM1_DELTAS: [f64; 4] = [0.0, 0.001, 0.1, 0.5];
const SIM2_DELTAS: [f64; 7] = [0.0, 1e-4, 1e-3, 1e-2, 0.1, 0.3, 0.5];
const SIM2_S_STARS: [u32; 4] = [9, 25, 41, 57];

/// Pointwise data behind an error-field plot.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorField {
    pub points: PointSet,
    pub exact: Vec<f64>,
    pub noisy: Vec<f64>,
    pub prediction: Vec<f64>,
    pub abs_error: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct SimulationOutput {
    pub results: Vec<ResultRow>,
    /// Individual random-sketch replicates (Simulation 2).
    pub replicates: Vec<ResultRow>,
    pub field: Option<ErrorField>,
}

struct Setup {
    library: DesignLibrary,
    training: PointSet,
    test: PointSet,
    test_labels: Vec<f64>,
    target: TargetFunction,
    family: KernelFamily,
    degree: u32,
}

impl Setup {
    fn new(cfg: &ExperimentConfig) -> Result<Self> {
        cfg.validate()?;
        let library = DesignLibrary::new(&cfg.design_dir);
        let degree = cfg.effective_training_degree();
        let training = library.load(degree)?;
        let target = TargetFunction::from_id(&cfg.target)?;
        let test = generate_spiral(cfg.test_points)?;
        let test_labels = target.eval_set(&test);
        Ok(Self {
            library,
            training,
            test,
            test_labels,
            family: KernelFamily::for_target(&cfg.target),
            target,
            degree,
        })
    }

    fn dataset(&self, delta: f64, seed: u64) -> Result<Dataset> {
        Ok(make_dataset(
            &self.training,
            &self.target,
            &NoiseModel::new(delta, seed)?,
        ))
    }

    fn test(&self) -> (&PointSet, &[f64]) {
        (&self.test, &self.test_labels)
    }

    fn design(&self, s_star: u32, cfg: &ExperimentConfig) -> SketchMethod {
        SketchMethod::Design {
            s_star,
            design_dir: cfg.design_dir.clone(),
        }
    }
}

/// Hyperparameter grid for one noise level, with config overrides applied.
pub fn grid_for(cfg: &ExperimentConfig, family: KernelFamily, delta: f64) -> GridSpec {
    let mut grid = GridSpec::default_for(family, delta == 0.0);
    if let Some(stride) = cfg.grid.lambda_stride {
        grid.lambdas = grid.lambdas.into_iter().step_by(stride).collect();
    }
    if let Some(l) = &cfg.grid.lambdas {
        grid.lambdas = l.clone();
    }
    if let (Some(s), KernelFamily::Gaussian) = (&cfg.grid.sigmas, family) {
        grid.sigmas = Some(s.clone());
    }
    grid
}

fn noise_seed(cfg: &ExperimentConfig, delta_index: usize) -> u64 {
    cfg.noise_seed.wrapping_add(delta_index as u64)
}

fn strip_timing(rows: &mut [ResultRow], keep: bool) {
    if !keep {
        for r in rows {
            r.fit_seconds = 0.0;
        }
    }
}

/// RMSE against the sketch degree for several noise levels, using design
/// sketches. The `s* = t` row is standard regularized least squares on the
/// full training design.
pub fn run_simulation1(cfg: &ExperimentConfig) -> Result<SimulationOutput> {
    let setup = Setup::new(cfg)?;
    let t = setup.degree;
    let deltas = cfg.deltas.clone().unwrap_or_else(|| SIM1_DELTAS.to_vec());
    let s_stars: Vec<u32> = match &cfg.s_stars {
        Some(s) => s.iter().copied().filter(|&s| s <= t).collect(),
        None => (1..=t).step_by(2).collect(),
    };
    let mut results = Vec::new();
    for (i, &delta) in deltas.iter().enumerate() {
        let data = setup.dataset(delta, noise_seed(cfg, i))?;
        let grid = grid_for(cfg, setup.family, delta);
        for &s in &s_stars {
            let row = if s == t {
                grid_search_full(&data, setup.test(), "design", Some(s), setup.family, &grid)?
            } else {
                grid_search(
                    &data,
                    setup.test(),
                    &setup.design(s, cfg),
                    setup.family,
                    &grid,
                    &setup.library,
                )?
            };
            results.push(row);
        }
    }
    strip_timing(&mut results, cfg.record_timings);
    sort_rows(&mut results);
    Ok(SimulationOutput {
        results,
        ..Default::default()
    })
}

fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = if values.len() > 1 {
        values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)
    } else {
        0.0
    };
    (mean, var.sqrt())
}

fn lower_median(mut values: Vec<f64>) -> f64 {
    values.sort_by(f64::total_cmp);
    values[(values.len() - 1) / 2]
}

/// Aggregate of random-sketch replicates: mean RMSE with its sample
/// standard deviation; λ and σ are the lower medians of the selected values.
fn aggregate(replicates: &[ResultRow]) -> ResultRow {
    let rmses: Vec<f64> = replicates.iter().map(|r| r.rmse).collect();
    let (mean, std) = mean_std(&rmses);
    let sigmas: Vec<f64> = replicates.iter().filter_map(|r| r.sigma).collect();
    let mut row = replicates[0].clone();
    row.rmse = mean;
    row.rmse_std = Some(std);
    row.seed = None;
    row.lambda = lower_median(replicates.iter().map(|r| r.lambda).collect());
    row.sigma = (!sigmas.is_empty()).then(|| lower_median(sigmas));
    row.fit_seconds = replicates.iter().map(|r| r.fit_seconds).sum::<f64>() / rmses.len() as f64;
    row.failed_cells = replicates.iter().map(|r| r.failed_cells).sum();
    row
}

/// First, random and design sketches of equal size across noise levels.
/// Random rows report the mean over `n_seeds` replicates; the replicates
/// themselves are returned separately.
pub fn run_simulation2(cfg: &ExperimentConfig) -> Result<SimulationOutput> {
    let setup = Setup::new(cfg)?;
    let t = setup.degree;
    let n = setup.training.len();
    let deltas = cfg.deltas.clone().unwrap_or_else(|| SIM2_DELTAS.to_vec());
    let s_stars: Vec<u32> = cfg
        .s_stars
        .clone()
        .unwrap_or_else(|| SIM2_S_STARS.to_vec())
        .into_iter()
        .filter(|&s| s <= t)
        .collect();
    if s_stars.is_empty() {
        return Err(Error::Config(format!("no sketch degree is <= {t}")));
    }
    let mut results = Vec::new();
    let mut replicates = Vec::new();
    for (i, &delta) in deltas.iter().enumerate() {
        let data = setup.dataset(delta, noise_seed(cfg, i))?;
        let grid = grid_for(cfg, setup.family, delta);
        for &s in &s_stars {
            let m = setup.library.load(s)?.len();
            if m >= n {
                // Every method selects the whole training set.
                for method in ["first", "random", "design"] {
                    let mut row =
                        grid_search_full(&data, setup.test(), method, Some(s), setup.family, &grid)?;
                    if method == "random" {
                        row.rmse_std = Some(0.0);
                    }
                    results.push(row);
                }
                continue;
            }
            let run = |method: &SketchMethod| {
                grid_search(&data, setup.test(), method, setup.family, &grid, &setup.library)
                    .map(|mut row| {
                        row.s_star = Some(s);
                        row
                    })
            };
            results.push(run(&SketchMethod::First { m })?);
            results.push(run(&setup.design(s, cfg))?);
            let reps: Vec<ResultRow> = (0..cfg.n_seeds as u64)
                .into_par_iter()
                .map(|k| {
                    let seed = cfg.sketch_seed.wrapping_add(k);
                    run(&SketchMethod::Random { m, seed }).map(|mut r| {
                        r.seed = Some(seed);
                        r
                    })
                })
                .collect::<Result<_>>()?;
            results.push(aggregate(&reps));
            replicates.extend(reps);
        }
    }
    strip_timing(&mut results, cfg.record_timings);
    strip_timing(&mut replicates, cfg.record_timings);
    sort_rows(&mut results);
    sort_rows(&mut replicates);
    Ok(SimulationOutput {
        results,
        replicates,
        field: None,
    })
}

/// Exact target, a fresh noisy sample, prediction and absolute error of
/// `model_kernel`/`centers`/`alpha` on `grid_points`.
pub fn error_field(
    target: &TargetFunction,
    model: &crate::rls::FittedModel,
    grid_points: &PointSet,
    noise: &NoiseModel,
) -> Result<ErrorField> {
    let exact = target.eval_set(grid_points);
    let eps = sample_truncated_gaussian(noise, grid_points.len());
    let noisy = exact.iter().zip(&eps).map(|(f, e)| f + e).collect();
    let prediction = predict(model, grid_points)?;
    let abs_error = prediction
        .iter()
        .zip(&exact)
        .map(|(p, f)| (p - f).abs())
        .collect();
    Ok(ErrorField {
        points: grid_points.clone(),
        exact,
        noisy,
        prediction,
        abs_error,
    })
}

/// Fits the design-sketched estimator at the configured noise level and
/// sketch degree, then evaluates it on a dense spiral grid.
pub fn run_simulation3(cfg: &ExperimentConfig) -> Result<SimulationOutput> {
    let setup = Setup::new(cfg)?;
    let s = cfg.sim3.s_star;
    if s > setup.degree {
        return Err(Error::Config(format!(
            "sim3.s_star {s} exceeds the training degree {}",
            setup.degree
        )));
    }
    let delta = cfg.sim3.delta;
    let data = setup.dataset(delta, cfg.noise_seed)?;
    let grid = grid_for(cfg, setup.family, delta);
    let full = s == setup.degree;
    let mut row = if full {
        grid_search_full(&data, setup.test(), "design", Some(s), setup.family, &grid)?
    } else {
        grid_search(
            &data,
            setup.test(),
            &setup.design(s, cfg),
            setup.family,
            &grid,
            &setup.library,
        )?
    };
    let kernel = match row.sigma {
        Some(sigma) => KernelSpec::gaussian(sigma)?,
        None => KernelSpec::Wendland,
    };
    let (model, _) = if full {
        FullSystem::new(&data.inputs, kernel)?.solve(&data.labels, row.lambda)?
    } else {
        let centers = setup.library.load(s)?;
        SketchSystem::new(&data.inputs, &centers, kernel)?.solve(&data.labels, row.lambda)?
    };
    let points = generate_spiral(cfg.sim3.field_points)?;
    let noise = NoiseModel::new(delta, cfg.noise_seed.wrapping_add(1))?;
    let field = error_field(&setup.target, &model, &points, &noise)?;
    if !cfg.record_timings {
        row.fit_seconds = 0.0;
    }
    Ok(SimulationOutput {
        results: vec![row],
        replicates: Vec::new(),
        field: Some(field),
    })
}

/// Writes `results.csv`, plus `random_replicates.csv`, `random_summary.csv`
/// and `field.csv` when there is something to put in them, into `dir`.
pub fn write_outputs(output: &SimulationOutput, dir: impl AsRef<Path>) -> Result<()> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let write = |name: &str, text: String| {
        let path = dir.join(name);
        fs::write(&path, text).map_err(|e| Error::io(&path, e))
    };
    write("results.csv", format_results_csv(&output.results, false))?;
    if !output.replicates.is_empty() {
        write("random_replicates.csv", format_results_csv(&output.replicates, true))?;
    }
    let summary: Vec<&ResultRow> = output.results.iter().filter(|r| r.rmse_std.is_some()).collect();
    if !summary.is_empty() {
        write("random_summary.csv", format_summary_csv(&summary))?;
    }
    if let Some(field) = &output.field {
        write("field.csv", format_field_csv(field))?;
    }
    Ok(())
}
