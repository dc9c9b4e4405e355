use std::fmt;
use std::path::PathBuf;
use std::time::Instant;

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;

use super::designs::DesignLibrary;
use crate::data::{rmse_values, Dataset};
use crate::error::{Error, Result};
use crate::kernels::{cross_matrix, KernelSpec};
use crate::points::PointSet;
use crate::rls::{FullSystem, SketchSystem};

/// How the expansion centers are chosen.
#[derive(Debug, Clone, PartialEq)]
pub enum SketchMethod {
    /// The first `m` training points in file order.
    First { m: usize },
    /// `m` distinct training points drawn uniformly without replacement.
    Random { m: usize, seed: u64 },
    /// A symmetric `s_star`-design read from `design_dir`.
    Design { s_star: u32, design_dir: PathBuf },
}

impl SketchMethod {
    pub fn name(&self) -> &'static str {
        match self {
            SketchMethod::First { .. } => "first",
            SketchMethod::Random { .. } => "random",
            SketchMethod::Design { .. } => "design",
        }
    }

    pub fn s_star(&self) -> Option<u32> {
        match self {
            SketchMethod::Design { s_star, .. } => Some(*s_star),
            _ => None,
        }
    }
}

impl fmt::Display for SketchMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SketchMethod::First { m } => write!(f, "first(m={m})"),
            SketchMethod::Random { m, seed } => write!(f, "random(m={m}, seed={seed})"),
            SketchMethod::Design { s_star, .. } => write!(f, "design(s*={s_star})"),
        }
    }
}

fn check_count(m: usize, n: usize) -> Result<()> {
    if m == 0 || m > n {
        return Err(Error::InvalidArgument(format!(
            "sketch size {m} outside 1..={n}"
        )));
    }
    Ok(())
}

/// Center set for `method`, loading designs through `library`.
pub fn select_sketch_with(
    method: &SketchMethod,
    training: &PointSet,
    library: &DesignLibrary,
) -> Result<PointSet> {
    match method {
        SketchMethod::First { m } => {
            check_count(*m, training.len())?;
            let idx: Vec<usize> = (0..*m).collect();
            training.select(&idx, method.to_string())
        }
        SketchMethod::Random { m, seed } => {
            check_count(*m, training.len())?;
            let mut rng = ChaCha20Rng::seed_from_u64(*seed);
            let idx = rand::seq::index::sample(&mut rng, training.len(), *m).into_vec();
            training.select(&idx, method.to_string())
        }
        SketchMethod::Design { s_star, .. } => library.load(*s_star),
    }
}

pub fn select_sketch(method: &SketchMethod, training: &PointSet) -> Result<PointSet> {
    let dir = match method {
        SketchMethod::Design { design_dir, .. } => design_dir.clone(),
        _ => PathBuf::new(),
    };
    select_sketch_with(method, training, &DesignLibrary::new(dir))
}

/// Kernel family searched over; the Gaussian family is indexed by width.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum KernelFamily {
    Gaussian,
    Wendland,
}

impl KernelFamily {
    /// Kernel paired with each target: Gaussian for `f1`, Wendland for `f2`.
    pub fn for_target(id: &str) -> Self {
        if id == "f1" {
            KernelFamily::Gaussian
        } else {
            KernelFamily::Wendland
        }
    }
}

/// Hyperparameter grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    /// Descending regularization parameters.
    pub lambdas: Vec<f64>,
    /// Gaussian widths; ignored for the Wendland family.
    pub sigmas: Option<Vec<f64>>,
}

/// Grid values stay strictly above this floor.
pub const LAMBDA_FLOOR: f64 = 1e-10;

impl GridSpec {
    /// `{base^-q : q = 0, 1, …}` restricted to values above 1e-10.
    pub fn geometric_lambdas(base: f64) -> Vec<f64> {
        assert!(base > 1.0, "base must exceed 1");
        (0..)
            .map(|q| base.powi(-q))
            .take_while(|&v| v > LAMBDA_FLOOR)
            .collect()
    }

    /// `count` log-equally spaced values from `lo` to `hi` inclusive.
    pub fn log_spaced(lo: f64, hi: f64, count: usize) -> Vec<f64> {
        if count == 1 {
            return vec![lo];
        }
        let (a, b) = (lo.ln(), hi.ln());
        (0..count)
            .map(|i| (a + (b - a) * i as f64 / (count - 1) as f64).exp())
            .collect()
    }

    /// Default grid: powers of 1/2 (Gaussian) or 1/1.5 (Wendland) for λ;
    /// ten widths in [0.1, 1], or [0.028, 0.28] for noise-free data.
    pub fn default_for(family: KernelFamily, noise_free: bool) -> Self {
        match family {
            KernelFamily::Gaussian => {
                let (lo, hi) = if noise_free { (0.028, 0.28) } else { (0.1, 1.0) };
                GridSpec {
                    lambdas: Self::geometric_lambdas(2.0),
                    sigmas: Some(Self::log_spaced(lo, hi, 10)),
                }
            }
            KernelFamily::Wendland => GridSpec {
                lambdas: Self::geometric_lambdas(1.5),
                sigmas: None,
            },
        }
    }

    fn kernels(&self, family: KernelFamily) -> Result<Vec<KernelSpec>> {
        match family {
            KernelFamily::Wendland => Ok(vec![KernelSpec::Wendland]),
            KernelFamily::Gaussian => {
                let sigmas = self.sigmas.as_ref().ok_or_else(|| {
                    Error::InvalidArgument("gaussian grid search needs sigmas".into())
                })?;
                sigmas.iter().map(|&s| KernelSpec::gaussian(s)).collect()
            }
        }
    }
}

/// One line of a results table.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub target: String,
    pub delta: f64,
    pub method: String,
    pub s_star: Option<u32>,
    pub m: usize,
    /// Sampling ratio `m / N`.
    pub sr: f64,
    pub lambda: f64,
    pub sigma: Option<f64>,
    pub rmse: f64,
    pub fit_seconds: f64,
    /// Spread over replicates, for aggregated random-sketch rows.
    pub rmse_std: Option<f64>,
    /// Sampling seed, for individual random-sketch replicates.
    pub seed: Option<u64>,
    /// Grid cells whose solve failed.
    pub failed_cells: usize,
}

struct Cell {
    lambda: f64,
    sigma: Option<f64>,
    rmse: f64,
    solve_seconds: f64,
    setup_seconds: f64,
}

fn better(a: &Cell, b: &Cell) -> bool {
    if a.rmse != b.rmse {
        return a.rmse < b.rmse;
    }
    if a.lambda != b.lambda {
        return a.lambda > b.lambda;
    }
    a.sigma.unwrap_or(0.0) > b.sigma.unwrap_or(0.0)
}

fn pick_best(cells: Vec<Result<Cell>>) -> Result<(Cell, usize)> {
    let total = cells.len();
    let mut failed = 0;
    let mut best: Option<Cell> = None;
    let mut last_err = None;
    for c in cells {
        match c {
            Ok(c) if c.rmse.is_finite() => {
                if best.as_ref().is_none_or(|b| better(&c, b)) {
                    best = Some(c);
                }
            }
            Ok(_) => failed += 1,
            Err(e) => {
                failed += 1;
                last_err = Some(e);
            }
        }
    }
    match best {
        Some(b) => Ok((b, failed)),
        None => Err(Error::Numerical(format!(
            "all {total} grid cells failed{}",
            last_err.map(|e| format!(" (last: {e})")).unwrap_or_default()
        ))),
    }
}

fn row_from(
    data: &Dataset,
    method: &str,
    s_star: Option<u32>,
    m: usize,
    best: Cell,
    failed: usize,
) -> ResultRow {
    let n = data.inputs.len();
    ResultRow {
        target: data.target.id().to_string(),
        delta: data.noise.delta,
        method: method.to_string(),
        s_star,
        m,
        sr: m as f64 / n as f64,
        lambda: best.lambda,
        sigma: best.sigma,
        rmse: best.rmse,
        fit_seconds: best.setup_seconds + best.solve_seconds,
        rmse_std: None,
        seed: None,
        failed_cells: failed,
    }
}

/// Scores every (λ, σ) pair of `grid` for the sketched estimator on the
/// centers chosen by `method`, and keeps the pair with the lowest test
/// RMSE. Ties go to the larger λ, then the larger σ.
pub fn grid_search(
    data: &Dataset,
    test: (&PointSet, &[f64]),
    method: &SketchMethod,
    family: KernelFamily,
    grid: &GridSpec,
    library: &DesignLibrary,
) -> Result<ResultRow> {
    let centers = select_sketch_with(method, &data.inputs, library)?;
    grid_search_centers(data, test, &centers, method.name(), method.s_star(), family, grid)
}

/// [`grid_search`] for an explicit center set.
pub fn grid_search_centers(
    data: &Dataset,
    test: (&PointSet, &[f64]),
    centers: &PointSet,
    method: &str,
    s_star: Option<u32>,
    family: KernelFamily,
    grid: &GridSpec,
) -> Result<ResultRow> {
    let (test_inputs, test_labels) = test;
    if grid.lambdas.is_empty() {
        return Err(Error::InvalidArgument("empty lambda grid".into()));
    }
    let kernels = grid.kernels(family)?;
    let mut cells = Vec::with_capacity(kernels.len() * grid.lambdas.len());
    for kernel in kernels {
        let setup = Instant::now();
        let prepared = SketchSystem::new(&data.inputs, centers, kernel)
            .and_then(|sys| Ok((sys, cross_matrix(&kernel, test_inputs, centers)?)));
        let setup_seconds = setup.elapsed().as_secs_f64();
        let (system, test_cross) = match prepared {
            Ok(p) => p,
            Err(e) => {
                cells.push(Err(e));
                continue;
            }
        };
        let scored: Vec<Result<Cell>> = grid
            .lambdas
            .par_iter()
            .map(|&lambda| {
                let (model, diag) = system.solve(&data.labels, lambda)?;
                let pred = model.predict_with(&test_cross)?;
                Ok(Cell {
                    lambda,
                    sigma: kernel.sigma(),
                    rmse: rmse_values(&pred, test_labels)?,
                    solve_seconds: diag.wall_time,
                    setup_seconds,
                })
            })
            .collect();
        cells.extend(scored);
    }
    let (best, failed) = pick_best(cells)?;
    Ok(row_from(data, method, s_star, centers.len(), best, failed))
}

/// Grid search for standard regularized least squares on all training
/// points (the `m = N` baseline).
pub fn grid_search_full(
    data: &Dataset,
    test: (&PointSet, &[f64]),
    method: &str,
    s_star: Option<u32>,
    family: KernelFamily,
    grid: &GridSpec,
) -> Result<ResultRow> {
    let (test_inputs, test_labels) = test;
    if grid.lambdas.is_empty() {
        return Err(Error::InvalidArgument("empty lambda grid".into()));
    }
    let kernels = grid.kernels(family)?;
    let mut cells = Vec::with_capacity(kernels.len() * grid.lambdas.len());
    for kernel in kernels {
        let setup = Instant::now();
        let prepared = FullSystem::new(&data.inputs, kernel)
            .and_then(|sys| Ok((sys, cross_matrix(&kernel, test_inputs, &data.inputs)?)));
        let setup_seconds = setup.elapsed().as_secs_f64();
        let (system, test_cross) = match prepared {
            Ok(p) => p,
            Err(e) => {
                cells.push(Err(e));
                continue;
            }
        };
        let scored: Vec<Result<Cell>> = grid
            .lambdas
            .par_iter()
            .map(|&lambda| {
                let (model, diag) = system.solve(&data.labels, lambda)?;
                let pred = model.predict_with(&test_cross)?;
                Ok(Cell {
                    lambda,
                    sigma: kernel.sigma(),
                    rmse: rmse_values(&pred, test_labels)?,
                    solve_seconds: diag.wall_time,
                    setup_seconds,
                })
            })
            .collect();
        cells.extend(scored);
    }
    let (best, failed) = pick_best(cells)?;
    Ok(row_from(data, method, s_star, data.inputs.len(), best, failed))
}
