//! Fits the Wendland target with its own 20 centers: the sketch spans the
//! target, so the coefficients come back as ones.

use sphere_sketch::data::TargetFunction;
use sphere_sketch::kernels::KernelSpec;
use sphere_sketch::points::{eq_area_centers, generate_spiral};
use sphere_sketch::rls::{fit_sketched, predict};

fn main() -> sphere_sketch::Result<()> {
    let target = TargetFunction::wendland_default();
    let centers = eq_area_centers(20)?;
    let train = generate_spiral(600)?;
    let labels = target.eval_set(&train);

    let (model, diag) = fit_sketched(&train, &labels, &centers, KernelSpec::Wendland, 1e-12)?;
    let worst = model
        .coefficients
        .iter()
        .map(|a| (a - 1.0).abs())
        .fold(0.0, f64::max);
    println!("rank {} of {}, max |alpha - 1| = {worst:.2e}", diag.rank_used, centers.len());

    let test = generate_spiral(1000)?;
    let pred = predict(&model, &test)?;
    let rmse = sphere_sketch::data::rmse_values(&pred, &target.eval_set(&test))?;
    println!("test rmse {rmse:.2e}");
    Ok(())
}
