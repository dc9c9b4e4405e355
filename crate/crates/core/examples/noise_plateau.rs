//! RMSE against sketch degree at several noise levels (a reduced Simulation 1).
//!
//! cargo run --release --example noise_plateau

use sphere_sketch::harness::{run_simulation1, ExperimentConfig, GridConfig};

fn main() -> sphere_sketch::Result<()> {
    let cfg = ExperimentConfig {
        training_degree: 31,
        deltas: Some(vec![0.0, 0.1, 0.5]),
        s_stars: Some(vec![3, 5, 9, 13, 17, 21, 25, 31]),
        test_points: 3000,
        design_dir: concat!(env!("CARGO_MANIFEST_DIR"), "/../../data/designs").into(),
        grid: GridConfig {
            lambda_stride: Some(2),
            ..Default::default()
        },
        ..Default::default()
    };
    let out = run_simulation1(&cfg)?;
    println!("{:>6} {:>4} {:>6} {:>12} {:>10}", "delta", "s*", "m", "rmse", "lambda");
    for row in &out.results {
        println!(
            "{:>6} {:>4} {:>6} {:>12.4e} {:>10.2e}",
            row.delta,
            row.s_star.unwrap_or(0),
            row.m,
            row.rmse,
            row.lambda
        );
    }
    Ok(())
}
