//! Writes the pointwise error field of a design-sketched fit to CSV
//! (a reduced Simulation 3).
//!
//! cargo run --release --example error_field -- out_dir

use sphere_sketch::harness::{run_simulation3, write_outputs, ExperimentConfig, Sim3Config};

fn main() -> sphere_sketch::Result<()> {
    let out_dir = std::env::args().nth(1).unwrap_or_else(|| "error_field_out".into());
    let cfg = ExperimentConfig {
        training_degree: 31,
        test_points: 3000,
        design_dir: concat!(env!("CARGO_MANIFEST_DIR"), "/../../data/designs").into(),
        sim3: Sim3Config {
            delta: 0.1,
            s_star: 13,
            field_points: 5000,
        },
        ..Default::default()
    };
    let out = run_simulation3(&cfg)?;
    let field = out.field.as_ref().expect("simulation 3 produces a field");
    let max_err = field.abs_error.iter().copied().fold(0.0, f64::max);
    println!(
        "lambda {:.3e}, test rmse {:.4e}, max abs error on {} points {max_err:.4e}",
        out.results[0].lambda,
        out.results[0].rmse,
        field.points.len()
    );
    write_outputs(&out, &out_dir)?;
    println!("wrote {out_dir}/field.csv");
    Ok(())
}
