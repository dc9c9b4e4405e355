//! Loads the bundled symmetric designs and checks their degree of exactness.
//!
//! cargo run --example verify_designs -- 5 13 21 25

use std::time::Instant;

use sphere_sketch::harness::DesignLibrary;
use sphere_sketch::legendre::{verify_design, DEFAULT_DESIGN_TOLERANCE};

fn main() -> sphere_sketch::Result<()> {
    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/../../data/designs");
    let library = DesignLibrary::new(dir);
    let mut degrees: Vec<u32> = std::env::args()
        .skip(1)
        .map(|s| s.parse().expect("odd degree"))
        .collect();
    if degrees.is_empty() {
        degrees = vec![5, 13, 21, 25];
    }
    for t in degrees {
        let start = Instant::now();
        let set = library.load(t)?;
        let report = verify_design(&set, t, DEFAULT_DESIGN_TOLERANCE)?;
        let worst = report.residuals.iter().map(|r| r.1).fold(0.0, f64::max);
        println!(
            "t={t:>3} N={:>5} verified up to {:>3}  max r_k={worst:.2e}  ({:.3}s)",
            set.len(),
            report.max_verified_degree,
            start.elapsed().as_secs_f64()
        );
    }
    Ok(())
}
