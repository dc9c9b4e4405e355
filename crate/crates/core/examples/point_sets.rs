//! Spiral and equal-area point sets, with their covering and packing radii.
//!
//! cargo run --example point_sets -- 500

use sphere_sketch::points::{eq_area_centers, generate_spiral, mesh_norm, separation_radius};

fn main() -> sphere_sketch::Result<()> {
    let n: usize = std::env::args()
        .nth(1)
        .map(|s| s.parse().expect("point count"))
        .unwrap_or(200);

    println!("{:>10} {:>8} {:>12} {:>12} {:>8}", "kind", "n", "mesh norm", "separation", "ratio");
    for (kind, set) in [("spiral", generate_spiral(n)?), ("eq", eq_area_centers(n)?)] {
        let h = mesh_norm(&set);
        let q = separation_radius(&set)?;
        println!("{kind:>10} {n:>8} {h:>12.6} {q:>12.6} {:>8.3}", h / q);
    }
    Ok(())
}
