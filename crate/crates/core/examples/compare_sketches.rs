//! First, random and design sketches of the same size on noisy f2 data,
//! each with its own grid-searched λ.
//!
//! cargo run --release --example compare_sketches -- [training degree] [s*] [delta]

use sphere_sketch::data::{make_dataset, NoiseModel, TargetFunction};
use sphere_sketch::harness::{grid_search, DesignLibrary, GridSpec, KernelFamily, SketchMethod};
use sphere_sketch::points::generate_spiral;

fn main() -> sphere_sketch::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let t: u32 = args.first().map_or(31, |s| s.parse().expect("degree"));
    let s_star: u32 = args.get(1).map_or(9, |s| s.parse().expect("degree"));
    let delta: f64 = args.get(2).map_or(0.1, |s| s.parse().expect("delta"));

    let dir = concat!(env!("CARGO_MANIFEST_DIR"), "/../../data/designs");
    let library = DesignLibrary::new(dir);
    let training = library.load(t)?;
    let target = TargetFunction::wendland_default();
    let data = make_dataset(&training, &target, &NoiseModel::new(delta, 1)?);
    let test = generate_spiral(4000)?;
    let test_labels = target.eval_set(&test);
    let grid = GridSpec::default_for(KernelFamily::Wendland, delta == 0.0);
    let m = library.load(s_star)?.len();

    let mut methods = vec![
        SketchMethod::First { m },
        SketchMethod::Design {
            s_star,
            design_dir: dir.into(),
        },
    ];
    methods.extend((0..5).map(|seed| SketchMethod::Random { m, seed }));

    println!("N={} m={m} delta={delta}", training.len());
    for method in &methods {
        let row = grid_search(
            &data,
            (&test, &test_labels),
            method,
            KernelFamily::Wendland,
            &grid,
            &library,
        )?;
        println!("{:<24} rmse {:.4e}  lambda {:.3e}", method.to_string(), row.rmse, row.lambda);
    }
    Ok(())
}
