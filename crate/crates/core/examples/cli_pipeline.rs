//! The file-based workflow behind the command line tool: write points,
//! sample labels, fit, save and reload a model.

use sphere_sketch::data::{load_labels_csv, make_dataset, write_dataset_csv, NoiseModel, TargetFunction};
use sphere_sketch::kernels::KernelSpec;
use sphere_sketch::points::{eq_area_centers, generate_spiral, load_point_file, write_point_file};
use sphere_sketch::rls::{fit_sketched, load_model, predict, write_model};

fn main() -> sphere_sketch::Result<()> {
    let dir = std::env::temp_dir().join("sphere-sketch-pipeline");
    std::fs::create_dir_all(&dir).expect("temp dir");

    write_point_file(&generate_spiral(800)?, dir.join("train.txt"))?;
    write_point_file(&eq_area_centers(120)?, dir.join("centers.txt"))?;
    let train = load_point_file(dir.join("train.txt"))?;
    let data = make_dataset(&train, &TargetFunction::Franke, &NoiseModel::new(0.05, 11)?);
    write_dataset_csv(&data, dir.join("train.csv"))?;

    let labels = load_labels_csv(dir.join("train.csv"))?;
    let centers = load_point_file(dir.join("centers.txt"))?;
    let kernel: KernelSpec = "gaussian:0.3".parse()?;
    let (model, diag) = fit_sketched(&train, &labels, &centers, kernel, 1e-6)?;
    write_model(&model, dir.join("model.txt"))?;
    println!("fit with rank {} in {:.3}s", diag.rank_used, diag.wall_time);

    let reloaded = load_model(dir.join("model.txt"))?;
    let probe = generate_spiral(5)?;
    for (p, v) in probe.iter().zip(predict(&reloaded, &probe)?) {
        println!("f({:+.3}, {:+.3}, {:+.3}) ~ {v:+.5}  (exact {:+.5})", p.x, p.y, p.z, TargetFunction::Franke.eval(p));
    }
    Ok(())
}
