use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use sphere_sketch::data::{load_labels_csv, make_dataset, write_dataset_csv, NoiseModel, TargetFunction};
use sphere_sketch::harness::{
    run_simulation1, run_simulation2, run_simulation3, write_outputs, ExperimentConfig,
};
use sphere_sketch::kernels::KernelSpec;
use sphere_sketch::legendre::{verify_design, DEFAULT_DESIGN_TOLERANCE};
use sphere_sketch::points::{eq_area_centers, generate_spiral, load_point_file, write_point_file};
use sphere_sketch::rls::{fit_sketched, write_model};
use sphere_sketch::Result;

#[derive(Parser)]
#[command(name = "sphere-sketch", version, about = "Sketched kernel least squares on the sphere")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum PointKind {
    Spiral,
    EqCenters,
}

#[derive(Subcommand)]
enum Command {
    /// Write a spiral or equal-area point set.
    GenPoints {
        #[arg(long)]
        kind: PointKind,
        #[arg(long)]
        n: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Check the design residuals of a point file up to degree t-max.
    VerifyDesign {
        #[arg(long)]
        file: PathBuf,
        #[arg(long)]
        t_max: u32,
        #[arg(long, default_value_t = DEFAULT_DESIGN_TOLERANCE)]
        tol: f64,
    },
    /// Fit a sketched estimator and save the model.
    Fit {
        #[arg(long)]
        train: PathBuf,
        #[arg(long)]
        labels: PathBuf,
        #[arg(long)]
        centers: PathBuf,
        /// `gaussian:<sigma>` or `wendland`
        #[arg(long)]
        kernel: String,
        #[arg(long)]
        lambda: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Sample noisy labels of f1 or f2 on a point file.
    GenData {
        #[arg(long)]
        design: PathBuf,
        #[arg(long)]
        target: String,
        #[arg(long)]
        delta: f64,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run simulation 1, 2 or 3 and write CSV results.
    Simulate {
        #[arg(long, value_parser = clap::value_parser!(u8).range(1..=3))]
        sim: u8,
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out_dir: PathBuf,
        /// Train on the 141-design regardless of the config.
        #[arg(long)]
        full_scale: bool,
    },
}

fn run(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::GenPoints { kind, n, out } => {
            let set = match kind {
                PointKind::Spiral => generate_spiral(n)?,
                PointKind::EqCenters => eq_area_centers(n)?,
            };
            write_point_file(&set, &out)?;
        }
        Command::VerifyDesign { file, t_max, tol } => {
            let set = load_point_file(&file)?;
            let report = verify_design(&set, t_max, tol)?;
            print!("{report}");
            if report.max_verified_degree < t_max {
                return Ok(ExitCode::from(1));
            }
        }
        Command::Fit {
            train,
            labels,
            centers,
            kernel,
            lambda,
            out,
        } => {
            let kernel: KernelSpec = kernel.parse()?;
            let inputs = load_point_file(&train)?;
            let labels = load_labels_csv(&labels)?;
            let centers = load_point_file(&centers)?;
            let (model, diag) = fit_sketched(&inputs, &labels, &centers, kernel, lambda)?;
            write_model(&model, &out)?;
            println!(
                "centers {} rank {} residual {:.3e} time {:.3}s",
                centers.len(),
                diag.rank_used,
                diag.residual_norm,
                diag.wall_time
            );
        }
        Command::GenData {
            design,
            target,
            delta,
            seed,
            out,
        } => {
            let target = TargetFunction::from_id(&target)?;
            let inputs = load_point_file(&design)?;
            let noise = NoiseModel::new(delta, seed)?;
            write_dataset_csv(&make_dataset(&inputs, &target, &noise), &out)?;
        }
        Command::Simulate {
            sim,
            config,
            out_dir,
            full_scale,
        } => {
            let mut cfg = ExperimentConfig::load(&config)?;
            cfg.full_scale |= full_scale;
            let output = match sim {
                1 => run_simulation1(&cfg)?,
                2 => run_simulation2(&cfg)?,
                _ => run_simulation3(&cfg)?,
            };
            write_outputs(&output, &out_dir)?;
            println!("{} rows written to {}", output.results.len(), out_dir.display());
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
