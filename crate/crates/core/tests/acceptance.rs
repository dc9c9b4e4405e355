//! Acceptance suite: one check per criterion, each printing a PASS/FAIL
//! line. Run with `cargo test --test acceptance -- --nocapture`.

mod common;

use std::time::Instant;

use common::*;
use sphere_sketch::data::{make_dataset, rmse_values, sample_truncated_gaussian, NoiseModel, TargetFunction};
use sphere_sketch::harness::{
    run_simulation1, run_simulation2, ExperimentConfig, GridSpec, ResultRow, DESK_TRAINING_DEGREE,
};
use sphere_sketch::kernels::{gram, KernelSpec};
use sphere_sketch::legendre::verify_design;
use sphere_sketch::points::{eq_area_centers, generate_spiral};
use sphere_sketch::rls::{fit_full, fit_sketched, predict, FittedModel, SketchSystem};

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(cond: bool, detail: String) -> Outcome {
    if cond {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn desk_config() -> ExperimentConfig {
    ExperimentConfig {
        training_degree: DESK_TRAINING_DEGREE,
        design_dir: design_dir(),
        ..Default::default()
    }
}

fn rmse_of(rows: &[ResultRow], delta: f64, s_star: u32, method: &str) -> f64 {
    rows.iter()
        .find(|r| r.delta == delta && r.s_star == Some(s_star) && r.method == method)
        .unwrap_or_else(|| panic!("no row for delta={delta} s*={s_star} {method}"))
        .rmse
}

fn criterion1() -> Outcome {
    let start = Instant::now();
    let lib = library();
    let mut details = Vec::new();
    let mut ok = true;
    for (t, n) in [(5, 12), (13, 94), (21, 234), (25, 328)] {
        let set = lib.load(t).map_err(|e| e.to_string())?;
        let report = verify_design(&set, t, 1e-8).map_err(|e| e.to_string())?;
        let worst = report.residuals.iter().map(|r| r.1).fold(0.0, f64::max);
        ok &= set.len() == n && report.max_verified_degree == t && worst <= 1e-8;
        details.push(format!("t={t} N={} max r_k={worst:.1e}", set.len()));
    }
    let secs = start.elapsed().as_secs_f64();
    check(ok && secs < 5.0, format!("{}; {secs:.2}s", details.join(", ")))
}

fn criterion2() -> Outcome {
    let x = library().load(13).map_err(|e| e.to_string())?;
    let target = TargetFunction::wendland_default();
    let y = target.eval_set(&x);
    let test = generate_spiral(1000).map_err(|e| e.to_string())?;
    let start = Instant::now();
    let (sketched, _) = fit_sketched(&x, &y, &x, KernelSpec::Wendland, 1e-4).map_err(|e| e.to_string())?;
    let (full, _) = fit_full(&x, &y, KernelSpec::Wendland, 1e-4).map_err(|e| e.to_string())?;
    let a = predict(&sketched, &test).map_err(|e| e.to_string())?;
    let b = predict(&full, &test).map_err(|e| e.to_string())?;
    let secs = start.elapsed().as_secs_f64();
    let rel = max_rel_diff(&a, &b);
    check(rel <= 1e-6 && secs < 1.0, format!("max relative difference {rel:.2e}; {secs:.3}s"))
}

fn criterion3() -> Outcome {
    let target = TargetFunction::wendland_default();
    let centers = eq_area_centers(20).map_err(|e| e.to_string())?;
    let x = library().load(DESK_TRAINING_DEGREE).map_err(|e| e.to_string())?;
    let y = target.eval_set(&x);
    let (model, _) = fit_sketched(&x, &y, &centers, KernelSpec::Wendland, 1e-12).map_err(|e| e.to_string())?;
    let test = generate_spiral(1000).map_err(|e| e.to_string())?;
    let pred = predict(&model, &test).map_err(|e| e.to_string())?;
    let rmse = rmse_values(&pred, &target.eval_set(&test)).map_err(|e| e.to_string())?;
    let worst = model.coefficients.iter().map(|a| (a - 1.0).abs()).fold(0.0, f64::max);
    check(
        rmse < 1e-8 && worst <= 1e-6,
        format!("test rmse {rmse:.2e}, max |alpha - 1| {worst:.2e}"),
    )
}

fn criterion4() -> Outcome {
    let t = DESK_TRAINING_DEGREE;
    let mut s_stars: Vec<u32> = (1..=25).step_by(2).collect();
    s_stars.push(t);
    let cfg = ExperimentConfig {
        deltas: Some(vec![0.0, 0.5]),
        s_stars: Some(s_stars.clone()),
        ..desk_config()
    };
    let rows = run_simulation1(&cfg).map_err(|e| e.to_string())?.results;
    let base_noisy = rmse_of(&rows, 0.5, t, "design");
    let best_small = s_stars[..s_stars.len() - 1]
        .iter()
        .map(|&s| (rmse_of(&rows, 0.5, s, "design") / base_noisy, s))
        .find(|(ratio, _)| *ratio <= 1.2);
    let base_clean = rmse_of(&rows, 0.0, t, "design");
    let clean_ratio = rmse_of(&rows, 0.0, 9, "design") / base_clean;
    let plateau = match best_small {
        Some((ratio, s)) => format!("delta=0.5: s*={s} within {ratio:.3}x of baseline"),
        None => "delta=0.5: no s* <= 25 within 1.2x of baseline".into(),
    };
    check(
        best_small.is_some() && clean_ratio > 2.0,
        format!("{plateau}; delta=0: s*=9 at {clean_ratio:.2}x baseline"),
    )
}

fn criterion5() -> Outcome {
    let cfg = ExperimentConfig {
        deltas: Some(vec![0.1]),
        s_stars: Some(vec![9]),
        n_seeds: 10,
        ..desk_config()
    };
    let rows = run_simulation2(&cfg).map_err(|e| e.to_string())?.results;
    let design = rmse_of(&rows, 0.1, 9, "design");
    let random = rmse_of(&rows, 0.1, 9, "random");
    let first = rmse_of(&rows, 0.1, 9, "first");
    let m = rows[0].m;
    check(
        design <= random && random <= first && design < 0.9 * first && rows.iter().all(|r| r.m == m),
        format!("m={m}: design {design:.4e}, random {random:.4e}, first {first:.4e}"),
    )
}

fn criterion6() -> Outcome {
    let deltas = vec![0.0, 1e-3, 0.1, 0.5];
    let cfg = ExperimentConfig {
        deltas: Some(deltas.clone()),
        s_stars: Some(vec![25]),
        ..desk_config()
    };
    let rows = run_simulation1(&cfg).map_err(|e| e.to_string())?.results;
    let rmses: Vec<f64> = deltas.iter().map(|&d| rmse_of(&rows, d, 25, "design")).collect();
    let ok = rmses.windows(2).all(|w| w[1] >= 0.95 * w[0]);
    let listed: Vec<String> = rmses.iter().map(|r| format!("{r:.3e}")).collect();
    check(ok, format!("rmse over delta: {}", listed.join(" <= ")))
}

fn peak_rss_bytes() -> Option<u64> {
    let status = std::fs::read_to_string("/proc/self/status").ok()?;
    let line = status.lines().find(|l| l.starts_with("VmHWM:"))?;
    let kb: u64 = line.split_whitespace().nth(1)?.parse().ok()?;
    Some(kb * 1024)
}

fn criterion7() -> Outcome {
    let lib = library();
    let x = lib.load(DESK_TRAINING_DEGREE).map_err(|e| e.to_string())?;
    let n = x.len();
    let data = make_dataset(&x, &TargetFunction::wendland_default(), &NoiseModel::new(0.1, 3).unwrap());
    let rss_before = peak_rss_bytes();
    let mut points = Vec::new();
    let mut largest_m = 0;
    for s in [9, 25, 45] {
        let centers = lib.load(s).map_err(|e| e.to_string())?;
        // Best of three to damp scheduler noise.
        let secs = (0..3)
            .map(|_| {
                let start = Instant::now();
                fit_sketched(&x, &data.labels, &centers, KernelSpec::Wendland, 1e-4).map(|_| start.elapsed().as_secs_f64())
            })
            .collect::<Result<Vec<f64>, _>>()
            .map_err(|e| e.to_string())?
            .into_iter()
            .fold(f64::INFINITY, f64::min);
        largest_m = centers.len();
        points.push((centers.len() as f64, secs));
    }
    let growth = match (rss_before, peak_rss_bytes()) {
        (Some(a), Some(b)) => Some(b.saturating_sub(a)),
        _ => None,
    };
    let budget = 10 * 8 * (n * largest_m + largest_m * largest_m) as u64;

    let lx: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ly: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let mx = lx.iter().sum::<f64>() / 3.0;
    let my = ly.iter().sum::<f64>() / 3.0;
    let slope = lx.iter().zip(&ly).map(|(a, b)| (a - mx) * (b - my)).sum::<f64>()
        / lx.iter().map(|a| (a - mx).powi(2)).sum::<f64>();
    let t328 = points[1].1;
    let timings: Vec<String> = points.iter().map(|(m, s)| format!("m={m}: {s:.3}s")).collect();
    let mem_ok = growth.is_none_or(|g| g <= budget);
    check(
        slope <= 3.3 && t328 < 1.0 && mem_ok,
        format!(
            "{}; slope {slope:.2}; peak memory growth {} MB (budget {} MB)",
            timings.join(", "),
            growth.map_or("n/a".into(), |g| (g >> 20).to_string()),
            budget >> 20
        ),
    )
}

fn objective(model: &FittedModel, x: &sphere_sketch::points::PointSet, y: &[f64], alpha: &[f64]) -> f64 {
    let trial = FittedModel {
        coefficients: alpha.to_vec(),
        ..model.clone()
    };
    let pred = predict(&trial, x).unwrap();
    pred.iter().zip(y).map(|(p, v)| (p - v).powi(2)).sum::<f64>() / y.len() as f64
        + model.lambda * trial.native_norm_sq().unwrap()
}

fn criterion8() -> Outcome {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha20Rng::seed_from_u64(8);
    let lib = library();
    let x = generate_spiral(400).map_err(|e| e.to_string())?;
    let centers = lib.load(9).map_err(|e| e.to_string())?;
    let target = TargetFunction::wendland_default();
    let data = make_dataset(&x, &target, &NoiseModel::new(0.1, 5).unwrap());
    let mut failures = Vec::new();

    // Monotone shrinkage across the λ grid.
    let system = SketchSystem::new(&x, &centers, KernelSpec::Wendland).map_err(|e| e.to_string())?;
    let norms: Vec<f64> = GridSpec::geometric_lambdas(1.5)
        .iter()
        .map(|&l| system.solve(&data.labels, l).unwrap().0.native_norm_sq().unwrap())
        .collect();
    if !norms.windows(2).all(|w| w[1] >= w[0] * (1.0 - 1e-9)) {
        failures.push("shrinkage");
    }

    // First-order optimality under 20 perturbations of norm 1e-3.
    let (model, _) = system.solve(&data.labels, 1e-4).map_err(|e| e.to_string())?;
    let base = objective(&model, &x, &data.labels, &model.coefficients);
    for _ in 0..20 {
        let d: Vec<f64> = (0..centers.len()).map(|_| rng.random_range(-1.0..1.0)).collect();
        let norm = d.iter().map(|v| v * v).sum::<f64>().sqrt();
        let alpha: Vec<f64> = model.coefficients.iter().zip(&d).map(|(a, v)| a + 1e-3 * v / norm).collect();
        if objective(&model, &x, &data.labels, &alpha) < base - 1e-10 {
            failures.push("optimality");
            break;
        }
    }

    // Linearity in the labels.
    let y1: Vec<f64> = (0..x.len()).map(|_| rng.random_range(-1.0..1.0)).collect();
    let y2: Vec<f64> = (0..x.len()).map(|_| rng.random_range(-1.0..1.0)).collect();
    let sum: Vec<f64> = y1.iter().zip(&y2).map(|(a, b)| a + b).collect();
    let test = generate_spiral(100).map_err(|e| e.to_string())?;
    let p = |y: &[f64]| predict(&system.solve(y, 1e-2).unwrap().0, &test).unwrap();
    let added: Vec<f64> = p(&y1).iter().zip(p(&y2)).map(|(a, b)| a + b).collect();
    if max_rel_diff(&p(&sum), &added) > 1e-8 {
        failures.push("linearity");
    }

    // Gram matrices are PSD for random sets of up to 50 points.
    for trial in 0..20 {
        let pts: Vec<_> = (0..(trial * 5 % 50 + 1))
            .filter_map(|_| {
                sphere_sketch::points::UnitPoint::new(
                    rng.random_range(-1.0..1.0),
                    rng.random_range(-1.0..1.0),
                    rng.random_range(-1.0..1.0),
                )
            })
            .collect();
        let set = sphere_sketch::points::PointSet::new(pts, "random").map_err(|e| e.to_string())?;
        for k in [KernelSpec::gaussian(rng.random_range(0.05..2.0)).unwrap(), KernelSpec::Wendland] {
            let g = gram(&k, &set).map_err(|e| e.to_string())?;
            let (lo, hi) = min_eigenvalue(g.as_mat());
            if lo < -1e-10 * hi {
                failures.push("psd");
            }
        }
    }

    // Truncated noise stays within ±10.
    for delta in [0.5, 5.0, 50.0] {
        let eps = sample_truncated_gaussian(&NoiseModel::new(delta, 17).unwrap(), 100_000);
        if eps.iter().any(|e| e.abs() > 10.0) {
            failures.push("noise bound");
        }
    }
    failures.dedup();
    check(
        failures.is_empty(),
        if failures.is_empty() {
            "shrinkage, optimality, linearity, PSD and noise bound hold".into()
        } else {
            format!("failed: {}", failures.join(", "))
        },
    )
}

fn criterion9() -> Outcome {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let config = dir.path().join("sim2.toml");
    std::fs::write(
        &config,
        format!(
            "training_degree = 25\ndeltas = [0.0, 0.1]\ns_stars = [5, 9]\nn_seeds = 3\ntest_points = 800\ndesign_dir = {:?}\n[grid]\nlambda_stride = 4\n",
            design_dir()
        ),
    )
    .map_err(|e| e.to_string())?;
    let run = |name: &str| -> Result<std::path::PathBuf, String> {
        let out = dir.path().join(name);
        let status = std::process::Command::new(env!("CARGO_BIN_EXE_sphere-sketch"))
            .args(["simulate", "--sim", "2", "--config"])
            .arg(&config)
            .arg("--out-dir")
            .arg(&out)
            .output()
            .map_err(|e| e.to_string())?;
        if !status.status.success() {
            return Err(String::from_utf8_lossy(&status.stderr).into_owned());
        }
        Ok(out)
    };
    let (a, b) = (run("a")?, run("b")?);
    let mut same = true;
    let mut files = 0;
    for name in ["results.csv", "random_replicates.csv", "random_summary.csv"] {
        let x = std::fs::read(a.join(name)).map_err(|e| e.to_string())?;
        let y = std::fs::read(b.join(name)).map_err(|e| e.to_string())?;
        same &= x == y;
        files += 1;
    }
    check(same, format!("{files} CSV files compared byte for byte"))
}

#[test]
fn acceptance() {
    let criteria: [Criterion; 9] = [
        ("design certification", criterion1),
        ("sketch/full equivalence", criterion2),
        ("exact representation", criterion3),
        ("noise plateau", criterion4),
        ("method ordering", criterion5),
        ("monotone noise response", criterion6),
        ("complexity scaling", criterion7),
        ("solver property suite", criterion8),
        ("determinism", criterion9),
    ];
    // Memory growth in criterion 7 is read from the process high-water
    // mark, so it runs before the large simulations.
    let order = [6, 0, 1, 2, 7, 8, 3, 4, 5];
    let mut results = vec![None; criteria.len()];
    for &i in &order {
        let (name, f) = criteria[i];
        let start = Instant::now();
        let outcome = std::panic::catch_unwind(f).unwrap_or_else(|_| Err("panicked".into()));
        results[i] = Some((name, outcome, start.elapsed().as_secs_f64()));
    }
    let mut failed = Vec::new();
    for (i, r) in results.into_iter().enumerate() {
        let (name, outcome, secs) = r.unwrap();
        let (tag, detail) = match &outcome {
            Ok(d) => ("PASS", d),
            Err(d) => ("FAIL", d),
        };
        println!("criterion {} [{tag}] {name}: {detail} ({secs:.1}s)", i + 1);
        if outcome.is_err() {
            failed.push(i + 1);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
