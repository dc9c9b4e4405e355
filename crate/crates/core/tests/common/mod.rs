#![allow(dead_code)]

use std::path::PathBuf;

use proptest::prelude::*;
use sphere_sketch::harness::DesignLibrary;
use sphere_sketch::points::{PointSet, UnitPoint};

pub fn design_dir() -> PathBuf {
    PathBuf::from(concat!(env!("CARGO_MANIFEST_DIR"), "/../../data/designs"))
}

pub fn library() -> DesignLibrary {
    DesignLibrary::new(design_dir())
}

pub fn unit_point() -> impl Strategy<Value = UnitPoint> {
    (-1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64)
        .prop_filter("away from the origin", |(x, y, z)| x * x + y * y + z * z > 0.01)
        .prop_map(|(x, y, z)| UnitPoint::new(x, y, z).unwrap())
}

pub fn point_set(min: usize, max: usize) -> impl Strategy<Value = PointSet> {
    prop::collection::vec(unit_point(), min..=max).prop_map(|v| PointSet::new(v, "random").unwrap())
}

/// Rotation matrix from a unit quaternion.
pub fn rotation() -> impl Strategy<Value = [[f64; 3]; 3]> {
    (-1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64, -1.0..1.0f64)
        .prop_filter("nonzero", |(a, b, c, d)| a * a + b * b + c * c + d * d > 0.01)
        .prop_map(|(a, b, c, d)| {
            let n = (a * a + b * b + c * c + d * d).sqrt();
            let (w, x, y, z) = (a / n, b / n, c / n, d / n);
            [
                [1.0 - 2.0 * (y * y + z * z), 2.0 * (x * y - z * w), 2.0 * (x * z + y * w)],
                [2.0 * (x * y + z * w), 1.0 - 2.0 * (x * x + z * z), 2.0 * (y * z - x * w)],
                [2.0 * (x * z - y * w), 2.0 * (y * z + x * w), 1.0 - 2.0 * (x * x + y * y)],
            ]
        })
}

pub fn rotate(r: &[[f64; 3]; 3], p: &UnitPoint) -> UnitPoint {
    let v = [p.x, p.y, p.z];
    let c = |row: &[f64; 3]| row[0] * v[0] + row[1] * v[1] + row[2] * v[2];
    UnitPoint::new(c(&r[0]), c(&r[1]), c(&r[2])).unwrap()
}

pub fn min_eigenvalue(m: &faer::Mat<f64>) -> (f64, f64) {
    let s = m.self_adjoint_eigenvalues(faer::Side::Lower).unwrap();
    let lo = s.iter().copied().fold(f64::INFINITY, f64::min);
    let hi = s.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    (lo, hi)
}

pub fn max_rel_diff(a: &[f64], b: &[f64]) -> f64 {
    let scale = b.iter().map(|v| v.abs()).fold(0.0, f64::max).max(1e-300);
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max) / scale
}
