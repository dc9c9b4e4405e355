//! Values frozen from independent high-precision computations
//! (`tools/eq_oracle.py`, closed forms evaluated in mpmath).

#![allow(clippy::excessive_precision)]

mod common;

use common::*;
use sphere_sketch::kernels::{gram, KernelSpec};
use sphere_sketch::points::{mesh_norm, separation_radius, EqPartition, UnitPoint};

const EQ20_REGIONS: [usize; 5] = [1, 5, 8, 5, 1];
const EQ20_COLATITUDES: [f64; 6] = [
    0.0,
    0.45102681179626243254,
    1.1592794807274085998,
    1.9823131728623846386,
    2.6905658417935308059,
    std::f64::consts::PI,
];
const EQ20_CENTERS: [[f64; 3]; 20] = [
    [0.0, 0.0, 1.0],
    [0.58325010845965814968, 0.42375600825968095536, 0.6930008343758456189],
    [-0.22278171748952683477, 0.6856516243011449633, 0.6930008343758456189],
    [-0.72093678194026262982, 0.0, 0.6930008343758456189],
    [-0.22278171748952683477, -0.6856516243011449633, 0.6930008343758456189],
    [0.58325010845965814968, -0.42375600825968095536, 0.6930008343758456189],
    [0.97236992039767660183, 0.23344536385590541177, 0.0],
    [0.52249856471594886499, 0.85264016435409222152, 0.0],
    [-0.23344536385590541177, 0.97236992039767660183, 0.0],
    [-0.85264016435409222152, 0.52249856471594886499, 0.0],
    [-0.97236992039767660183, -0.23344536385590541177, 0.0],
    [-0.52249856471594886499, -0.85264016435409222152, 0.0],
    [0.23344536385590541177, -0.97236992039767660183, 0.0],
    [0.85264016435409222152, -0.52249856471594886499, 0.0],
    [0.50977928731676701439, 0.50977928731676701439, -0.6930008343758456189],
    [-0.3272984499136805035, 0.64235937623614070195, -0.6930008343758456189],
    [-0.71206085382857665314, -0.11277935981065055969, -0.6930008343758456189],
    [-0.11277935981065055969, -0.71206085382857665314, -0.6930008343758456189],
    [0.64235937623614070195, -0.3272984499136805035, -0.6930008343758456189],
    [0.0, 0.0, -1.0],
];

#[test]
fn eq_partition_of_twenty() {
    let part = EqPartition::new(20).unwrap();
    assert_eq!(part.regions, EQ20_REGIONS);
    for (a, b) in part.colatitudes.iter().zip(EQ20_COLATITUDES) {
        assert!((a - b).abs() <= 1e-14, "{a} vs {b}");
    }
    for (c, e) in part.centers().iter().zip(EQ20_CENTERS) {
        let d = (c.x - e[0]).abs().max((c.y - e[1]).abs()).max((c.z - e[2]).abs());
        assert!(d <= 1e-14, "{c:?} vs {e:?}");
    }
}

/// Angular distance from an icosahedron vertex to the nearest face center,
/// `acos(sqrt((5 + 2√5) / 15))`.
const ICOSAHEDRON_COVERING: f64 = 0.6523581397843682;
/// Half the angle between adjacent icosahedron vertices, `atan(2) / 2`.
const ICOSAHEDRON_SEPARATION: f64 = 0.5535743588970452;

#[test]
fn icosahedron_radii() {
    let ico = library().load(5).unwrap();
    let h = mesh_norm(&ico);
    assert!((h - ICOSAHEDRON_COVERING).abs() <= 0.02 * ICOSAHEDRON_COVERING, "{h}");
    assert!(h <= ICOSAHEDRON_COVERING + 1e-12);
    let q = separation_radius(&ico).unwrap();
    assert!((q - ICOSAHEDRON_SEPARATION).abs() <= 1e-12, "{q}");
}

#[test]
fn mesh_norm_beats_random_probing() {
    use rand::{Rng, SeedableRng};
    let ico = library().load(5).unwrap();
    let mut rng = rand_chacha::ChaCha20Rng::seed_from_u64(4);
    let mut worst: f64 = 0.0;
    for _ in 0..200_000 {
        let p = UnitPoint::new(
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
        );
        let Some(p) = p else { continue };
        let d = ico.iter().map(|c| c.geodesic(&p)).fold(f64::INFINITY, f64::min);
        worst = worst.max(d);
    }
    let h = mesh_norm(&ico);
    assert!(worst <= h + 1e-12 && h <= 1.02 * worst, "probe {worst}, mesh {h}");
}

/// Gaussian (σ = 0.5) Gram eigenvalues on the icosahedron: the harmonic
/// sums Σ_j k(u_j) P_l(u_j) over the vertex dot products, for l = 0..3.
const ICOSAHEDRON_GRAM_EIGENVALUES: [f64; 4] = [
    1.56351812713579017326716424528,
    1.23783609352939884307359339664,
    0.887698929726324979553152817895,
    0.761492981214796133248763825107,
];

#[test]
fn icosahedron_gaussian_gram_spectrum() {
    let ico = library().load(5).unwrap();
    let g = gram(&KernelSpec::gaussian(0.5).unwrap(), &ico).unwrap();
    let mut s = g.as_mat().self_adjoint_eigenvalues(faer::Side::Lower).unwrap();
    s.sort_by(f64::total_cmp);
    let expected = [3, 5, 3, 1]
        .iter()
        .zip(ICOSAHEDRON_GRAM_EIGENVALUES.iter().rev())
        .flat_map(|(&mult, &v)| std::iter::repeat_n(v, mult));
    for (a, b) in s.iter().zip(expected) {
        assert!((a - b).abs() <= 1e-12, "{a} vs {b}");
    }
}
