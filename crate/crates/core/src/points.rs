//! Point sets on the unit sphere: loading, generators and geometric diagnostics.

use std::f64::consts::{PI, TAU};
use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use rayon::prelude::*;

use crate::error::{Error, Result};

/// Tolerance on |‖p‖ − 1| accepted when reading points from text files.
pub const LOAD_NORM_TOLERANCE: f64 = 1e-6;

/// A point on S² stored by its Cartesian coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitPoint {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl UnitPoint {
    /// Normalizes `(x, y, z)` onto the sphere. Returns `None` for the zero
    /// vector or non-finite input.
    pub fn new(x: f64, y: f64, z: f64) -> Option<Self> {
        let norm = (x * x + y * y + z * z).sqrt();
        if !norm.is_finite() || norm == 0.0 {
            return None;
        }
        Some(Self {
            x: x / norm,
            y: y / norm,
            z: z / norm,
        })
    }

    /// Point with colatitude `theta` and azimuth `phi`.
    pub fn from_spherical(theta: f64, phi: f64) -> Self {
        let s = theta.sin();
        Self {
            x: s * phi.cos(),
            y: s * phi.sin(),
            z: theta.cos(),
        }
    }

    pub const fn north_pole() -> Self {
        Self {
            x: 0.0,
            y: 0.0,
            z: 1.0,
        }
    }

    pub const fn south_pole() -> Self {
        Self {
            x: 0.0,
            y: 0.0,
            z: -1.0,
        }
    }

    pub fn antipode(&self) -> Self {
        Self {
            x: -self.x,
            y: -self.y,
            z: -self.z,
        }
    }

    pub fn dot(&self, other: &Self) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    fn cross(&self, other: &Self) -> [f64; 3] {
        [
            self.y * other.z - self.z * other.y,
            self.z * other.x - self.x * other.z,
            self.x * other.y - self.y * other.x,
        ]
    }

    /// Great-circle distance in radians.
    pub fn geodesic(&self, other: &Self) -> f64 {
        let c = self.cross(other);
        let s = (c[0] * c[0] + c[1] * c[1] + c[2] * c[2]).sqrt();
        s.atan2(self.dot(other))
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn colatitude(&self) -> f64 {
        self.z.clamp(-1.0, 1.0).acos()
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.x, self.y, self.z]
    }
}

/// An ordered, nonempty collection of unit points.
#[derive(Debug, Clone, PartialEq)]
pub struct PointSet {
    points: Vec<UnitPoint>,
    design_degree: Option<u32>,
    label: String,
}

impl PointSet {
    pub fn new(points: Vec<UnitPoint>, label: impl Into<String>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidArgument("point set must be nonempty".into()));
        }
        Ok(Self {
            points,
            design_degree: None,
            label: label.into(),
        })
    }

    /// Attaches a design degree. Callers are expected to have verified it
    /// (see [`crate::legendre::verify_design`]).
    pub fn with_design_degree(mut self, t: u32) -> Self {
        self.design_degree = Some(t);
        self
    }

    pub fn points(&self) -> &[UnitPoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn iter(&self) -> std::slice::Iter<'_, UnitPoint> {
        self.points.iter()
    }

    pub fn design_degree(&self) -> Option<u32> {
        self.design_degree
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Subset by index, keeping the given order. The design degree is dropped.
    pub fn select(&self, indices: &[usize], label: impl Into<String>) -> Result<Self> {
        let mut out = Vec::with_capacity(indices.len());
        for &i in indices {
            let p = self.points.get(i).ok_or_else(|| {
                Error::InvalidArgument(format!("index {i} out of range for {} points", self.len()))
            })?;
            out.push(*p);
        }
        PointSet::new(out, label)
    }

    /// Concatenation of two sets. The design degree is kept only if both
    /// carry one (the minimum of the two).
    pub fn concat(&self, other: &PointSet) -> PointSet {
        let mut points = self.points.clone();
        points.extend_from_slice(&other.points);
        PointSet {
            points,
            design_degree: match (self.design_degree, other.design_degree) {
                (Some(a), Some(b)) => Some(a.min(b)),
                _ => None,
            },
            label: format!("{}+{}", self.label, other.label),
        }
    }
}

impl<'a> IntoIterator for &'a PointSet {
    type Item = &'a UnitPoint;
    type IntoIter = std::slice::Iter<'a, UnitPoint>;

    fn into_iter(self) -> Self::IntoIter {
        self.points.iter()
    }
}

/// Parses point-file text: one `x y z` triple per line, `#` comments and
/// blank lines ignored.
pub fn parse_points(text: &str, origin: &Path) -> Result<PointSet> {
    let mut points = Vec::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let err = |msg: String| Error::Parse {
            path: origin.to_path_buf(),
            line: lineno + 1,
            msg,
        };
        let fields: Vec<&str> = line.split_whitespace().collect();
        if fields.len() != 3 {
            return Err(err(format!("expected 3 fields, found {}", fields.len())));
        }
        let mut c = [0.0; 3];
        for (slot, f) in c.iter_mut().zip(&fields) {
            *slot = f
                .parse::<f64>()
                .map_err(|e| err(format!("bad number {f:?}: {e}")))?;
            if !slot.is_finite() {
                return Err(err(format!("non-finite coordinate {f:?}")));
            }
        }
        let norm = (c[0] * c[0] + c[1] * c[1] + c[2] * c[2]).sqrt();
        if (norm - 1.0).abs() > LOAD_NORM_TOLERANCE {
            return Err(err(format!("point norm {norm} is not 1")));
        }
        points.push(UnitPoint::new(c[0], c[1], c[2]).expect("nonzero norm"));
    }
    if points.is_empty() {
        return Err(Error::EmptyFile {
            path: origin.to_path_buf(),
        });
    }
    PointSet::new(points, origin.display().to_string())
}

pub fn load_point_file(path: impl AsRef<Path>) -> Result<PointSet> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_points(&text, path)
}

/// Renders a point set in the point-file format (17 significant digits).
pub fn format_points(set: &PointSet) -> String {
    let mut out = String::with_capacity(set.len() * 72);
    for p in set {
        let _ = writeln!(out, "{:.16e} {:.16e} {:.16e}", p.x, p.y, p.z);
    }
    out
}

pub fn write_point_file(set: &PointSet, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    fs::write(path, format_points(set)).map_err(|e| Error::io(path, e))
}

/// Generalized spiral points (Rakhmanov–Saff–Zhou, constant 3.6).
///
/// Heights run from the south pole to the north pole; both poles are
/// included.
pub fn generate_spiral(n: usize) -> Result<PointSet> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!(
            "spiral needs at least 2 points, got {n}"
        )));
    }
    let nf = n as f64;
    let mut points = Vec::with_capacity(n);
    let mut phi = 0.0_f64;
    for i in 0..n {
        let h = -1.0 + 2.0 * i as f64 / (nf - 1.0);
        let r = (1.0 - h * h).max(0.0).sqrt();
        if i == 0 || i == n - 1 {
            phi = 0.0;
        } else {
            phi = (phi + 3.6 / (nf * (1.0 - h * h)).sqrt()).rem_euclid(TAU);
        }
        points.push(UnitPoint {
            x: r * phi.cos(),
            y: r * phi.sin(),
            z: h,
        });
    }
    PointSet::new(points, format!("spiral({n})"))
}

/// Zone structure of the recursive zonal equal-area partition of S².
///
/// `colatitudes` has one entry per zone boundary (starting at 0, ending at
/// π); zone `i` lies between `colatitudes[i]` and `colatitudes[i + 1]` and
/// holds `regions[i]` cells. `offsets[i]` is the azimuthal rotation of the
/// zone's cells as a fraction of a full turn.
#[derive(Debug, Clone, PartialEq)]
pub struct EqPartition {
    pub colatitudes: Vec<f64>,
    pub regions: Vec<usize>,
    pub offsets: Vec<f64>,
}

fn cap_colatitude(area: f64) -> f64 {
    2.0 * (area / (4.0 * PI)).sqrt().min(1.0).asin()
}

fn cap_area(colatitude: f64) -> f64 {
    let s = (colatitude / 2.0).sin();
    4.0 * PI * s * s
}

fn gcd(mut a: usize, mut b: usize) -> usize {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

impl EqPartition {
    pub fn new(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidArgument("partition needs n >= 1".into()));
        }
        if n == 1 {
            return Ok(Self {
                colatitudes: vec![0.0, PI],
                regions: vec![1],
                offsets: vec![0.0],
            });
        }
        let region_area = 4.0 * PI / n as f64;
        let polar = cap_colatitude(region_area);
        let ideal_angle = region_area.sqrt();
        let n_collars = if n > 2 {
            (((PI - 2.0 * polar) / ideal_angle).round() as usize).max(1)
        } else {
            0
        };

        let mut regions = Vec::with_capacity(n_collars + 2);
        regions.push(1);
        if n_collars > 0 {
            let fitting = (PI - 2.0 * polar) / n_collars as f64;
            let mut carry = 0.0;
            for i in 0..n_collars {
                let top = polar + i as f64 * fitting;
                let ideal = (cap_area(top + fitting) - cap_area(top)) / region_area;
                let count = (ideal + carry).round();
                carry += ideal - count;
                regions.push(count as usize);
            }
        }
        regions.push(1);

        let mut colatitudes = Vec::with_capacity(regions.len() + 1);
        colatitudes.push(0.0);
        let mut subtotal = 0usize;
        for &r in &regions[..regions.len() - 1] {
            subtotal += r;
            colatitudes.push(cap_colatitude(subtotal as f64 * region_area));
        }
        colatitudes.push(PI);

        // Successive collars are twisted against each other, as in the
        // reference EQ point-set construction.
        let mut offsets = vec![0.0; regions.len()];
        let mut offset = 0.0_f64;
        for zone in 1..regions.len().saturating_sub(1) {
            offsets[zone] = offset;
            let top = regions[zone];
            let bot = regions[zone + 1];
            offset += (1.0 / bot as f64 - 1.0 / top as f64) / 2.0
                + gcd(top, bot) as f64 / (2.0 * top as f64 * bot as f64);
            offset -= offset.floor();
        }
        Ok(Self {
            colatitudes,
            regions,
            offsets,
        })
    }

    pub fn zone_count(&self) -> usize {
        self.regions.len()
    }

    /// Index of the cell containing `p`, numbered zone by zone from the
    /// north pole.
    pub fn locate(&self, p: &UnitPoint) -> usize {
        let theta = p.colatitude();
        let zones = self.regions.len();
        let mut zone = zones - 1;
        for z in 0..zones {
            if theta < self.colatitudes[z + 1] {
                zone = z;
                break;
            }
        }
        let before: usize = self.regions[..zone].iter().sum();
        let count = self.regions[zone];
        if count == 1 {
            return before;
        }
        let phi = p.y.atan2(p.x).rem_euclid(TAU);
        let frac = (phi / TAU - self.offsets[zone]).rem_euclid(1.0);
        before + ((frac * count as f64) as usize).min(count - 1)
    }

    /// Cell centers: the poles for the caps, and the midpoint in colatitude
    /// and azimuth for each collar cell.
    pub fn centers(&self) -> Vec<UnitPoint> {
        let zones = self.regions.len();
        let mut out = Vec::with_capacity(self.regions.iter().sum());
        for zone in 0..zones {
            let count = self.regions[zone];
            if zone == 0 {
                out.push(UnitPoint::north_pole());
                continue;
            }
            if zone == zones - 1 {
                out.push(UnitPoint::south_pole());
                continue;
            }
            let theta = 0.5 * (self.colatitudes[zone] + self.colatitudes[zone + 1]);
            for j in 0..count {
                let phi = ((j as f64 + 0.5) / count as f64 + self.offsets[zone]).rem_euclid(1.0)
                    * TAU;
                out.push(UnitPoint::from_spherical(theta, phi));
            }
        }
        out
    }
}

/// Centers of the `n` cells of the recursive zonal equal-area partition.
pub fn eq_area_centers(n: usize) -> Result<PointSet> {
    let partition = EqPartition::new(n)?;
    PointSet::new(partition.centers(), format!("eq-centers({n})"))
}

/// Exact nearest-neighbour queries by geodesic distance. Points are sorted
/// by colatitude and the search stops once the colatitude gap alone exceeds
/// the best distance found.
struct ColatitudeIndex {
    sorted: Vec<(f64, UnitPoint)>,
}

impl ColatitudeIndex {
    fn new(set: &PointSet) -> Self {
        let mut sorted: Vec<(f64, UnitPoint)> =
            set.iter().map(|p| (p.colatitude(), *p)).collect();
        sorted.sort_by(|a, b| a.0.total_cmp(&b.0));
        Self { sorted }
    }

    fn nearest_distance(&self, q: &UnitPoint) -> f64 {
        let tq = q.colatitude();
        let start = self.sorted.partition_point(|(t, _)| *t < tq);
        let mut best = f64::INFINITY;
        let mut up = start;
        let mut down = start;
        loop {
            let mut progressed = false;
            if up < self.sorted.len() {
                let (t, p) = &self.sorted[up];
                if t - tq <= best {
                    best = best.min(q.geodesic(p));
                    up += 1;
                    progressed = true;
                }
            }
            if down > 0 {
                let (t, p) = &self.sorted[down - 1];
                if tq - t <= best {
                    best = best.min(q.geodesic(p));
                    down -= 1;
                    progressed = true;
                }
            }
            if !progressed {
                return best;
            }
        }
    }
}

fn tangent_basis(p: &UnitPoint) -> ([f64; 3], [f64; 3]) {
    let helper = if p.z.abs() < 0.9 {
        UnitPoint::north_pole()
    } else {
        UnitPoint {
            x: 1.0,
            y: 0.0,
            z: 0.0,
        }
    };
    let e1 = p.cross(&helper);
    let n1 = (e1[0] * e1[0] + e1[1] * e1[1] + e1[2] * e1[2]).sqrt();
    let e1 = [e1[0] / n1, e1[1] / n1, e1[2] / n1];
    let e1p = UnitPoint {
        x: e1[0],
        y: e1[1],
        z: e1[2],
    };
    let e2 = p.cross(&e1p);
    (e1, e2)
}

fn move_along(p: &UnitPoint, dir: [f64; 3], angle: f64) -> UnitPoint {
    let (s, c) = angle.sin_cos();
    UnitPoint::new(
        c * p.x + s * dir[0],
        c * p.y + s * dir[1],
        c * p.z + s * dir[2],
    )
    .expect("rotation of a unit vector")
}

/// Pattern search for a local maximum of the nearest-point distance.
fn climb(index: &ColatitudeIndex, start: UnitPoint, step: f64) -> f64 {
    let mut p = start;
    let mut best = index.nearest_distance(&p);
    let mut step = step;
    let mut moves = 0;
    // Near ridges of the distance function tiny gains can continue for a
    // long time; demand a real improvement and cap the walk.
    while step > 1e-10 && moves < 5_000 {
        moves += 1;
        let (e1, e2) = tangent_basis(&p);
        let mut improved = false;
        for k in 0..8 {
            let a = k as f64 * PI / 4.0;
            let (s, c) = a.sin_cos();
            let dir = [
                c * e1[0] + s * e2[0],
                c * e1[1] + s * e2[1],
                c * e1[2] + s * e2[2],
            ];
            let q = move_along(&p, dir, step);
            let d = index.nearest_distance(&q);
            if d > best + 1e-14 {
                best = d;
                p = q;
                improved = true;
                break;
            }
        }
        if !improved {
            step *= 0.5;
        }
    }
    best
}

/// Number of grid maxima refined by local search in [`mesh_norm`].
const MESH_REFINE_CANDIDATES: usize = 32;

/// Covering radius (mesh norm) in radians, approximated by maximizing the
/// nearest-point distance over a spiral grid of `100·|set|` points and
/// refining the best grid points by local search.
pub fn mesh_norm(set: &PointSet) -> f64 {
    let index = ColatitudeIndex::new(set);
    let grid_size = (100 * set.len()).max(100);
    let grid = generate_spiral(grid_size).expect("grid size >= 2");
    let mut scored: Vec<(f64, UnitPoint)> = grid
        .points()
        .par_iter()
        .map(|q| (index.nearest_distance(q), *q))
        .collect();
    scored.sort_by(|a, b| b.0.total_cmp(&a.0));
    let spacing = (4.0 * PI / grid_size as f64).sqrt();
    scored
        .iter()
        .take(MESH_REFINE_CANDIDATES)
        .map(|(_, q)| climb(&index, *q, spacing))
        .fold(scored[0].0, f64::max)
}

/// Half the minimum pairwise geodesic distance.
pub fn separation_radius(set: &PointSet) -> Result<f64> {
    if set.len() < 2 {
        return Err(Error::InvalidArgument(
            "separation radius needs at least 2 points".into(),
        ));
    }
    let pts = set.points();
    let min = (0..pts.len())
        .into_par_iter()
        .map(|i| {
            pts[i + 1..]
                .iter()
                .map(|q| pts[i].geodesic(q))
                .fold(f64::INFINITY, f64::min)
        })
        .reduce(|| f64::INFINITY, f64::min);
    Ok(0.5 * min)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pair() -> PointSet {
        PointSet::new(
            vec![UnitPoint::north_pole(), UnitPoint::south_pole()],
            "pair",
        )
        .unwrap()
    }

    #[test]
    fn parses_antipodal_pair_with_comments() {
        let text = "# two poles\n0 0 1\n\n0 0 -1\n";
        let set = parse_points(text, Path::new("mem")).unwrap();
        assert_eq!(set.len(), 2);
        assert_eq!(set.points()[0], UnitPoint::north_pole());
        assert_eq!(set.points()[1], UnitPoint::south_pole());
        assert_eq!(set.design_degree(), None);
    }

    #[test]
    fn renormalizes_within_tolerance() {
        let set = parse_points("0 0 1.0000005\n", Path::new("mem")).unwrap();
        assert!((set.points()[0].norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn rejects_bad_lines() {
        let p = Path::new("mem");
        assert!(matches!(
            parse_points("0 0\n", p),
            Err(Error::Parse { line: 1, .. })
        ));
        assert!(matches!(
            parse_points("0 0 1\n0 x 1\n", p),
            Err(Error::Parse { line: 2, .. })
        ));
        assert!(matches!(
            parse_points("0 0 1.01\n", p),
            Err(Error::Parse { .. })
        ));
        assert!(matches!(
            parse_points("# nothing\n\n", p),
            Err(Error::EmptyFile { .. })
        ));
    }

    #[test]
    fn spiral_endpoints() {
        let s = generate_spiral(2).unwrap();
        assert_eq!(s.points()[0], UnitPoint::south_pole());
        assert_eq!(s.points()[1], UnitPoint::north_pole());
        assert!(generate_spiral(1).is_err());
        assert!(generate_spiral(0).is_err());
    }

    #[test]
    fn spiral_is_unit_and_deterministic() {
        let a = generate_spiral(10_000).unwrap();
        let b = generate_spiral(10_000).unwrap();
        for (p, q) in a.iter().zip(&b) {
            assert!((p.norm() - 1.0).abs() < 1e-12);
            assert_eq!(p.x.to_bits(), q.x.to_bits());
            assert_eq!(p.y.to_bits(), q.y.to_bits());
            assert_eq!(p.z.to_bits(), q.z.to_bits());
        }
    }

    #[test]
    fn eq_centers_small_cases() {
        let one = eq_area_centers(1).unwrap();
        assert_eq!(one.points(), &[UnitPoint::north_pole()]);
        let two = eq_area_centers(2).unwrap();
        assert_eq!(
            two.points(),
            &[UnitPoint::north_pole(), UnitPoint::south_pole()]
        );
        assert!(eq_area_centers(0).is_err());
    }

    #[test]
    fn eq_partition_counts_sum_to_n() {
        for n in 1..200 {
            let p = EqPartition::new(n).unwrap();
            assert_eq!(p.regions.iter().sum::<usize>(), n, "n={n}");
            assert_eq!(p.centers().len(), n);
            assert_eq!(p.colatitudes.len(), p.regions.len() + 1);
        }
    }

    #[test]
    fn eq_centers_fall_in_their_own_cell() {
        for n in [3, 7, 20, 33, 100] {
            let p = EqPartition::new(n).unwrap();
            for (i, c) in p.centers().iter().enumerate() {
                assert_eq!(p.locate(c), i, "n={n}");
            }
        }
    }

    #[test]
    fn separation_examples() {
        assert!((separation_radius(&pair()).unwrap() - PI / 2.0).abs() < 1e-15);
        let orth = PointSet::new(
            vec![UnitPoint::north_pole(), UnitPoint::new(1.0, 0.0, 0.0).unwrap()],
            "orth",
        )
        .unwrap();
        assert!((separation_radius(&orth).unwrap() - PI / 4.0).abs() < 1e-15);
        let dup = PointSet::new(
            vec![UnitPoint::north_pole(), UnitPoint::north_pole()],
            "dup",
        )
        .unwrap();
        assert_eq!(separation_radius(&dup).unwrap(), 0.0);
        let single = PointSet::new(vec![UnitPoint::north_pole()], "one").unwrap();
        assert!(separation_radius(&single).is_err());
    }

    #[test]
    fn mesh_norm_examples() {
        let single = PointSet::new(vec![UnitPoint::north_pole()], "one").unwrap();
        assert!((mesh_norm(&single) - PI).abs() < 1e-9);
        assert!((mesh_norm(&pair()) - PI / 2.0).abs() < 1e-6);
    }

    #[test]
    fn spiral_100_geometry() {
        let s = generate_spiral(100).unwrap();
        let q = separation_radius(&s).unwrap();
        let h = mesh_norm(&s);
        assert!(q > 0.0);
        assert!(h < 0.5, "mesh norm {h}");
        assert!(q <= h);
    }

    #[test]
    fn colatitude_index_matches_brute_force() {
        let set = generate_spiral(257).unwrap();
        let index = ColatitudeIndex::new(&set);
        let queries = generate_spiral(1001).unwrap();
        for q in &queries {
            let brute = set
                .iter()
                .map(|p| q.geodesic(p))
                .fold(f64::INFINITY, f64::min);
            assert_eq!(index.nearest_distance(q), brute);
        }
    }
}
