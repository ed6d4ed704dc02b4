//! Chaos-game sampling of attractors, box counting, and checks that the
//! samples sit inside a given affine subspace.

use std::collections::HashSet;
use std::io::{self, Write};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, invalid, Error, Result};
use crate::invariant::{fixed_points, AffineIfs, AffineSubspace};
use crate::linalg::{RealVector, SubspaceBasis, Tolerance};
use crate::{par, rng};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CloudMeta {
    pub iterations: usize,
    pub burn_in: usize,
    pub seed: u64,
    /// Bound on the distance from any emitted point to the attractor,
    /// `C * bound^burn_in * spread` from the contraction certificate, where
    /// `spread` is the largest distance between two fixed points. `None`
    /// when contraction was assumed rather than certified.
    pub error_bound: Option<f64>,
}

/// Points of `R^d` stored contiguously.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    dim: usize,
    coords: Vec<f64>,
    pub meta: CloudMeta,
}

impl PointCloud {
    /// Cloud from explicit points (meta records zero iterations).
    pub fn from_points(points: &[RealVector]) -> Result<Self> {
        let first = points.first().ok_or_else(|| invalid("a point cloud needs at least one point"))?;
        let dim = first.dim();
        let mut coords = Vec::with_capacity(points.len() * dim);
        for p in points {
            check_dim(dim, p.dim())?;
            coords.extend_from_slice(p.as_slice());
        }
        let meta = CloudMeta { iterations: points.len(), burn_in: 0, seed: 0, error_bound: None };
        Ok(PointCloud { dim, coords, meta })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.coords.len() / self.dim
    }

    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    pub fn points(&self) -> impl Iterator<Item = &[f64]> + '_ {
        self.coords.chunks(self.dim)
    }

    pub fn point(&self, i: usize) -> RealVector {
        RealVector::from_vec_unchecked(self.coords[i * self.dim..(i + 1) * self.dim].to_vec())
    }

    /// Coordinate-wise `(min, max)`.
    pub fn bounding_box(&self) -> (Vec<f64>, Vec<f64>) {
        let mut lo = vec![f64::INFINITY; self.dim];
        let mut hi = vec![f64::NEG_INFINITY; self.dim];
        for p in self.points() {
            for k in 0..self.dim {
                lo[k] = lo[k].min(p[k]);
                hi[k] = hi[k].max(p[k]);
            }
        }
        (lo, hi)
    }

    /// Appends the points of `other`; meta of `self` is kept with the
    /// iteration counts summed.
    pub fn extend(&mut self, other: &PointCloud) -> Result<()> {
        check_dim(self.dim, other.dim)?;
        self.coords.extend_from_slice(&other.coords);
        self.meta.iterations += other.meta.iterations;
        self.meta.burn_in += other.meta.burn_in;
        Ok(())
    }

    /// One point per line, comma separated, shortest round-trip decimals.
    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        let mut line = String::new();
        for p in self.points() {
            line.clear();
            for (k, x) in p.iter().enumerate() {
                if k > 0 {
                    line.push(',');
                }
                line.push_str(&x.to_string());
            }
            line.push('\n');
            out.write_all(line.as_bytes())?;
        }
        Ok(())
    }

    /// Binary PGM (P5, maxval 255) of the projection onto axes `(i, j)`:
    /// occupied cells are 0, empty cells 255. Axis `i` runs left to right,
    /// axis `j` bottom to top, over the projection's bounding box.
    pub fn to_pgm(&self, axis_x: usize, axis_y: usize, width: usize, height: usize) -> Result<Vec<u8>> {
        if axis_x >= self.dim || axis_y >= self.dim || axis_x == axis_y {
            return Err(invalid(format!(
                "projection axes must be distinct and below {}, got ({axis_x}, {axis_y})",
                self.dim
            )));
        }
        if width == 0 || height == 0 {
            return Err(invalid("raster must have positive size"));
        }
        let (lo, hi) = self.bounding_box();
        let mut raster = vec![255u8; width * height];
        let cell = |x: f64, lo: f64, hi: f64, n: usize| -> usize {
            let ext = hi - lo;
            if ext <= 0.0 {
                return 0;
            }
            (((x - lo) / ext * n as f64).floor() as usize).min(n - 1)
        };
        for p in self.points() {
            let cx = cell(p[axis_x], lo[axis_x], hi[axis_x], width);
            let cy = cell(p[axis_y], lo[axis_y], hi[axis_y], height);
            raster[(height - 1 - cy) * width + cx] = 0;
        }
        let mut out = format!("P5\n{width} {height}\n255\n").into_bytes();
        out.extend_from_slice(&raster);
        Ok(out)
    }
}

/// Samples the attractor by random iteration.
///
/// Starts at the fixed point of the first map, applies a uniformly chosen
/// map at every step (SplitMix64 seeded with `seed`) and emits every point
/// after the first `burn_in`.
pub fn chaos_game(ifs: &AffineIfs, iterations: usize, burn_in: usize, seed: u64, tol: &Tolerance) -> Result<PointCloud> {
    ifs.require_contraction()?;
    if iterations <= burn_in {
        return Err(invalid(format!("iterations ({iterations}) must exceed burn-in ({burn_in})")));
    }
    let fixed = fixed_points(ifs, tol)?;
    let d = ifs.dim();
    let n = ifs.n_maps();
    let mats: Vec<&[f64]> = ifs.maps().iter().map(|m| m.linear.as_slice()).collect();
    let trans: Vec<&[f64]> = ifs.maps().iter().map(|m| m.translation.as_slice()).collect();

    let mut r = rng::seeded(seed);
    let mut x = fixed[0].as_slice().to_vec();
    let mut y = vec![0.0; d];
    let mut coords = Vec::with_capacity((iterations - burn_in) * d);
    for step in 0..iterations {
        let i = r.gen_range(0..n);
        for (row, yk) in y.iter_mut().enumerate() {
            let a = &mats[i][row * d..(row + 1) * d];
            *yk = a.iter().zip(&x).map(|(p, q)| p * q).sum::<f64>() + trans[i][row];
        }
        std::mem::swap(&mut x, &mut y);
        if step >= burn_in {
            coords.extend_from_slice(&x);
        }
    }

    let error_bound = ifs.certificate().map(|c| {
        let mut spread: f64 = 0.0;
        for a in &fixed {
            for b in &fixed {
                spread = spread.max((a - b).norm());
            }
        }
        c.constant * c.bound.powi(burn_in.min(i32::MAX as usize) as i32) * spread
    });
    Ok(PointCloud { dim: d, coords, meta: CloudMeta { iterations, burn_in, seed, error_bound } })
}

/// Independent chaos games, one per seed, concatenated in seed order.
pub fn chaos_game_many(
    ifs: &AffineIfs,
    iterations: usize,
    burn_in: usize,
    seeds: &[u64],
    tol: &Tolerance,
) -> Result<PointCloud> {
    if seeds.is_empty() {
        return Err(invalid("at least one seed is required"));
    }
    let clouds = par::try_map_indexed(seeds.len(), |i| chaos_game(ifs, iterations, burn_in, seeds[i], tol))?;
    let mut it = clouds.into_iter();
    let mut acc = it.next().expect("non-empty");
    for c in it {
        acc.extend(&c)?;
    }
    Ok(acc)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoxCountWarning {
    /// All points coincide; the slope is reported as 0.
    DegenerateCloud,
    /// At the finest scale the occupied boxes are not much fewer than the
    /// points, so counts are limited by sampling rather than geometry.
    Saturated,
}

/// Least-squares fit of `log2(count)` against level `k` for boxes of side
/// `2^-k`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoxCountEstimate {
    pub levels: Vec<i32>,
    pub scales: Vec<f64>,
    pub counts: Vec<usize>,
    pub slope: f64,
    pub r2: f64,
    pub warnings: Vec<BoxCountWarning>,
}

/// Ratio of points to occupied boxes below which a level counts as
/// saturated.
const SATURATION_RATIO: usize = 16;

fn count_boxes(cloud: &PointCloud, origin: &[f64], level: i32) -> usize {
    let inv_side = 2f64.powi(level);
    let mut seen: HashSet<Vec<i64>> = HashSet::new();
    for p in cloud.points() {
        let key: Vec<i64> = p.iter().zip(origin).map(|(x, o)| ((x - o) * inv_side).floor() as i64).collect();
        seen.insert(key);
    }
    seen.len()
}

/// Counts occupied boxes of side `2^-k` for `k = k_min..=k_max` on a grid
/// anchored at the bounding-box minimum corner.
pub fn box_count_dim(cloud: &PointCloud, k_min: i32, k_max: i32) -> Result<BoxCountEstimate> {
    if cloud.is_empty() {
        return Err(invalid("cannot box-count an empty cloud"));
    }
    if k_max <= k_min {
        return Err(invalid(format!("need k_max > k_min, got {k_min}..{k_max}")));
    }
    let (lo, hi) = cloud.bounding_box();
    let levels: Vec<i32> = (k_min..=k_max).collect();
    let scales: Vec<f64> = levels.iter().map(|&k| 2f64.powi(-k)).collect();
    let degenerate = lo.iter().zip(&hi).all(|(a, b)| a == b);
    if degenerate {
        return Ok(BoxCountEstimate {
            counts: vec![1; levels.len()],
            levels,
            scales,
            slope: 0.0,
            r2: 1.0,
            warnings: vec![BoxCountWarning::DegenerateCloud],
        });
    }
    let counts = par::map_indexed(levels.len(), |i| count_boxes(cloud, &lo, levels[i]));
    let (slope, r2) = fit_line(
        &levels.iter().map(|&k| k as f64).collect::<Vec<_>>(),
        &counts.iter().map(|&c| (c as f64).log2()).collect::<Vec<_>>(),
    );
    let mut warnings = Vec::new();
    if counts.last().is_some_and(|&c| c * SATURATION_RATIO > cloud.len()) {
        warnings.push(BoxCountWarning::Saturated);
    }
    Ok(BoxCountEstimate { levels, scales, counts, slope, r2, warnings })
}

/// Picks the fit range from the cloud: start four boxes per extent, stop at
/// the last level where boxes average at least 16 points.
pub fn box_count_auto(cloud: &PointCloud) -> Result<BoxCountEstimate> {
    if cloud.is_empty() {
        return Err(invalid("cannot box-count an empty cloud"));
    }
    let (lo, hi) = cloud.bounding_box();
    let extent = lo.iter().zip(&hi).map(|(a, b)| b - a).fold(0.0, f64::max);
    if extent == 0.0 {
        return box_count_dim(cloud, 0, 1);
    }
    let k_min = (-extent.log2()).ceil() as i32 + 2;
    let mut k_max = k_min + 1;
    while k_max < k_min + 24 && count_boxes(cloud, &lo, k_max + 1) * SATURATION_RATIO <= cloud.len() {
        k_max += 1;
    }
    box_count_dim(cloud, k_min, k_max)
}

fn fit_line(x: &[f64], y: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxx: f64 = x.iter().map(|a| (a - mx) * (a - mx)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let syy: f64 = y.iter().map(|b| (b - my) * (b - my)).sum();
    let slope = sxy / sxx;
    let r2 = if syy == 0.0 { 1.0 } else { (sxy * sxy) / (sxx * syy) };
    (slope, r2)
}

/// Largest Euclidean distance from a cloud point to `x`.
pub fn max_distance_to_affine(cloud: &PointCloud, x: &AffineSubspace) -> Result<f64> {
    check_dim(x.ambient_dim(), cloud.dim())?;
    let dists = par::map_indexed(cloud.len(), |i| {
        let p = cloud.point(i);
        x.distance(&p).unwrap_or(f64::INFINITY)
    });
    Ok(dists.into_iter().fold(0.0, f64::max))
}

/// Dimension of the affine hull: rank of `{p - p_0}` under the relative
/// rule of [`SubspaceBasis::span`].
pub fn affine_hull_dim(cloud: &PointCloud, tol: &Tolerance) -> Result<usize> {
    affine_hull(cloud, tol).map(|b| b.rank())
}

pub fn affine_hull(cloud: &PointCloud, tol: &Tolerance) -> Result<SubspaceBasis> {
    if cloud.is_empty() {
        return Err(invalid("empty cloud"));
    }
    let p0: Vec<f64> = cloud.points().next().expect("non-empty").to_vec();
    let diff = |p: &[f64]| -> Vec<f64> { p.iter().zip(&p0).map(|(a, b)| a - b).collect() };
    let scale = cloud.points().map(|p| crate::linalg::slice_norm(&diff(p))).fold(0.0, f64::max);
    let mut basis = SubspaceBasis::empty(cloud.dim(), tol)?;
    for p in cloud.points() {
        if basis.is_full() {
            break;
        }
        basis.push_raw(&diff(p), scale);
    }
    Ok(basis)
}

impl From<io::Error> for Error {
    fn from(e: io::Error) -> Self {
        Error::InvalidInput(format!("i/o: {e}"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::invariant::AffineMap;
    use crate::linalg::SquareMatrix;

    fn v(x: &[f64]) -> RealVector {
        RealVector::new(x.to_vec()).unwrap()
    }

    fn sierpinski() -> AffineIfs {
        let a = SquareMatrix::scalar(2, 0.5);
        let maps = [[0.0, 0.0], [0.5, 0.0], [0.0, 0.5]]
            .iter()
            .map(|t| AffineMap::new(a.clone(), v(t)).unwrap())
            .collect();
        AffineIfs::certified(maps, 2).unwrap()
    }

    #[test]
    fn single_map_cloud_is_its_fixed_point() {
        let ifs = AffineIfs::certified(
            vec![AffineMap::new(SquareMatrix::scalar(2, 0.5), v(&[1.0, -1.0])).unwrap()],
            2,
        )
        .unwrap();
        let c = chaos_game(&ifs, 100, 10, 3, &Tolerance::default()).unwrap();
        assert_eq!(c.len(), 90);
        for p in c.points() {
            assert!((p[0] - 2.0).abs() < 1e-14 && (p[1] + 2.0).abs() < 1e-14);
        }
    }

    #[test]
    fn refuses_without_certificate() {
        let ifs = AffineIfs::new(vec![AffineMap::new(SquareMatrix::scalar(1, 0.5), v(&[1.0])).unwrap()]).unwrap();
        assert!(matches!(chaos_game(&ifs, 10, 0, 0, &Tolerance::default()), Err(Error::Refused(_))));
        let ifs = ifs.assume_contracting();
        let c = chaos_game(&ifs, 10, 0, 0, &Tolerance::default()).unwrap();
        assert_eq!(c.meta.error_bound, None);
        assert!(chaos_game(&ifs, 5, 5, 0, &Tolerance::default()).is_err());
    }

    #[test]
    fn seeded_runs_are_identical() {
        let ifs = sierpinski();
        let a = chaos_game(&ifs, 2000, 10, 42, &Tolerance::default()).unwrap();
        let b = chaos_game(&ifs, 2000, 10, 42, &Tolerance::default()).unwrap();
        let c = chaos_game(&ifs, 2000, 10, 43, &Tolerance::default()).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.coords, c.coords);
    }

    #[test]
    fn sierpinski_stays_in_triangle() {
        let c = chaos_game(&sierpinski(), 20_000, 20, 1, &Tolerance::default()).unwrap();
        for p in c.points() {
            assert!(p[0] >= -1e-12 && p[1] >= -1e-12 && p[0] + p[1] <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn degenerate_cloud_box_count() {
        let c = PointCloud::from_points(&[v(&[1.0, 1.0]), v(&[1.0, 1.0])]).unwrap();
        let e = box_count_dim(&c, 0, 4).unwrap();
        assert_eq!(e.slope, 0.0);
        assert_eq!(e.warnings, vec![BoxCountWarning::DegenerateCloud]);
        assert!(box_count_dim(&c, 3, 3).is_err());
    }

    #[test]
    fn hull_of_collinear_points() {
        let pts: Vec<RealVector> = (0..20).map(|i| v(&[i as f64, 2.0 * i as f64, -1.0])).collect();
        let c = PointCloud::from_points(&pts).unwrap();
        assert_eq!(affine_hull_dim(&c, &Tolerance::default()).unwrap(), 1);
    }

    #[test]
    fn distance_to_subspace_of_points_inside_is_zero() {
        let tol = Tolerance::default();
        let dirs = SubspaceBasis::span(3, &[v(&[1.0, 1.0, 0.0])], &tol).unwrap();
        let x = AffineSubspace { base: v(&[0.0, 0.0, 2.0]), directions: dirs };
        let pts: Vec<RealVector> = (0..10).map(|i| v(&[i as f64 * 0.3, i as f64 * 0.3, 2.0])).collect();
        let c = PointCloud::from_points(&pts).unwrap();
        assert!(max_distance_to_affine(&c, &x).unwrap() < 1e-12);
    }

    #[test]
    fn csv_rows_round_trip() {
        let c = PointCloud::from_points(&[v(&[0.1, 1.0 / 3.0]), v(&[-2.5, 1e-300])]).unwrap();
        let mut buf = Vec::new();
        c.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        let back: Vec<f64> = text.lines().flat_map(|l| l.split(',').map(|x| x.parse::<f64>().unwrap())).collect();
        assert_eq!(back, c.coords);
    }

    #[test]
    fn pgm_header_and_axes() {
        let c = PointCloud::from_points(&[v(&[0.0, 0.0]), v(&[1.0, 1.0])]).unwrap();
        let img = c.to_pgm(0, 1, 4, 4).unwrap();
        assert!(img.starts_with(b"P5\n4 4\n255\n"));
        let body = &img[b"P5\n4 4\n255\n".len()..];
        assert_eq!(body.len(), 16);
        // (0,0) bottom-left, (1,1) top-right
        assert_eq!(body[12], 0);
        assert_eq!(body[3], 0);
        assert_eq!(body.iter().filter(|&&b| b == 0).count(), 2);
        assert!(c.to_pgm(0, 0, 4, 4).is_err());
        assert!(c.to_pgm(0, 2, 4, 4).is_err());
    }
}
