//! Point clouds, the synthetic samplers behind the circle and sphere figures,
//! and Euclidean distance matrices.
//!
//! # Random number generation
//!
//! Samplers are pure functions of their arguments. The generator is ChaCha8
//! ([`rand_chacha::ChaCha8Rng`]) seeded through `SeedableRng::seed_from_u64`,
//! whose output stream is fixed across platforms. Angles are drawn with
//! `gen_range(0.0..TAU)` and Gaussian variates with the ziggurat sampler of
//! [`rand_distr::StandardNormal`]. All transcendental functions go through
//! `libm`, so a given seed produces the same bits on every target.

use alloc::vec::Vec;
use core::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::{Error, Result};

/// Default radial noise for the noisy circle. Chosen by us, the figure it mimics
/// does not state one.
pub const DEFAULT_CIRCLE_NOISE_SD: f64 = 0.05;

/// A finite set of points in `ambient_dim`-dimensional Euclidean space.
///
/// Coordinates are stored row-major in one buffer; every coordinate is finite.
#[derive(Debug, Clone, PartialEq)]
pub struct PointCloud {
    ambient_dim: usize,
    coords: Vec<f64>,
}

impl PointCloud {
    /// Builds a cloud from a row-major coordinate buffer.
    pub fn new(ambient_dim: usize, coords: Vec<f64>) -> Result<Self> {
        if ambient_dim == 0 {
            return Err(Error::InvalidParameter("ambient dimension must be positive".into()));
        }
        if coords.len() % ambient_dim != 0 {
            return Err(Error::InvalidParameter(alloc::format!(
                "{} coordinates do not split into points of dimension {ambient_dim}",
                coords.len()
            )));
        }
        if let Some(pos) = coords.iter().position(|c| !c.is_finite()) {
            return Err(Error::InvalidParameter(alloc::format!(
                "point {} has a non-finite coordinate",
                pos / ambient_dim
            )));
        }
        Ok(PointCloud { ambient_dim, coords })
    }

    /// Builds a cloud from a sequence of points, each of which must have
    /// exactly `ambient_dim` coordinates.
    pub fn from_points<I, P>(ambient_dim: usize, points: I) -> Result<Self>
    where
        I: IntoIterator<Item = P>,
        P: AsRef<[f64]>,
    {
        let mut coords = Vec::new();
        for (i, p) in points.into_iter().enumerate() {
            let p = p.as_ref();
            if p.len() != ambient_dim {
                return Err(Error::InvalidParameter(alloc::format!(
                    "point {i} has {} coordinates, expected {ambient_dim}",
                    p.len()
                )));
            }
            coords.extend_from_slice(p);
        }
        Self::new(ambient_dim, coords)
    }

    /// A cloud with no points.
    pub fn empty(ambient_dim: usize) -> Result<Self> {
        Self::new(ambient_dim, Vec::new())
    }

    /// Number of coordinates per point.
    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    /// Number of points.
    pub fn len(&self) -> usize {
        self.coords.len() / self.ambient_dim
    }

    /// True when the cloud has no points.
    pub fn is_empty(&self) -> bool {
        self.coords.is_empty()
    }

    /// Coordinates of point `i`.
    ///
    /// Panics if `i >= self.len()`.
    pub fn point(&self, i: usize) -> &[f64] {
        &self.coords[i * self.ambient_dim..(i + 1) * self.ambient_dim]
    }

    /// Iterates over the points in order.
    pub fn points(&self) -> impl ExactSizeIterator<Item = &[f64]> + '_ {
        self.coords.chunks_exact(self.ambient_dim)
    }

    /// The row-major coordinate buffer.
    pub fn coords(&self) -> &[f64] {
        &self.coords
    }
}

fn check_radius(radius: f64) -> Result<()> {
    if radius.is_finite() && radius > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter(alloc::format!("radius must be positive, got {radius}")))
    }
}

/// Samples `n` points near the circle of the given radius in the plane.
///
/// Each angle is uniform on `[0, 2π)`; each radius is `radius + N(0, noise_sd²)`,
/// so the noise is purely radial.
pub fn sample_circle(n: usize, radius: f64, noise_sd: f64, seed: u64) -> Result<PointCloud> {
    check_radius(radius)?;
    if !(noise_sd.is_finite() && noise_sd >= 0.0) {
        return Err(Error::InvalidParameter(alloc::format!(
            "noise standard deviation must be nonnegative, got {noise_sd}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut coords = Vec::with_capacity(2 * n);
    for _ in 0..n {
        let theta: f64 = rng.gen_range(0.0..TAU);
        let z: f64 = rng.sample(StandardNormal);
        let r = radius + noise_sd * z;
        coords.push(r * libm::cos(theta));
        coords.push(r * libm::sin(theta));
    }
    PointCloud::new(2, coords)
}

/// Samples `n` points uniformly from the sphere of the given radius in 3-space,
/// by normalizing standard Gaussian vectors.
pub fn sample_sphere(n: usize, radius: f64, seed: u64) -> Result<PointCloud> {
    check_radius(radius)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut coords = Vec::with_capacity(3 * n);
    for _ in 0..n {
        let (x, y, z, norm) = loop {
            let x: f64 = rng.sample(StandardNormal);
            let y: f64 = rng.sample(StandardNormal);
            let z: f64 = rng.sample(StandardNormal);
            let norm = libm::sqrt(x * x + y * y + z * z);
            if norm > 0.0 {
                break (x, y, z, norm);
            }
        };
        let scale = radius / norm;
        coords.extend_from_slice(&[x * scale, y * scale, z * scale]);
    }
    PointCloud::new(3, coords)
}

/// Euclidean distance between two points of equal dimension.
pub fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    let sq: f64 = a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum();
    libm::sqrt(sq)
}

/// Symmetric matrix of pairwise distances with a zero diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    n: usize,
    data: Vec<f64>,
}

impl DistanceMatrix {
    /// Pairwise Euclidean distances of a cloud.
    pub fn from_cloud(cloud: &PointCloud) -> Self {
        let n = cloud.len();
        let mut data = alloc::vec![0.0; n * n];
        for i in 0..n {
            for j in (i + 1)..n {
                let d = euclidean(cloud.point(i), cloud.point(j));
                data[i * n + j] = d;
                data[j * n + i] = d;
            }
        }
        DistanceMatrix { n, data }
    }

    /// Wraps a full row-major `n × n` matrix after checking it is a valid
    /// distance matrix (zero diagonal, symmetric, finite, nonnegative).
    pub fn from_full(n: usize, data: Vec<f64>) -> Result<Self> {
        if data.len() != n * n {
            return Err(Error::InvalidParameter(alloc::format!(
                "expected {} entries for a {n}x{n} matrix, got {}",
                n * n,
                data.len()
            )));
        }
        for i in 0..n {
            if data[i * n + i] != 0.0 {
                return Err(Error::InvalidParameter(alloc::format!("diagonal entry {i} is nonzero")));
            }
            for j in 0..n {
                let d = data[i * n + j];
                if !(d.is_finite() && d >= 0.0) {
                    return Err(Error::InvalidParameter(alloc::format!(
                        "entry ({i}, {j}) = {d} is not a finite nonnegative distance"
                    )));
                }
                if d != data[j * n + i] {
                    return Err(Error::InvalidParameter(alloc::format!(
                        "entries ({i}, {j}) and ({j}, {i}) differ"
                    )));
                }
            }
        }
        Ok(DistanceMatrix { n, data })
    }

    /// Number of points.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Distance between points `i` and `j`. Panics when out of range.
    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        assert!(i < self.n && j < self.n, "index out of range");
        self.data[i * self.n + j]
    }

    /// Row `i` of the matrix.
    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    /// Largest entry, `0.0` for fewer than two points.
    pub fn max_entry(&self) -> f64 {
        self.data.iter().copied().fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn norm(p: &[f64]) -> f64 {
        libm::sqrt(p.iter().map(|x| x * x).sum())
    }

    #[test]
    fn empty_samples_keep_dimension() {
        let c = sample_circle(0, 1.0, 0.05, 7).unwrap();
        assert!(c.is_empty());
        assert_eq!(c.ambient_dim(), 2);
        let s = sample_sphere(0, 1.0, 1).unwrap();
        assert!(s.is_empty());
        assert_eq!(s.ambient_dim(), 3);
    }

    #[test]
    fn noiseless_circle_has_exact_radius() {
        let c = sample_circle(50, 1.0, 0.0, 3).unwrap();
        assert_eq!(c.len(), 50);
        for p in c.points() {
            assert!((norm(p) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn samplers_are_deterministic() {
        let a = sample_circle(100, 1.0, 0.05, 42).unwrap();
        let b = sample_circle(100, 1.0, 0.05, 42).unwrap();
        let bits = |c: &PointCloud| c.coords().iter().map(|x| x.to_bits()).collect::<Vec<_>>();
        assert_eq!(bits(&a), bits(&b));
        assert_ne!(a, sample_circle(100, 1.0, 0.05, 43).unwrap());
        assert_eq!(sample_sphere(30, 1.0, 9).unwrap(), sample_sphere(30, 1.0, 9).unwrap());
    }

    #[test]
    fn sphere_points_have_requested_norm() {
        for p in sample_sphere(100, 1.0, 1).unwrap().points() {
            assert!((norm(p) - 1.0).abs() < 1e-12);
        }
        for p in sample_sphere(10, 2.0, 5).unwrap().points() {
            assert!((norm(p) - 2.0).abs() < 1e-12);
        }
    }

    #[test]
    fn sphere_is_roughly_uniform() {
        let s = sample_sphere(10_000, 1.0, 11).unwrap();
        let mut mean = [0.0; 3];
        for p in s.points() {
            for k in 0..3 {
                mean[k] += p[k] / 10_000.0;
            }
        }
        assert!(norm(&mean) < 0.05, "mean {mean:?}");
    }

    #[test]
    fn bad_sampler_parameters() {
        assert!(matches!(sample_circle(5, 1.0, -0.1, 0), Err(Error::InvalidParameter(_))));
        assert!(matches!(sample_circle(5, 0.0, 0.1, 0), Err(Error::InvalidParameter(_))));
        assert!(matches!(sample_sphere(5, -1.0, 0), Err(Error::InvalidParameter(_))));
    }

    #[test]
    fn cloud_validation() {
        assert!(PointCloud::new(0, Vec::new()).is_err());
        assert!(PointCloud::new(2, alloc::vec![1.0, 2.0, 3.0]).is_err());
        assert!(PointCloud::new(2, alloc::vec![1.0, f64::NAN]).is_err());
        assert!(PointCloud::from_points(2, [[0.0, 0.0].as_slice(), [1.0, 0.0, 0.0].as_slice()]).is_err());
    }

    #[test]
    fn distance_examples() {
        let c = PointCloud::from_points(2, [[0.0, 0.0], [3.0, 4.0]]).unwrap();
        assert_eq!(DistanceMatrix::from_cloud(&c).get(0, 1), 5.0);

        let single = PointCloud::from_points(3, [[1.0, 2.0, 3.0]]).unwrap();
        let dm = DistanceMatrix::from_cloud(&single);
        assert_eq!(dm.n(), 1);
        assert_eq!(dm.get(0, 0), 0.0);

        let sq = PointCloud::from_points(2, [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]).unwrap();
        let dm = DistanceMatrix::from_cloud(&sq);
        for (i, j) in [(0, 1), (1, 2), (2, 3), (0, 3)] {
            assert_eq!(dm.get(i, j), 1.0);
        }
        for (i, j) in [(0, 2), (1, 3)] {
            assert!((dm.get(i, j) - core::f64::consts::SQRT_2).abs() < 1e-15);
        }
    }

    #[test]
    fn from_full_rejects_asymmetry() {
        assert!(DistanceMatrix::from_full(2, alloc::vec![0.0, 1.0, 1.0, 0.0]).is_ok());
        assert!(DistanceMatrix::from_full(2, alloc::vec![0.0, 1.0, 2.0, 0.0]).is_err());
        assert!(DistanceMatrix::from_full(2, alloc::vec![1.0, 1.0, 1.0, 0.0]).is_err());
        assert!(DistanceMatrix::from_full(2, alloc::vec![0.0, -1.0, -1.0, 0.0]).is_err());
    }

    proptest! {
        #[test]
        fn triangle_inequality(coords in proptest::collection::vec(-10.0f64..10.0, 3..=30)) {
            let dim = 3;
            let len = coords.len() / dim * dim;
            let cloud = PointCloud::new(dim, coords[..len].to_vec()).unwrap();
            let dm = DistanceMatrix::from_cloud(&cloud);
            let n = dm.n();
            for i in 0..n {
                for j in 0..n {
                    prop_assert_eq!(dm.get(i, j), dm.get(j, i));
                    for k in 0..n {
                        prop_assert!(dm.get(i, k) <= dm.get(i, j) + dm.get(j, k) + 1e-12);
                    }
                }
            }
        }
    }
}
