//! Brute-force Betti numbers for checking the reduction engine.
//!
//! Nothing here touches the filtration builder or the reducer: cliques are
//! enumerated directly from the distance matrix and ranks come from plain
//! Gaussian elimination on dense boundary matrices over Z/2. Meant for clouds
//! of a handful of points.

use alloc::collections::BTreeMap;
use alloc::vec::Vec;

use crate::persistence::PersistenceDiagram;
use crate::pointcloud::DistanceMatrix;
use crate::{Error, Result};

/// Piecewise-constant Betti number as a function of scale.
///
/// `values[i]` holds on `[breakpoints[i], breakpoints[i + 1])`; the curve is
/// zero before the first breakpoint.
#[derive(Debug, Clone, PartialEq)]
pub struct BettiCurve {
    /// Homology degree.
    pub degree: usize,
    /// Sorted distinct scales where the value may change.
    pub breakpoints: Vec<f64>,
    /// Value from each breakpoint up to the next.
    pub values: Vec<usize>,
}

impl BettiCurve {
    /// Betti number at scale `t`.
    pub fn value_at(&self, t: f64) -> usize {
        let i = self.breakpoints.partition_point(|&b| b <= t);
        if i == 0 {
            0
        } else {
            self.values[i - 1]
        }
    }
}

/// Betti curve read off a diagram: at `t`, the number of degree-`k` features
/// with `birth <= t < death`.
pub fn betti_curve_from_diagram(diag: &PersistenceDiagram, degree: usize) -> BettiCurve {
    let features: Vec<_> = diag.of_dimension(degree).collect();
    let mut breakpoints: Vec<f64> = features
        .iter()
        .flat_map(|f| [f.birth, f.death])
        .filter(|x| x.is_finite())
        .collect();
    breakpoints.sort_by(f64::total_cmp);
    breakpoints.dedup();
    let values = breakpoints
        .iter()
        .map(|&t| features.iter().filter(|f| f.birth <= t && t < f.death).count())
        .collect();
    BettiCurve { degree, breakpoints, values }
}

/// Simplices (as vertex lists) of the Rips complex at scale `t`, by size.
fn cliques(dm: &DistanceMatrix, t: f64, max_size: usize) -> Vec<Vec<Vec<usize>>> {
    let mut by_size: Vec<Vec<Vec<usize>>> = alloc::vec![Vec::new(); max_size + 1];
    fn grow(
        dm: &DistanceMatrix,
        t: f64,
        max_size: usize,
        current: &mut Vec<usize>,
        by_size: &mut Vec<Vec<Vec<usize>>>,
    ) {
        let start = current.last().map_or(0, |&v| v + 1);
        for v in start..dm.n() {
            if current.iter().all(|&u| dm.get(u, v) <= t) {
                current.push(v);
                by_size[current.len()].push(current.clone());
                if current.len() < max_size {
                    grow(dm, t, max_size, current, by_size);
                }
                current.pop();
            }
        }
    }
    grow(dm, t, max_size, &mut Vec::new(), &mut by_size);
    by_size
}

/// Rank over Z/2 of a dense 0/1 matrix given as rows.
fn rank_gf2(mut rows: Vec<Vec<bool>>) -> usize {
    let cols = rows.first().map_or(0, Vec::len);
    let mut rank = 0;
    for c in 0..cols {
        let Some(p) = (rank..rows.len()).find(|&r| rows[r][c]) else {
            continue;
        };
        rows.swap(rank, p);
        let pivot = rows[rank].clone();
        for r in 0..rows.len() {
            if r != rank && rows[r][c] {
                for (x, &y) in rows[r].iter_mut().zip(&pivot) {
                    *x ^= y;
                }
            }
        }
        rank += 1;
    }
    rank
}

/// Rank of the boundary map from `size`-vertex simplices to `(size-1)`-vertex ones.
fn boundary_rank(simplices: &[Vec<Vec<usize>>], size: usize) -> usize {
    if size < 2 || size >= simplices.len() || simplices[size].is_empty() {
        return 0;
    }
    let faces: BTreeMap<&[usize], usize> =
        simplices[size - 1].iter().enumerate().map(|(i, s)| (s.as_slice(), i)).collect();
    let rows: Vec<Vec<bool>> = simplices[size]
        .iter()
        .map(|s| {
            let mut row = alloc::vec![false; faces.len()];
            for skip in 0..s.len() {
                let face: Vec<usize> = s.iter().enumerate().filter(|&(i, _)| i != skip).map(|(_, &v)| v).collect();
                row[faces[face.as_slice()]] = true;
            }
            row
        })
        .collect();
    rank_gf2(rows)
}

/// `β_k` of the Rips complex at scale `t`: `dim ker ∂_k − rank ∂_{k+1}`.
///
/// `max_dim` is the simplex dimension the caller's filtration goes up to; it
/// must be at least `k + 1`.
pub fn betti_at(dm: &DistanceMatrix, t: f64, degree: usize, max_dim: usize) -> Result<usize> {
    if max_dim < degree + 1 {
        return Err(Error::InvalidParameter(alloc::format!(
            "degree {degree} needs simplices of dimension {}, max_dim is {max_dim}",
            degree + 1
        )));
    }
    if !(t >= 0.0) {
        return Err(Error::InvalidParameter(alloc::format!("threshold must be nonnegative, got {t}")));
    }
    let size = degree + 1;
    let simplices = cliques(dm, t, size + 1);
    let chains = simplices[size].len();
    Ok(chains - boundary_rank(&simplices, size) - boundary_rank(&simplices, size + 1))
}
