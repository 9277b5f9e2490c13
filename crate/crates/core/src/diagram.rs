//! The flat persistence diagram and diagram-level analytics.
//!
//! A flat point keeps a feature's birth on the horizontal axis and puts its
//! persistence, `death - birth`, on the vertical one. For `0 <= birth <= death`
//! the subtraction is exact enough that `birth + (death - birth) == death`
//! in IEEE-754 arithmetic, so the transform round-trips bit for bit.

use alloc::vec::Vec;

use crate::persistence::{PersistenceDiagram, PersistenceFeature};
use crate::{Error, Result};

/// A feature in flat coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FlatPoint {
    /// Homology degree.
    pub dimension: usize,
    /// Scale at which the feature appears.
    pub birth: f64,
    /// `death - birth`; infinite for essential features.
    pub persistence: f64,
}

impl FlatPoint {
    /// True for essential features.
    pub fn is_essential(&self) -> bool {
        self.persistence == f64::INFINITY
    }

    /// The conventional feature this point came from.
    pub fn to_feature(&self) -> PersistenceFeature {
        PersistenceFeature { dimension: self.dimension, birth: self.birth, death: self.birth + self.persistence }
    }
}

/// Maps every feature `(dim, birth, death)` to `(dim, birth, death - birth)`,
/// preserving order.
pub fn to_flat(diag: &PersistenceDiagram) -> Vec<FlatPoint> {
    diag.features
        .iter()
        .map(|f| FlatPoint { dimension: f.dimension, birth: f.birth, persistence: f.persistence() })
        .collect()
}

/// Inverse of [`to_flat`].
pub fn from_flat(points: &[FlatPoint]) -> Vec<PersistenceFeature> {
    points.iter().map(FlatPoint::to_feature).collect()
}

fn rank(items: impl Iterator<Item = (usize, f64, f64)>) -> Vec<usize> {
    let mut keyed: Vec<(usize, f64, f64)> = items.collect();
    keyed.sort_by(|a, b| {
        b.2.total_cmp(&a.2)
            .then_with(|| a.1.total_cmp(&b.1))
            .then_with(|| a.0.cmp(&b.0))
    });
    keyed.into_iter().map(|(i, _, _)| i).collect()
}

/// Indices into `diag.features` of the finite features of one degree, most
/// persistent first. Ties go to the earlier birth, then the lower index.
pub fn rank_by_persistence(diag: &PersistenceDiagram, dimension: usize) -> Vec<usize> {
    rank(
        diag.features
            .iter()
            .enumerate()
            .filter(|(_, f)| f.dimension == dimension && !f.is_essential())
            .map(|(i, f)| (i, f.birth, f.death - f.birth)),
    )
}

/// The same ranking read directly off flat coordinates.
pub fn rank_flat_by_persistence(points: &[FlatPoint], dimension: usize) -> Vec<usize> {
    rank(
        points
            .iter()
            .enumerate()
            .filter(|(_, p)| p.dimension == dimension && !p.is_essential())
            .map(|(i, p)| (i, p.birth, p.persistence)),
    )
}

/// Indices of the finite features of one degree ordered by death, latest first.
pub fn rank_by_death(diag: &PersistenceDiagram, dimension: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = diag
        .features
        .iter()
        .enumerate()
        .filter(|(_, f)| f.dimension == dimension && !f.is_essential())
        .map(|(i, _)| i)
        .collect();
    idx.sort_by(|&a, &b| {
        let (fa, fb) = (&diag.features[a], &diag.features[b]);
        fb.death.total_cmp(&fa.death).then(a.cmp(&b))
    });
    idx
}

/// Layout used by [`plot_efficiency`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiagramStyle {
    /// (birth, death) on a square plot with shared axes.
    Conventional,
    /// (birth, persistence) on a plot sized to the data.
    Flat,
}

/// Fraction of the plot rectangle where a finite feature could possibly land.
///
/// A conventional diagram over `[0, S]²` only admits points strictly above the
/// diagonal, half the square. A flat diagram over `[0, max birth] × [0, max
/// persistence]` admits any point of the rectangle.
pub fn plot_efficiency(diag: &PersistenceDiagram, style: DiagramStyle) -> Result<f64> {
    if diag.finite().next().is_none() {
        return Err(Error::UndefinedInput("the diagram has no finite features".into()));
    }
    Ok(match style {
        DiagramStyle::Conventional => 0.5,
        DiagramStyle::Flat => 1.0,
    })
}

/// True when two index orders rank the same features differently.
pub fn orders_differ(a: &[usize], b: &[usize]) -> bool {
    a.len() == b.len() && a.iter().zip(b).any(|(x, y)| x != y)
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::SQRT_2;
    use proptest::prelude::*;

    fn diag(features: &[(usize, f64, f64)]) -> PersistenceDiagram {
        PersistenceDiagram {
            features: features
                .iter()
                .map(|&(dimension, birth, death)| PersistenceFeature { dimension, birth, death })
                .collect(),
            max_scale: 2.0,
            n_points: 10,
        }
    }

    #[test]
    fn flat_examples() {
        let d = diag(&[(1, 1.0, SQRT_2), (0, 0.0, f64::INFINITY)]);
        let flat = to_flat(&d);
        assert_eq!(flat[0].dimension, 1);
        assert_eq!(flat[0].birth, 1.0);
        assert!((flat[0].persistence - 0.41421).abs() < 1e-5);
        assert_eq!(flat[1], FlatPoint { dimension: 0, birth: 0.0, persistence: f64::INFINITY });
        assert!(to_flat(&diag(&[])).is_empty());
        assert_eq!(from_flat(&flat), d.features);
    }

    #[test]
    fn ranking_examples() {
        let d = diag(&[(1, 0.2, 0.5), (1, 0.1, 0.6), (1, 0.3, 0.45)]);
        assert_eq!(rank_by_persistence(&d, 1), [1, 0, 2]);
        assert_eq!(rank_by_persistence(&diag(&[(2, 0.1, 0.3)]), 2), [0]);
        assert!(rank_by_persistence(&d, 0).is_empty());
        assert_eq!(rank_by_death(&d, 1), [1, 0, 2]);
    }

    #[test]
    fn ranking_skips_essentials_and_breaks_ties_by_birth() {
        let d = diag(&[(0, 0.0, f64::INFINITY), (0, 0.25, 0.5), (0, 0.125, 0.375), (0, 0.125, 0.375)]);
        assert_eq!(rank_by_persistence(&d, 0), [2, 3, 1]);
    }

    #[test]
    fn death_order_can_disagree_with_persistence_order() {
        let d = diag(&[(1, 0.40, 0.74), (1, 0.55, 0.86), (1, 0.44, 0.69)]);
        assert_eq!(rank_by_persistence(&d, 1), [0, 1, 2]);
        assert_eq!(rank_by_death(&d, 1), [1, 0, 2]);
        assert!(orders_differ(&rank_by_persistence(&d, 1), &rank_by_death(&d, 1)));
    }

    #[test]
    fn efficiency() {
        let d = diag(&[(1, 1.0, SQRT_2)]);
        assert_eq!(plot_efficiency(&d, DiagramStyle::Conventional).unwrap(), 0.5);
        assert_eq!(plot_efficiency(&d, DiagramStyle::Flat).unwrap(), 1.0);
        let only_essential = diag(&[(0, 0.0, f64::INFINITY)]);
        assert!(matches!(plot_efficiency(&only_essential, DiagramStyle::Flat), Err(Error::UndefinedInput(_))));
        assert!(plot_efficiency(&diag(&[]), DiagramStyle::Conventional).is_err());
    }

    proptest! {
        #[test]
        fn flat_round_trip_and_argsort(raw in proptest::collection::vec((0usize..3, 0.0f64..5.0, 0.0f64..5.0), 0..40)) {
            let features: Vec<_> = raw
                .into_iter()
                .filter(|&(_, b, p)| p > 0.0 && b + p > b)
                .map(|(dim, b, p)| (dim, b, b + p))
                .collect();
            let d = diag(&features);
            let flat = to_flat(&d);
            for (p, f) in flat.iter().zip(&d.features) {
                prop_assert_eq!(p.persistence, f.death - f.birth);
                prop_assert!(p.persistence > 0.0);
            }
            prop_assert_eq!(from_flat(&flat), d.features.clone());
            for dim in 0..3 {
                prop_assert_eq!(rank_flat_by_persistence(&flat, dim), rank_by_persistence(&d, dim));
            }
        }
    }
}
