//! Vietoris–Rips filtrations.
//!
//! A simplex enters the filtration at its diameter, the largest pairwise
//! distance between its vertices. Entries are ordered by diameter, then by
//! dimension, then lexicographically by vertex list, which puts every face
//! before its cofaces and makes the order total.

use alloc::vec::Vec;
use core::cmp::Ordering;

use smallvec::SmallVec;

use crate::pointcloud::DistanceMatrix;
use crate::{Error, Result};

type Vertices = SmallVec<[u32; 4]>;

/// A simplex given by its strictly increasing vertex indices.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Simplex {
    vertices: Vertices,
}

impl Simplex {
    /// Builds a simplex, checking the vertices are nonempty and strictly increasing.
    pub fn new(vertices: &[u32]) -> Result<Self> {
        if vertices.is_empty() {
            return Err(Error::InvalidParameter("a simplex needs at least one vertex".into()));
        }
        if vertices.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidParameter(alloc::format!(
                "simplex vertices {vertices:?} are not strictly increasing"
            )));
        }
        Ok(Simplex { vertices: Vertices::from_slice(vertices) })
    }

    fn from_sorted(vertices: Vertices) -> Self {
        debug_assert!(!vertices.is_empty() && vertices.windows(2).all(|w| w[0] < w[1]));
        Simplex { vertices }
    }

    /// A single vertex.
    pub fn vertex(v: u32) -> Self {
        Simplex { vertices: smallvec::smallvec![v] }
    }

    /// Vertex indices, strictly increasing.
    pub fn vertices(&self) -> &[u32] {
        &self.vertices
    }

    /// Number of vertices minus one.
    pub fn dimension(&self) -> usize {
        self.vertices.len() - 1
    }

    /// The codimension-1 faces, each obtained by dropping one vertex. Empty for a vertex.
    pub fn faces(&self) -> impl Iterator<Item = Simplex> + '_ {
        let len = if self.vertices.len() > 1 { self.vertices.len() } else { 0 };
        (0..len).map(move |skip| {
            let vertices = self
                .vertices
                .iter()
                .enumerate()
                .filter(|&(i, _)| i != skip)
                .map(|(_, &v)| v)
                .collect();
            Simplex::from_sorted(vertices)
        })
    }
}

/// A simplex together with the scale at which it enters the filtration.
#[derive(Debug, Clone, PartialEq)]
pub struct FiltrationEntry {
    /// The simplex.
    pub simplex: Simplex,
    /// Its Rips diameter.
    pub diameter: f64,
}

impl FiltrationEntry {
    fn cmp_order(&self, other: &Self) -> Ordering {
        self.diameter
            .total_cmp(&other.diameter)
            .then_with(|| self.simplex.dimension().cmp(&other.simplex.dimension()))
            .then_with(|| self.simplex.vertices().cmp(other.simplex.vertices()))
    }
}

/// Diameter cutoff for [`build_rips_filtration`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Threshold {
    /// Use the largest pairwise distance, i.e. the full filtration.
    Auto,
    /// Keep simplices with diameter at most this value.
    Value(f64),
}

/// An ordered list of simplices with nondecreasing diameters in which every
/// face precedes its cofaces.
#[derive(Debug, Clone, PartialEq)]
pub struct Filtration {
    entries: Vec<FiltrationEntry>,
    n: usize,
    max_dim: usize,
}

impl Filtration {
    /// Wraps an externally built list of entries after checking the ordering
    /// invariants: vertices in range, dimensions at most `max_dim`, diameters
    /// finite and nondecreasing, no duplicates, faces before cofaces.
    pub fn from_entries(n: usize, max_dim: usize, entries: Vec<FiltrationEntry>) -> Result<Self> {
        for (pos, e) in entries.iter().enumerate() {
            if let Some(&v) = e.simplex.vertices().last() {
                if v as usize >= n {
                    return Err(Error::IndexOutOfRange { index: v as usize, n });
                }
            }
            if e.simplex.dimension() > max_dim {
                return Err(Error::MalformedFiltration(alloc::format!(
                    "entry {pos} has dimension {} above the maximum {max_dim}",
                    e.simplex.dimension()
                )));
            }
            if !(e.diameter.is_finite() && e.diameter >= 0.0) {
                return Err(Error::MalformedFiltration(alloc::format!(
                    "entry {pos} has invalid diameter {}",
                    e.diameter
                )));
            }
            if pos > 0 && entries[pos - 1].diameter > e.diameter {
                return Err(Error::MalformedFiltration(alloc::format!(
                    "diameters decrease at entry {pos}"
                )));
            }
        }
        let filtration = Filtration { entries, n, max_dim };
        let index = SimplexIndex::new(&filtration, max_dim)?;
        for (pos, e) in filtration.entries.iter().enumerate() {
            for face in e.simplex.faces() {
                match index.position(&face) {
                    Some(f) if f < pos => {}
                    _ => {
                        return Err(Error::MalformedFiltration(alloc::format!(
                            "a face of entry {pos} {:?} does not precede it",
                            e.simplex.vertices()
                        )))
                    }
                }
            }
        }
        Ok(filtration)
    }

    /// Entries in filtration order.
    pub fn entries(&self) -> &[FiltrationEntry] {
        &self.entries
    }

    /// Number of points of the underlying cloud.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Largest simplex dimension the filtration was built for.
    pub fn max_dim(&self) -> usize {
        self.max_dim
    }

    /// Number of entries.
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    /// True when there are no entries.
    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Diameter of the last entry, `0.0` when empty.
    pub fn max_diameter(&self) -> f64 {
        self.entries.last().map_or(0.0, |e| e.diameter)
    }
}

/// Largest pairwise distance among the simplex's vertices; `0.0` for a vertex.
pub fn simplex_diameter(s: &Simplex, dm: &DistanceMatrix) -> Result<f64> {
    let vs = s.vertices();
    if let Some(&v) = vs.iter().find(|&&v| v as usize >= dm.n()) {
        return Err(Error::IndexOutOfRange { index: v as usize, n: dm.n() });
    }
    let mut diam = 0.0f64;
    for (i, &a) in vs.iter().enumerate() {
        for &b in &vs[i + 1..] {
            diam = diam.max(dm.get(a as usize, b as usize));
        }
    }
    Ok(diam)
}

/// Builds the Rips filtration of `dm` with every simplex of dimension at most
/// `max_dim` and diameter at most the threshold.
///
/// To get homology through degree `k`, pass `max_dim = k + 1`.
pub fn build_rips_filtration(dm: &DistanceMatrix, max_dim: usize, threshold: Threshold) -> Result<Filtration> {
    let n = dm.n();
    if n > u32::MAX as usize {
        return Err(Error::InvalidParameter("too many points".into()));
    }
    let t = match threshold {
        Threshold::Auto => dm.max_entry(),
        Threshold::Value(t) if t > 0.0 => t,
        Threshold::Value(t) => {
            return Err(Error::InvalidParameter(alloc::format!("threshold must be positive, got {t}")))
        }
    };

    // neighbors[v]: vertices w > v within the threshold
    let neighbors: Vec<Vec<u32>> = (0..n)
        .map(|v| ((v + 1)..n).filter(|&w| dm.get(v, w) <= t).map(|w| w as u32).collect())
        .collect();

    let mut entries = Vec::new();
    let mut clique = Vertices::new();
    for v in 0..n as u32 {
        clique.push(v);
        entries.push(FiltrationEntry { simplex: Simplex::from_sorted(clique.clone()), diameter: 0.0 });
        if max_dim > 0 {
            extend_cliques(dm, max_dim, &neighbors[v as usize], &neighbors, &mut clique, 0.0, &mut entries);
        }
        clique.pop();
    }

    entries.sort_unstable_by(FiltrationEntry::cmp_order);
    Ok(Filtration { entries, n, max_dim })
}

fn extend_cliques(
    dm: &DistanceMatrix,
    max_dim: usize,
    candidates: &[u32],
    neighbors: &[Vec<u32>],
    clique: &mut Vertices,
    diameter: f64,
    out: &mut Vec<FiltrationEntry>,
) {
    for (i, &v) in candidates.iter().enumerate() {
        let diam = clique
            .iter()
            .map(|&u| dm.get(u as usize, v as usize))
            .fold(diameter, f64::max);
        clique.push(v);
        out.push(FiltrationEntry { simplex: Simplex::from_sorted(clique.clone()), diameter: diam });
        if clique.len() <= max_dim {
            // candidates are sorted, so the intersection with v's neighbors stays sorted
            let nbrs = &neighbors[v as usize];
            let next: Vec<u32> = candidates[i + 1..]
                .iter()
                .copied()
                .filter(|w| nbrs.binary_search(w).is_ok())
                .collect();
            if !next.is_empty() {
                extend_cliques(dm, max_dim, &next, neighbors, clique, diam, out);
            }
        }
        clique.pop();
    }
}

/// Maps simplices of a filtration back to their positions through the
/// combinatorial number system key `Σ C(v_i, i + 1)`.
///
/// Simplices of each dimension also get a local rank (their order among the
/// entries of that dimension), which the reduction uses as compact row indices.
pub(crate) struct SimplexIndex {
    binomial: Vec<Vec<u64>>,
    lookup: Vec<KeyLookup>,
    /// `globals[d][rank]` = filtration position of the `rank`-th `d`-simplex.
    pub(crate) globals: Vec<Vec<u32>>,
}

enum KeyLookup {
    /// Slot per possible key; `u32::MAX` marks absent simplices.
    Dense(Vec<u32>),
    /// `(key, rank)` sorted by key.
    Sparse(Vec<(u64, u32)>),
}

const DENSE_LIMIT: u64 = 1 << 24;

impl SimplexIndex {
    /// Ranks every entry and builds key lookups for dimensions up to `lookup_dim`.
    pub(crate) fn new(filtration: &Filtration, lookup_dim: usize) -> Result<Self> {
        if filtration.len() >= u32::MAX as usize {
            return Err(Error::InvalidParameter("filtration too large to index".into()));
        }
        let n = filtration.n();
        let upto_dim = lookup_dim.min(filtration.max_dim());
        let kmax = upto_dim + 1;
        let mut binomial = alloc::vec![alloc::vec![0u64; kmax + 1]; n + 1];
        for v in 0..=n {
            binomial[v][0] = 1;
            for k in 1..=kmax.min(v) {
                let above = if k < v { binomial[v - 1][k] } else { 0 };
                binomial[v][k] = binomial[v - 1][k - 1]
                    .checked_add(above)
                    .ok_or_else(|| Error::InvalidParameter("simplex keys overflow 64 bits".into()))?;
            }
        }
        let mut globals: Vec<Vec<u32>> = alloc::vec![Vec::new(); filtration.max_dim() + 1];
        for (pos, e) in filtration.entries().iter().enumerate() {
            globals[e.simplex.dimension()].push(pos as u32);
        }
        let mut index = SimplexIndex { binomial, lookup: Vec::new(), globals };
        let duplicate = |a: u32, b: u32| {
            Error::MalformedFiltration(alloc::format!("entries {a} and {b} are the same simplex"))
        };
        for dim in 0..=upto_dim {
            let entries = filtration.entries();
            let positions = &index.globals[dim];
            let possible = index.binomial[n][dim + 1];
            let lookup = if possible <= DENSE_LIMIT {
                let mut table = alloc::vec![u32::MAX; possible as usize];
                for (rank, &pos) in positions.iter().enumerate() {
                    let slot = &mut table[index.key(entries[pos as usize].simplex.vertices()) as usize];
                    if *slot != u32::MAX {
                        return Err(duplicate(positions[*slot as usize], pos));
                    }
                    *slot = rank as u32;
                }
                KeyLookup::Dense(table)
            } else {
                let mut list: Vec<(u64, u32)> = positions
                    .iter()
                    .enumerate()
                    .map(|(rank, &pos)| (index.key(entries[pos as usize].simplex.vertices()), rank as u32))
                    .collect();
                list.sort_unstable();
                if let Some(w) = list.windows(2).find(|w| w[0].0 == w[1].0) {
                    return Err(duplicate(positions[w[0].1 as usize], positions[w[1].1 as usize]));
                }
                KeyLookup::Sparse(list)
            };
            index.lookup.push(lookup);
        }
        Ok(index)
    }

    #[inline]
    fn key(&self, vertices: &[u32]) -> u64 {
        vertices
            .iter()
            .enumerate()
            .map(|(i, &v)| self.binomial[v as usize][i + 1])
            .sum()
    }

    /// Rank of the simplex with these vertices among simplices of its dimension.
    #[inline]
    pub(crate) fn rank_of(&self, vertices: &[u32]) -> Option<u32> {
        let lookup = self.lookup.get(vertices.len().checked_sub(1)?)?;
        if vertices.last().is_some_and(|&v| v as usize >= self.binomial.len() - 1) {
            return None;
        }
        let key = self.key(vertices);
        match lookup {
            KeyLookup::Dense(table) => table.get(key as usize).copied().filter(|&r| r != u32::MAX),
            KeyLookup::Sparse(list) => list
                .binary_search_by_key(&key, |&(k, _)| k)
                .ok()
                .map(|i| list[i].1),
        }
    }

    pub(crate) fn position(&self, s: &Simplex) -> Option<usize> {
        let rank = self.rank_of(s.vertices())?;
        Some(self.globals[s.dimension()][rank as usize] as usize)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pointcloud::{sample_circle, DistanceMatrix, PointCloud};
    use core::f64::consts::SQRT_2;
    use proptest::prelude::*;

    fn square() -> DistanceMatrix {
        let c = PointCloud::from_points(2, [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]]).unwrap();
        DistanceMatrix::from_cloud(&c)
    }

    fn binom(n: usize, k: usize) -> usize {
        if k > n {
            return 0;
        }
        (0..k).fold(1, |acc, i| acc * (n - i) / (i + 1))
    }

    #[test]
    fn simplex_validation() {
        assert!(Simplex::new(&[]).is_err());
        assert!(Simplex::new(&[1, 1]).is_err());
        assert!(Simplex::new(&[2, 1]).is_err());
        let s = Simplex::new(&[0, 2, 5]).unwrap();
        assert_eq!(s.dimension(), 2);
        let faces: Vec<_> = s.faces().map(|f| f.vertices().to_vec()).collect();
        assert_eq!(faces, alloc::vec![alloc::vec![2, 5], alloc::vec![0, 5], alloc::vec![0, 2]]);
        assert_eq!(Simplex::vertex(3).faces().count(), 0);
    }

    #[test]
    fn diameters() {
        let dm = square();
        assert_eq!(simplex_diameter(&Simplex::vertex(3), &dm).unwrap(), 0.0);
        assert_eq!(simplex_diameter(&Simplex::new(&[0, 1]).unwrap(), &dm).unwrap(), 1.0);
        let tri = Simplex::new(&[0, 1, 2]).unwrap();
        assert_eq!(simplex_diameter(&tri, &dm).unwrap(), SQRT_2);
        assert_eq!(
            simplex_diameter(&Simplex::new(&[0, 4]).unwrap(), &dm),
            Err(Error::IndexOutOfRange { index: 4, n: 4 })
        );
    }

    #[test]
    fn square_filtration() {
        let f = build_rips_filtration(&square(), 2, Threshold::Auto).unwrap();
        assert_eq!(f.len(), 14);
        let count = |dim: usize, d: f64| {
            f.entries()
                .iter()
                .filter(|e| e.simplex.dimension() == dim && e.diameter == d)
                .count()
        };
        assert_eq!(count(0, 0.0), 4);
        assert_eq!(count(1, 1.0), 4);
        assert_eq!(count(1, SQRT_2), 2);
        assert_eq!(count(2, SQRT_2), 4);
        // ties at √2: the two diagonals come before all four triangles
        let dims: Vec<_> = f.entries().iter().map(|e| e.simplex.dimension()).collect();
        assert_eq!(dims, [0, 0, 0, 0, 1, 1, 1, 1, 1, 1, 2, 2, 2, 2]);
    }

    #[test]
    fn equilateral_triangle() {
        let dm = DistanceMatrix::from_full(3, alloc::vec![0.0, 1.0, 1.0, 1.0, 0.0, 1.0, 1.0, 1.0, 0.0]).unwrap();
        let f = build_rips_filtration(&dm, 2, Threshold::Auto).unwrap();
        let summary: Vec<_> = f.entries().iter().map(|e| (e.simplex.dimension(), e.diameter)).collect();
        assert_eq!(summary, [(0, 0.0), (0, 0.0), (0, 0.0), (1, 1.0), (1, 1.0), (1, 1.0), (2, 1.0)]);
    }

    #[test]
    fn tiny_threshold_keeps_only_vertices() {
        let c = sample_circle(12, 1.0, 0.05, 1).unwrap();
        let dm = DistanceMatrix::from_cloud(&c);
        let f = build_rips_filtration(&dm, 2, Threshold::Value(1e-6)).unwrap();
        assert_eq!(f.len(), 12);
        assert!(f.entries().iter().all(|e| e.simplex.dimension() == 0));
    }

    #[test]
    fn nonpositive_threshold_is_rejected() {
        assert!(matches!(
            build_rips_filtration(&square(), 2, Threshold::Value(0.0)),
            Err(Error::InvalidParameter(_))
        ));
    }

    #[test]
    fn from_entries_checks_order() {
        let f = build_rips_filtration(&square(), 2, Threshold::Auto).unwrap();
        assert!(Filtration::from_entries(4, 2, f.entries().to_vec()).is_ok());

        let mut swapped = f.entries().to_vec();
        swapped.swap(3, 4); // edge before one of its vertices
        assert!(matches!(
            Filtration::from_entries(4, 2, swapped),
            Err(Error::MalformedFiltration(_))
        ));

        let mut dup = f.entries().to_vec();
        dup.insert(1, dup[0].clone());
        assert!(matches!(Filtration::from_entries(4, 2, dup), Err(Error::MalformedFiltration(_))));

        let mut decreasing = f.entries().to_vec();
        decreasing[13].diameter = 0.5;
        assert!(Filtration::from_entries(4, 2, decreasing).is_err());

        assert!(matches!(
            Filtration::from_entries(3, 2, f.entries().to_vec()),
            Err(Error::IndexOutOfRange { .. })
        ));
        assert!(Filtration::from_entries(4, 1, f.entries().to_vec()).is_err());
    }

    proptest! {
        #[test]
        fn filtration_invariants(seed in 0u64..1000, n in 1usize..9, max_dim in 0usize..4) {
            let c = sample_circle(n, 1.0, 0.3, seed).unwrap();
            let dm = DistanceMatrix::from_cloud(&c);
            let f = build_rips_filtration(&dm, max_dim, Threshold::Auto).unwrap();
            let expected: usize = (0..=max_dim).map(|k| binom(n, k + 1)).sum();
            prop_assert_eq!(f.len(), expected);

            let index = SimplexIndex::new(&f, max_dim).unwrap();
            for (pos, e) in f.entries().iter().enumerate() {
                prop_assert_eq!(e.diameter, simplex_diameter(&e.simplex, &dm).unwrap());
                prop_assert_eq!(index.position(&e.simplex), Some(pos));
                for face in e.simplex.faces() {
                    let fp = index.position(&face).unwrap();
                    prop_assert!(fp < pos);
                    prop_assert!(f.entries()[fp].diameter <= e.diameter);
                }
                if pos > 0 {
                    prop_assert_eq!(f.entries()[pos - 1].cmp_order(e), Ordering::Less);
                }
            }
            prop_assert_eq!(&f, &build_rips_filtration(&dm, max_dim, Threshold::Auto).unwrap());
        }
    }
}
