//! Persistence pairs by column reduction of the boundary matrix over Z/2.
//!
//! Columns are sorted index sets; adding two columns is a symmetric
//! difference. [`Reduction::Standard`] is the textbook left-to-right
//! algorithm. [`Reduction::Twist`] processes dimensions from the top down and
//! skips ("clears") every column whose index is already known to be the
//! pivot of a higher-dimensional column; those columns would reduce to zero
//! anyway, so both variants produce the same pairing.

use alloc::vec::Vec;

use crate::rips::{Filtration, SimplexIndex};
use crate::{Error, Result};

const NONE: u32 = u32::MAX;

/// A column of the boundary matrix: the filtration positions of the
/// codimension-1 faces, as a sorted set.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BoundaryColumn {
    rows: Vec<u32>,
}

impl BoundaryColumn {
    /// Builds a column from arbitrary row indices; duplicates cancel in pairs,
    /// as they do over Z/2.
    pub fn from_rows(mut rows: Vec<u32>) -> Self {
        rows.sort_unstable();
        let mut out: Vec<u32> = Vec::with_capacity(rows.len());
        for r in rows {
            if out.last() == Some(&r) {
                out.pop();
            } else {
                out.push(r);
            }
        }
        BoundaryColumn { rows: out }
    }

    /// Row indices, increasing.
    pub fn rows(&self) -> &[u32] {
        &self.rows
    }

    /// True for the zero column.
    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Adds `other` to this column over Z/2.
    pub fn add(&mut self, other: &BoundaryColumn) {
        let mut scratch = Vec::with_capacity(self.rows.len() + other.rows.len());
        symmetric_difference(&self.rows, &other.rows, &mut scratch);
        self.rows = scratch;
    }
}

/// Pivot of a column: its largest row index, or `None` for the zero column.
pub fn low(col: &BoundaryColumn) -> Option<usize> {
    col.rows.last().map(|&r| r as usize)
}

fn symmetric_difference(a: &[u32], b: &[u32], out: &mut Vec<u32>) {
    out.clear();
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            core::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            core::cmp::Ordering::Greater => {
                out.push(b[j]);
                j += 1;
            }
            core::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
}

/// Which column reduction to run.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub enum Reduction {
    /// Plain left-to-right reduction of every column.
    Standard,
    /// Top-down by dimension, clearing columns already known to be creators.
    #[default]
    Twist,
}

/// One entry of the pairing returned by [`reduce`]: a creator index and the
/// index of the simplex that kills it, or `None` for an essential class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct PersistencePair {
    /// Filtration index of the creating simplex.
    pub creator: usize,
    /// Filtration index of the killing simplex.
    pub killer: Option<usize>,
}

/// Boundary columns of a filtration, addressed either by filtration position
/// or by (dimension, rank within that dimension).
pub(crate) struct BoundaryMatrix<'a> {
    filtration: &'a Filtration,
    index: SimplexIndex,
}

impl<'a> BoundaryMatrix<'a> {
    pub(crate) fn new(filtration: &'a Filtration) -> Result<Self> {
        let lookup_dim = filtration.max_dim().saturating_sub(1);
        Ok(BoundaryMatrix { filtration, index: SimplexIndex::new(filtration, lookup_dim)? })
    }

    fn count(&self, dim: usize) -> usize {
        self.index.globals[dim].len()
    }

    fn global(&self, dim: usize, rank: u32) -> usize {
        self.index.globals[dim][rank as usize] as usize
    }

    /// Writes the sorted ranks of the faces of the `rank`-th `dim`-simplex into `out`.
    fn local_column(&self, dim: usize, rank: u32, out: &mut Vec<u32>) -> Result<()> {
        out.clear();
        let pos = self.global(dim, rank);
        let vs = self.filtration.entries()[pos].simplex.vertices();
        if vs.len() < 2 {
            return Ok(());
        }
        let mut face: smallvec::SmallVec<[u32; 4]> = smallvec::SmallVec::with_capacity(vs.len() - 1);
        for skip in 0..vs.len() {
            face.clear();
            face.extend(vs.iter().enumerate().filter(|&(i, _)| i != skip).map(|(_, &v)| v));
            match self.index.rank_of(&face) {
                Some(r) if self.global(dim - 1, r) < pos => out.push(r),
                _ => {
                    return Err(Error::MalformedFiltration(alloc::format!(
                        "face {face:?} of entry {pos} does not precede it"
                    )))
                }
            }
        }
        out.sort_unstable();
        Ok(())
    }

    /// The boundary column of the entry at filtration position `pos`.
    #[cfg(test)]
    pub(crate) fn column(&self, pos: usize) -> Result<BoundaryColumn> {
        let dim = self.filtration.entries()[pos].simplex.dimension();
        let rank = self.index.globals[dim].binary_search(&(pos as u32)).expect("entry is ranked") as u32;
        let mut rows = Vec::new();
        self.local_column(dim, rank, &mut rows)?;
        for r in &mut rows {
            *r = self.global(dim - 1, *r) as u32;
        }
        Ok(BoundaryColumn { rows })
    }
}

/// The column being reduced, as a bitset over row ranks with a one-bit-per-word
/// summary, so the pivot is found by scanning down a few summary words.
struct WorkingColumn {
    words: Vec<u64>,
    summary: Vec<u64>,
    low: Option<u32>,
}

impl WorkingColumn {
    fn new(rows: usize) -> Self {
        let words = rows.div_ceil(64);
        WorkingColumn {
            words: alloc::vec![0; words],
            summary: alloc::vec![0; words.div_ceil(64)],
            low: None,
        }
    }

    #[inline]
    fn toggle(&mut self, row: u32) {
        let w = (row >> 6) as usize;
        self.words[w] ^= 1 << (row & 63);
        let bit = 1u64 << (w & 63);
        if self.words[w] == 0 {
            self.summary[w >> 6] &= !bit;
        } else {
            self.summary[w >> 6] |= bit;
        }
    }

    /// Highest set row at or below `bound`.
    fn highest_at_or_below(&self, bound: u32) -> Option<u32> {
        let w = (bound >> 6) as usize;
        let masked = self.words[w] & (u64::MAX >> (63 - (bound & 63)));
        if masked != 0 {
            return Some(((w as u32) << 6) | (63 - masked.leading_zeros()));
        }
        if w == 0 {
            return None;
        }
        let below = w - 1;
        let mut s = below >> 6;
        let mut bits = self.summary[s] & (u64::MAX >> (63 - (below & 63)));
        loop {
            if bits != 0 {
                let word = (s << 6) | (63 - bits.leading_zeros() as usize);
                return Some(((word as u32) << 6) | (63 - self.words[word].leading_zeros()));
            }
            if s == 0 {
                return None;
            }
            s -= 1;
            bits = self.summary[s];
        }
    }

    /// Loads a (sorted) boundary column; the bitset must be empty.
    fn load(&mut self, rows: &[u32]) {
        for &r in rows {
            self.toggle(r);
        }
        self.low = rows.last().copied();
    }

    /// Adds a stored column whose pivot equals the current pivot.
    fn add_same_low(&mut self, rows: &[u32]) {
        for &r in rows {
            self.toggle(r);
        }
        self.low = match self.low {
            Some(l) if l > 0 => self.highest_at_or_below(l - 1),
            _ => None,
        };
    }

    /// Moves the set rows into `out` in increasing order, leaving the bitset empty.
    fn drain_into(&mut self, out: &mut Vec<u32>) {
        out.clear();
        for s in 0..self.summary.len() {
            let mut sbits = core::mem::take(&mut self.summary[s]);
            while sbits != 0 {
                let w = (s << 6) | sbits.trailing_zeros() as usize;
                sbits &= sbits - 1;
                let mut bits = core::mem::take(&mut self.words[w]);
                while bits != 0 {
                    out.push(((w as u32) << 6) | bits.trailing_zeros());
                    bits &= bits - 1;
                }
            }
        }
        self.low = None;
    }
}

/// Reduced columns of one dimension with a nonzero pivot, kept in a single
/// arena as sorted row sets and looked up by pivot.
struct PivotStore {
    slot_of_low: Vec<u32>,
    spans: Vec<(usize, usize)>,
    arena: Vec<u32>,
    work: WorkingColumn,
}

impl PivotStore {
    fn new(rows: usize) -> Self {
        PivotStore {
            slot_of_low: alloc::vec![NONE; rows],
            spans: Vec::new(),
            arena: Vec::new(),
            work: WorkingColumn::new(rows),
        }
    }

    /// Reduces `col` in place against the stored columns; returns its final pivot.
    fn reduce(&mut self, col: &mut Vec<u32>) -> Option<u32> {
        // short columns that need no addition skip the bitset entirely
        match col.last() {
            None => return None,
            Some(&l) if self.slot_of_low[l as usize] == NONE => return Some(l),
            _ => {}
        }
        self.work.load(col);
        while let Some(l) = self.work.low {
            let slot = self.slot_of_low[l as usize];
            if slot == NONE {
                break;
            }
            let (start, len) = self.spans[slot as usize];
            self.work.add_same_low(&self.arena[start..start + len]);
        }
        let low = self.work.low;
        self.work.drain_into(col);
        low
    }

    fn store(&mut self, low: u32, col: &[u32]) {
        self.slot_of_low[low as usize] = self.spans.len() as u32;
        self.spans.push((self.arena.len(), col.len()));
        self.arena.extend_from_slice(col);
    }
}

/// Pairs the filtration's simplices with the twist variant of the reduction.
///
/// Returns one pair per creator, sorted by creator index. Simplices that kill
/// a class appear only as killers; unpaired creators (including cycles in the
/// top dimension, whose deaths lie beyond the filtration) have `killer: None`.
pub fn reduce(filtration: &Filtration) -> Result<Vec<PersistencePair>> {
    reduce_with(filtration, Reduction::Twist)
}

/// Like [`reduce`], with an explicit choice of algorithm.
///
/// Columns of different dimensions have disjoint row sets and never interact,
/// so the standard variant runs dimension by dimension, each block left to right.
pub fn reduce_with(filtration: &Filtration, variant: Reduction) -> Result<Vec<PersistencePair>> {
    let m = filtration.len();
    let boundary = BoundaryMatrix::new(filtration)?;
    // killer_of[c] = position of the column that kills creator c
    let mut killer_of = alloc::vec![NONE; m];
    let mut is_killer = alloc::vec![false; m];

    let dims: Vec<usize> = match variant {
        Reduction::Standard => (1..=filtration.max_dim()).collect(),
        Reduction::Twist => (1..=filtration.max_dim()).rev().collect(),
    };
    let mut col = Vec::new();
    for dim in dims {
        let mut store = PivotStore::new(boundary.count(dim - 1));
        for rank in 0..boundary.count(dim) as u32 {
            let pos = boundary.global(dim, rank);
            if variant == Reduction::Twist && killer_of[pos] != NONE {
                // cleared: already the pivot of a column one dimension up
                continue;
            }
            boundary.local_column(dim, rank, &mut col)?;
            if let Some(low) = store.reduce(&mut col) {
                killer_of[boundary.global(dim - 1, low)] = pos as u32;
                is_killer[pos] = true;
                store.store(low, &col);
            }
        }
    }

    Ok((0..m)
        .filter(|&j| !is_killer[j])
        .map(|j| PersistencePair {
            creator: j,
            killer: match killer_of[j] {
                NONE => None,
                k => Some(k as usize),
            },
        })
        .collect())
}

/// A homology class with the scales at which it appears and disappears.
///
/// `death` is `f64::INFINITY` for essential classes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PersistenceFeature {
    /// Homology degree.
    pub dimension: usize,
    /// Diameter of the creating simplex.
    pub birth: f64,
    /// Diameter of the killing simplex, or infinity.
    pub death: f64,
}

impl PersistenceFeature {
    /// True when the class never dies in the computed filtration.
    pub fn is_essential(&self) -> bool {
        self.death == f64::INFINITY
    }

    /// `death - birth`; infinite for essential classes.
    pub fn persistence(&self) -> f64 {
        self.death - self.birth
    }

    /// Total order by degree, birth, then death.
    pub fn total_cmp(&self, other: &Self) -> core::cmp::Ordering {
        self.dimension
            .cmp(&other.dimension)
            .then(self.birth.total_cmp(&other.birth))
            .then(self.death.total_cmp(&other.death))
    }
}

/// All features of one computation.
#[derive(Debug, Clone, PartialEq)]
pub struct PersistenceDiagram {
    /// Features sorted by degree, then by the filtration position of their creator.
    pub features: Vec<PersistenceFeature>,
    /// Largest diameter in the filtration.
    pub max_scale: f64,
    /// Number of points in the cloud.
    pub n_points: usize,
}

impl PersistenceDiagram {
    /// Features of one degree.
    pub fn of_dimension(&self, dimension: usize) -> impl Iterator<Item = &PersistenceFeature> + '_ {
        self.features.iter().filter(move |f| f.dimension == dimension)
    }

    /// Features with a finite death.
    pub fn finite(&self) -> impl Iterator<Item = &PersistenceFeature> + '_ {
        self.features.iter().filter(|f| !f.is_essential())
    }

    /// Largest degree present, if any.
    pub fn max_dimension(&self) -> Option<usize> {
        self.features.iter().map(|f| f.dimension).max()
    }
}

/// Persistence diagram through homology degree `homology_max_dim`, using the
/// twist reduction.
///
/// The filtration must contain simplices one dimension higher than the
/// largest requested degree, otherwise deaths in that degree are unknown.
pub fn compute_persistence(filtration: &Filtration, homology_max_dim: usize) -> Result<PersistenceDiagram> {
    compute_persistence_with(filtration, homology_max_dim, Reduction::Twist)
}

/// Like [`compute_persistence`], with an explicit choice of algorithm.
pub fn compute_persistence_with(
    filtration: &Filtration,
    homology_max_dim: usize,
    variant: Reduction,
) -> Result<PersistenceDiagram> {
    if filtration.max_dim() < homology_max_dim + 1 {
        return Err(Error::InvalidParameter(alloc::format!(
            "homology through degree {homology_max_dim} needs a filtration of dimension {}, got {}",
            homology_max_dim + 1,
            filtration.max_dim()
        )));
    }
    let entries = filtration.entries();
    let mut features: Vec<PersistenceFeature> = reduce_with(filtration, variant)?
        .into_iter()
        .filter_map(|p| {
            let creator = &entries[p.creator];
            let dimension = creator.simplex.dimension();
            if dimension > homology_max_dim {
                return None;
            }
            let birth = creator.diameter;
            let death = p.killer.map_or(f64::INFINITY, |k| entries[k].diameter);
            (death > birth).then_some(PersistenceFeature { dimension, birth, death })
        })
        .collect();
    features.sort_by_key(|f| f.dimension);
    Ok(PersistenceDiagram { features, max_scale: filtration.max_diameter(), n_points: filtration.n() })
}
