//! The N-fold roll of a graph.
//!
//! The roll of an `n`-node graph `G` lives on an `N x n` grid: row `i` is the
//! `i`-th copy of the node set and grid node `(i, j)` stands for base node `j`.
//! Requires `(N - 1) % (n - 1) == 0`, which makes the admissible slopes
//! `0..=(N - 1) / (n - 1)`.
//!
//! Duplicate `(i, c)` is the set of grid nodes `((i + j*c) mod N, j)` for
//! `j = 0..n`, a copy of `G` laid along a line of slope `c`. Every grid-bone
//! belongs to exactly one duplicate, so the duplicates' edge sets partition
//! the roll's edges. There are `N * ((N - 1)/(n - 1) + 1)` duplicates, of which
//! the first `N^2 / n` in `(slope, start)` order are kept; edges on the rest
//! are erased while their nodes stay in the grid.
//!
//! All indices are 0-based.

use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::graph::{Clustering, SignedGraph};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GridNode {
    pub row: usize,
    pub col: usize,
}

impl GridNode {
    pub fn new(row: usize, col: usize) -> Self {
        Self { row, col }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DuplicateId {
    pub start: usize,
    pub slope: usize,
}

impl DuplicateId {
    pub fn new(start: usize, slope: usize) -> Self {
        Self { start, slope }
    }

    /// Grid node hosting base node `col` in this duplicate.
    pub fn node(&self, rows: usize, col: usize) -> GridNode {
        GridNode::new((self.start + col * self.slope) % rows, col)
    }
}

/// Grid dimensions of a roll: `n` columns (base nodes) and `rows` copies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RollShape {
    n: usize,
    rows: usize,
}

impl RollShape {
    pub fn new(n: usize, rows: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::RollShape(format!(
                "need at least 2 base nodes, got {n}"
            )));
        }
        if rows == 0 || !(rows - 1).is_multiple_of(n - 1) {
            return Err(Error::RollShape(format!(
                "N - 1 = {} is not a multiple of n - 1 = {}",
                rows as i64 - 1,
                n - 1
            )));
        }
        Ok(Self { n, rows })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn max_slope(&self) -> usize {
        (self.rows - 1) / (self.n - 1)
    }

    /// Number of duplicates before trimming, `N * ((N-1)/(n-1) + 1)`.
    pub fn duplicate_count(&self) -> usize {
        self.rows * (self.max_slope() + 1)
    }

    /// `N^2 / n` when it is an integer.
    pub fn kept_count(&self) -> Option<usize> {
        let sq = self.rows * self.rows;
        sq.is_multiple_of(self.n).then_some(sq / self.n)
    }

    pub fn grid_size(&self) -> usize {
        self.rows * self.n
    }

    pub fn index(&self, node: GridNode) -> usize {
        node.row * self.n + node.col
    }

    pub fn node_at(&self, index: usize) -> GridNode {
        GridNode::new(index / self.n, index % self.n)
    }

    /// All duplicates in `(slope, start)` lexicographic order.
    pub fn duplicates(&self) -> impl Iterator<Item = DuplicateId> + '_ {
        (0..=self.max_slope())
            .flat_map(move |slope| (0..self.rows).map(move |start| DuplicateId::new(start, slope)))
    }

    /// The `C(n, 2)` grid pairs of a duplicate as `(lower index, higher index)`,
    /// listed by base pair `(u, v)`, `u < v`.
    pub fn duplicate_pairs(&self, d: DuplicateId) -> Vec<((usize, usize), (usize, usize))> {
        let mut out = Vec::with_capacity(self.n * (self.n - 1) / 2);
        for u in 0..self.n {
            let a = self.index(d.node(self.rows, u));
            for v in u + 1..self.n {
                let b = self.index(d.node(self.rows, v));
                out.push(((u, v), (a.min(b), a.max(b))));
            }
        }
        out
    }
}

/// Smallest `N` for a given `t`: `N = n * (1 + t*(n - 1))`, which satisfies
/// both `(N - 1) % (n - 1) == 0` and `N^2 % n == 0`.
pub fn valid_roll_size(n: usize, t: usize) -> Result<usize> {
    if n < 2 {
        return Err(Error::RollShape(format!(
            "need at least 2 base nodes, got {n}"
        )));
    }
    Ok(n * (1 + t * (n - 1)))
}

/// Wrapped-around vertical distance; `None` stands for infinity (`a` right of `b`).
pub fn vertical_distance(a: GridNode, b: GridNode, rows: usize) -> Option<usize> {
    (a.col <= b.col).then(|| (b.row + rows - a.row % rows) % rows)
}

fn orient(a: GridNode, b: GridNode) -> (GridNode, GridNode) {
    if a.col <= b.col {
        (a, b)
    } else {
        (b, a)
    }
}

/// Slope of the pair if it is a grid-bone.
fn bone_slope(a: GridNode, b: GridNode, shape: &RollShape) -> Option<usize> {
    let (a, b) = orient(a, b);
    if a.col == b.col {
        return None;
    }
    let d = vertical_distance(a, b, shape.rows)?;
    let gap = b.col - a.col;
    (d % gap == 0 && d / gap <= shape.max_slope()).then_some(d / gap)
}

/// Whether the unordered pair is a grid-bone: distinct columns and an integral
/// slope `d / (column gap)` no larger than `(N-1)/(n-1)`.
pub fn is_grid_bone(a: GridNode, b: GridNode, shape: &RollShape) -> bool {
    bone_slope(a, b, shape).is_some()
}

/// The duplicate containing a grid-bone.
pub fn duplicate_of(a: GridNode, b: GridNode, shape: &RollShape) -> Result<DuplicateId> {
    let slope = bone_slope(a, b, shape).ok_or(Error::NotGridBone {
        a_row: a.row,
        a_col: a.col,
        b_row: b.row,
        b_col: b.col,
    })?;
    let (a, _) = orient(a, b);
    let rows = shape.rows;
    let start = (a.row + rows - (a.col * slope) % rows) % rows;
    Ok(DuplicateId::new(start, slope))
}

/// `G^N` with its duplicate bookkeeping.
#[derive(Debug, Clone)]
pub struct RolledGraph {
    base: SignedGraph,
    shape: RollShape,
    graph: SignedGraph,
    active: Vec<DuplicateId>,
    bone_index: HashMap<(usize, usize), DuplicateId>,
}

/// Builds the roll of `g` with `rows` copies, keeping `rows^2 / n` duplicates.
pub fn build_roll(g: &SignedGraph, rows: usize, exec: Execution) -> Result<RolledGraph> {
    let shape = RollShape::new(g.node_count(), rows)?;
    let kept = shape.kept_count().ok_or_else(|| {
        Error::RollShape(format!(
            "N^2 = {} is not a multiple of n = {}",
            rows * rows,
            shape.n
        ))
    })?;
    let all: Vec<DuplicateId> = shape.duplicates().collect();
    let per_duplicate = exec.map_slice(&all, |&d| shape.duplicate_pairs(d));

    let mut bone_index =
        HashMap::with_capacity(all.len() * per_duplicate.first().map_or(0, Vec::len));
    for (d, pairs) in all.iter().zip(&per_duplicate) {
        for &(_, grid) in pairs {
            bone_index.insert(grid, *d);
        }
    }

    let mut graph = SignedGraph::new(shape.grid_size());
    for pairs in &per_duplicate[..kept] {
        for &((u, v), (a, b)) in pairs {
            if let Some(w) = g.weight_ref(u, v) {
                graph.insert_unchecked(a, b, w.clone());
            }
        }
    }

    Ok(RolledGraph {
        base: g.clone(),
        shape,
        graph,
        active: all[..kept].to_vec(),
        bone_index,
    })
}

impl RolledGraph {
    pub fn base(&self) -> &SignedGraph {
        &self.base
    }

    pub fn shape(&self) -> &RollShape {
        &self.shape
    }

    pub fn rows(&self) -> usize {
        self.shape.rows
    }

    pub fn graph(&self) -> &SignedGraph {
        &self.graph
    }

    pub fn active(&self) -> &[DuplicateId] {
        &self.active
    }

    /// Every grid-bone (over all duplicates, trimmed or not) keyed by
    /// `(lower grid index, higher grid index)`.
    pub fn bone_index(&self) -> &HashMap<(usize, usize), DuplicateId> {
        &self.bone_index
    }

    pub fn is_active(&self, d: DuplicateId) -> bool {
        d.slope <= self.shape.max_slope() && d.start < self.shape.rows && self.position(d).is_some()
    }

    /// Position of `d` in the active list.
    pub fn position(&self, d: DuplicateId) -> Option<usize> {
        // active duplicates are a prefix of the (slope, start) order
        let pos = d.slope * self.shape.rows + d.start;
        match self.active.get(pos) {
            Some(&x) if x == d => Some(pos),
            _ => self.active.iter().position(|&x| x == d),
        }
    }

    /// Nonzero-weight grid pairs carried by duplicate `d`.
    pub fn duplicate_edges(&self, d: DuplicateId) -> Vec<(usize, usize)> {
        self.shape
            .duplicate_pairs(d)
            .into_iter()
            .filter(|&((u, v), _)| self.base.weight_ref(u, v).is_some())
            .map(|(_, grid)| grid)
            .collect()
    }

    /// Clustering of the base graph read off duplicate `d`: base node `j` takes
    /// the label of grid node `((d.start + j*d.slope) mod N, j)`.
    pub fn induced_clustering(&self, c: &Clustering, d: DuplicateId) -> Result<Clustering> {
        if c.len() != self.shape.grid_size() {
            return Err(Error::ClusteringMismatch {
                expected: self.shape.grid_size(),
                got: c.len(),
            });
        }
        if !self.is_active(d) {
            return Err(Error::InactiveDuplicate {
                start: d.start,
                slope: d.slope,
            });
        }
        let labels: Vec<usize> = (0..self.shape.n)
            .map(|j| c.label(self.shape.index(d.node(self.shape.rows, j))))
            .collect();
        Ok(Clustering::new(&labels))
    }

    /// Replaces the active list without touching the weighted graph. Only
    /// meant for building corrupted fixtures that the verification suite must
    /// reject.
    #[doc(hidden)]
    pub fn with_active(mut self, active: Vec<DuplicateId>) -> Self {
        self.active = active;
        self
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{clustering_value, ObjectiveKind};
    use crate::weight::int;

    fn gn(row: usize, col: usize) -> GridNode {
        GridNode::new(row, col)
    }

    #[test]
    fn distance_examples() {
        assert_eq!(vertical_distance(gn(0, 0), gn(2, 1), 5), Some(2));
        assert_eq!(vertical_distance(gn(3, 2), gn(1, 1), 5), None);
        assert_eq!(vertical_distance(gn(4, 0), gn(1, 2), 5), Some(2));
    }

    #[test]
    fn bone_examples() {
        let s = RollShape::new(3, 5).unwrap();
        assert!(is_grid_bone(gn(0, 0), gn(2, 1), &s));
        assert!(is_grid_bone(gn(2, 1), gn(0, 0), &s));
        assert!(!is_grid_bone(gn(0, 0), gn(1, 2), &s));
        assert!(!is_grid_bone(gn(0, 1), gn(3, 1), &s));
    }

    #[test]
    fn duplicate_examples() {
        let s = RollShape::new(3, 5).unwrap();
        assert_eq!(
            duplicate_of(gn(0, 0), gn(2, 1), &s).unwrap(),
            DuplicateId::new(0, 2)
        );
        assert_eq!(
            duplicate_of(gn(1, 1), gn(1, 2), &s).unwrap(),
            DuplicateId::new(1, 0)
        );
        assert!(matches!(
            duplicate_of(gn(0, 0), gn(1, 2), &s),
            Err(Error::NotGridBone { .. })
        ));
    }

    #[test]
    fn roll_sizes() {
        assert_eq!(valid_roll_size(3, 0).unwrap(), 3);
        assert_eq!(valid_roll_size(4, 0).unwrap(), 4);
        assert_eq!(valid_roll_size(3, 1).unwrap(), 9);
        for n in 3..10 {
            for t in 0..4 {
                let rows = valid_roll_size(n, t).unwrap();
                let s = RollShape::new(n, rows).unwrap();
                assert!(s.kept_count().is_some());
            }
        }
    }

    #[test]
    fn shape_counts() {
        let s = RollShape::new(3, 5).unwrap();
        assert_eq!(s.duplicate_count(), 15);
        assert_eq!(s.kept_count(), None);
        let s = RollShape::new(3, 3).unwrap();
        assert_eq!(s.duplicate_count(), 6);
        assert_eq!(s.kept_count(), Some(3));
        assert!(RollShape::new(3, 4).is_err());
        assert!(RollShape::new(1, 4).is_err());
    }

    #[test]
    fn build_rejects_bad_sizes() {
        let g = SignedGraph::new(3);
        assert!(build_roll(&g, 5, Execution::Sequential).is_err());
        assert!(build_roll(&g, 4, Execution::Sequential).is_err());
    }

    #[test]
    fn empty_base_rolls_to_empty() {
        let r = build_roll(&SignedGraph::new(3), 9, Execution::Sequential).unwrap();
        assert_eq!(r.graph().edge_count(), 0);
        assert_eq!(r.graph().node_count(), 27);
        assert_eq!(r.active().len(), 27);
    }

    #[test]
    fn exhaustive_bones_partition_small_roll() {
        let s = RollShape::new(3, 3).unwrap();
        let mut seen: HashMap<DuplicateId, usize> = HashMap::new();
        let mut bones = 0;
        for x in 0..s.grid_size() {
            for y in x + 1..s.grid_size() {
                let (a, b) = (s.node_at(x), s.node_at(y));
                if is_grid_bone(a, b, &s) {
                    bones += 1;
                    let d = duplicate_of(a, b, &s).unwrap();
                    assert!(s.duplicate_pairs(d).iter().any(|&(_, g)| g == (x, y)));
                    *seen.entry(d).or_default() += 1;
                }
            }
        }
        assert_eq!(seen.len(), 6);
        assert!(seen.values().all(|&k| k == 3));
        assert_eq!(bones, 18);
    }

    #[test]
    fn induced_clustering_round_trip() {
        let g = SignedGraph::from_edges(3, [(0, 1, int(1)), (1, 2, int(-1))]).unwrap();
        let r = build_roll(&g, 3, Execution::Sequential).unwrap();
        let one = Clustering::single(9);
        let all = Clustering::singletons(9);
        for &d in r.active() {
            assert_eq!(
                r.induced_clustering(&one, d).unwrap(),
                Clustering::single(3)
            );
            assert_eq!(
                r.induced_clustering(&all, d).unwrap(),
                Clustering::singletons(3)
            );
        }
        let inactive = DuplicateId::new(0, 1);
        assert!(!r.is_active(inactive));
        assert!(matches!(
            r.induced_clustering(&one, inactive),
            Err(Error::InactiveDuplicate { start: 0, slope: 1 })
        ));
    }

    #[test]
    fn rolled_value_decomposes_over_duplicates() {
        let g =
            SignedGraph::from_edges(3, [(0, 1, int(1)), (1, 2, int(-1)), (0, 2, int(1))]).unwrap();
        let r = build_roll(&g, 9, Execution::Parallel).unwrap();
        let labels: Vec<usize> = (0..27).map(|i| (i * 7 + i / 3) % 4).collect();
        let c = Clustering::new(&labels);
        for obj in [ObjectiveKind::MaxAgree, ObjectiveKind::MinDisagree] {
            let total = clustering_value(r.graph(), &c, obj).unwrap();
            let parts: crate::Weight = r
                .active()
                .iter()
                .map(|&d| clustering_value(&g, &r.induced_clustering(&c, d).unwrap(), obj).unwrap())
                .sum();
            assert_eq!(total, parts);
        }
    }
}
