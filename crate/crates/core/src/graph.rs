//! Signed graphs with exact rational weights, clusterings, and the two
//! correlation clustering objectives.
//!
//! A pair that is absent from a [`SignedGraph`] has weight zero; "non-edge" and
//! "weight 0" are the same state, so any graph is treated as complete.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::weight::Weight;

/// Undirected graph on nodes `0..n` with nonzero rational edge weights.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SignedGraph {
    n: usize,
    weights: BTreeMap<(usize, usize), Weight>,
}

fn ordered(u: usize, v: usize) -> (usize, usize) {
    if u < v {
        (u, v)
    } else {
        (v, u)
    }
}

impl SignedGraph {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            weights: BTreeMap::new(),
        }
    }

    /// Builds a graph from `(u, v, w)` triples. Zero weights are accepted and
    /// dropped, but a pair may only be listed once.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, Weight)>,
    {
        let mut g = Self::new(n);
        let mut seen = BTreeSet::new();
        for (u, v, w) in edges {
            g.check_pair(u, v)?;
            if !seen.insert(ordered(u, v)) {
                let (a, b) = ordered(u, v);
                return Err(Error::DuplicatePair(a, b));
            }
            g.insert_unchecked(u, v, w);
        }
        Ok(g)
    }

    fn check_pair(&self, u: usize, v: usize) -> Result<()> {
        if u == v {
            return Err(Error::SelfLoop(u));
        }
        for node in [u, v] {
            if node >= self.n {
                return Err(Error::NodeOutOfRange { node, n: self.n });
            }
        }
        Ok(())
    }

    pub(crate) fn insert_unchecked(&mut self, u: usize, v: usize, w: Weight) {
        let key = ordered(u, v);
        if w.is_zero() {
            self.weights.remove(&key);
        } else {
            self.weights.insert(key, w);
        }
    }

    /// Sets the weight of `{u, v}`; zero erases the edge.
    pub fn set_weight(&mut self, u: usize, v: usize, w: Weight) -> Result<()> {
        self.check_pair(u, v)?;
        self.insert_unchecked(u, v, w);
        Ok(())
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    /// Number of nonzero-weight pairs.
    pub fn edge_count(&self) -> usize {
        self.weights.len()
    }

    pub fn weight(&self, u: usize, v: usize) -> Weight {
        self.weight_ref(u, v).cloned().unwrap_or_else(Weight::zero)
    }

    pub fn weight_ref(&self, u: usize, v: usize) -> Option<&Weight> {
        self.weights.get(&ordered(u, v))
    }

    /// Nonzero edges as `(u, v, w)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, &Weight)> + '_ {
        self.weights.iter().map(|(&(u, v), w)| (u, v, w))
    }

    pub fn total_abs_weight(&self) -> Weight {
        self.weights.values().map(|w| w.abs()).sum()
    }

    pub fn max_abs_weight(&self) -> Weight {
        self.weights
            .values()
            .map(|w| w.abs())
            .max()
            .unwrap_or_else(Weight::zero)
    }

    /// Distinct nonzero weight values present in the graph.
    pub fn weight_classes(&self) -> BTreeSet<Weight> {
        self.weights.values().cloned().collect()
    }

    pub fn is_normalized(&self) -> bool {
        self.max_abs_weight() <= Weight::from_integer(1.into())
    }

    fn check_clustering(&self, c: &Clustering) -> Result<()> {
        if c.len() != self.n {
            return Err(Error::ClusteringMismatch {
                expected: self.n,
                got: c.len(),
            });
        }
        Ok(())
    }
}

/// A partition of nodes `0..len` given by canonical labels: labels appear in
/// first-occurrence order, so two clusterings of the same partition compare equal.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct Clustering {
    labels: Vec<usize>,
    clusters: usize,
}

impl Clustering {
    /// Canonicalizes arbitrary labels.
    pub fn new(labels: &[usize]) -> Self {
        let mut remap = std::collections::HashMap::new();
        let labels: Vec<usize> = labels
            .iter()
            .map(|l| {
                let next = remap.len();
                *remap.entry(*l).or_insert(next)
            })
            .collect();
        Self {
            clusters: remap.len(),
            labels,
        }
    }

    pub fn single(n: usize) -> Self {
        Self {
            labels: vec![0; n],
            clusters: usize::from(n > 0),
        }
    }

    pub fn singletons(n: usize) -> Self {
        Self {
            labels: (0..n).collect(),
            clusters: n,
        }
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn label(&self, v: usize) -> usize {
        self.labels[v]
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn cluster_count(&self) -> usize {
        self.clusters
    }

    pub fn same_cluster(&self, u: usize, v: usize) -> bool {
        self.labels[u] == self.labels[v]
    }

    /// Members of each cluster, indexed by label.
    pub fn clusters(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.clusters];
        for (v, &l) in self.labels.iter().enumerate() {
            out[l].push(v);
        }
        out
    }
}

impl TryFrom<Vec<usize>> for Clustering {
    type Error = String;

    fn try_from(labels: Vec<usize>) -> std::result::Result<Self, String> {
        let c = Clustering::new(&labels);
        if c.labels != labels {
            return Err("clustering labels are not canonical".into());
        }
        Ok(c)
    }
}

impl From<Clustering> for Vec<usize> {
    fn from(c: Clustering) -> Self {
        c.labels
    }
}

impl fmt::Display for Clustering {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, l) in self.labels.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ObjectiveKind {
    /// Weight of positive pairs inside clusters plus negative pairs across clusters.
    MaxAgree,
    /// Weight of positive pairs across clusters plus negative pairs inside clusters.
    MinDisagree,
}

impl ObjectiveKind {
    /// Whether a pair of weight `w` counts toward the objective given whether
    /// its endpoints share a cluster.
    pub fn contributes(self, w: &Weight, same_cluster: bool) -> bool {
        if w.is_zero() {
            return false;
        }
        let agrees = w.is_positive() == same_cluster;
        match self {
            ObjectiveKind::MaxAgree => agrees,
            ObjectiveKind::MinDisagree => !agrees,
        }
    }

    pub fn is_max(self) -> bool {
        matches!(self, ObjectiveKind::MaxAgree)
    }

    /// `true` when `a` is strictly better than `b` under this objective.
    pub fn better(self, a: &Weight, b: &Weight) -> bool {
        match self {
            ObjectiveKind::MaxAgree => a > b,
            ObjectiveKind::MinDisagree => a < b,
        }
    }
}

impl fmt::Display for ObjectiveKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ObjectiveKind::MaxAgree => "max",
            ObjectiveKind::MinDisagree => "min",
        })
    }
}

impl FromStr for ObjectiveKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "max" | "maxagree" | "max-agree" => Ok(ObjectiveKind::MaxAgree),
            "min" | "mindisagree" | "min-disagree" => Ok(ObjectiveKind::MinDisagree),
            other => Err(format!("unknown objective {other:?} (expected max or min)")),
        }
    }
}

/// Pairs `(u, v)`, `u < v`, whose weight counts toward `obj` under `c`.
pub fn contributing_edges(
    g: &SignedGraph,
    c: &Clustering,
    obj: ObjectiveKind,
) -> Result<BTreeSet<(usize, usize)>> {
    g.check_clustering(c)?;
    Ok(g.edges()
        .filter(|&(u, v, w)| obj.contributes(w, c.same_cluster(u, v)))
        .map(|(u, v, _)| (u, v))
        .collect())
}

/// Sum of `|w|` over the contributing pairs. Non-negative for both objectives.
pub fn clustering_value(g: &SignedGraph, c: &Clustering, obj: ObjectiveKind) -> Result<Weight> {
    g.check_clustering(c)?;
    Ok(g.edges()
        .filter(|&(u, v, w)| obj.contributes(w, c.same_cluster(u, v)))
        .map(|(_, _, w)| w.abs())
        .sum())
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Normalized {
    pub graph: SignedGraph,
    /// The divisor applied, `None` when the graph had no nonzero weight and
    /// was returned unchanged.
    pub scale: Option<Weight>,
}

/// Divides every weight by the largest `|w|`, so the result has `max |w| = 1`.
pub fn normalize_weights(g: &SignedGraph) -> Normalized {
    let scale = g.max_abs_weight();
    if scale.is_zero() {
        return Normalized {
            graph: g.clone(),
            scale: None,
        };
    }
    let weights = g.weights.iter().map(|(&k, w)| (k, w / &scale)).collect();
    Normalized {
        graph: SignedGraph { n: g.n, weights },
        scale: Some(scale),
    }
}
