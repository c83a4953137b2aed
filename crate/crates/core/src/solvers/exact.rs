//! Exact maximization of the signed weight inside clusters.
//!
//! Graphs with at most [`EXACT_NODE_LIMIT`] nodes are solved by enumerating
//! every set partition as a restricted-growth string; ties keep the first
//! string in lexicographic order. Larger graphs are split into connected
//! components, and components too large to enumerate go through a
//! branch-and-bound search seeded with a local-search incumbent.

use super::local::local_search_labels;
use super::scaled::ScaledGraph;
use crate::error::{Error, Result};

pub const EXACT_NODE_LIMIT: usize = 13;
/// Largest connected component the branch-and-bound search accepts.
pub const BRANCH_AND_BOUND_LIMIT: usize = 48;

/// Returns optimal labels (not canonicalized).
pub(crate) fn exact_labels(g: &ScaledGraph) -> Result<Vec<usize>> {
    if g.n <= EXACT_NODE_LIMIT {
        return Ok(enumerate_rgs(g));
    }
    let mut labels = vec![0; g.n];
    let mut next = 0;
    for comp in g.components() {
        let sub = g.induced(&comp);
        let sub_labels = if comp.len() <= EXACT_NODE_LIMIT {
            enumerate_rgs(&sub)
        } else if comp.len() <= BRANCH_AND_BOUND_LIMIT {
            branch_and_bound(&sub)
        } else {
            return Err(Error::TooLargeForExact {
                nodes: comp.len(),
                limit: BRANCH_AND_BOUND_LIMIT,
            });
        };
        let k = sub_labels.iter().max().map_or(0, |m| m + 1);
        for (&v, l) in comp.iter().zip(sub_labels) {
            labels[v] = next + l;
        }
        next += k;
    }
    Ok(labels)
}

/// Weights from each node to earlier nodes.
fn back_edges(g: &ScaledGraph) -> Vec<Vec<(usize, i128)>> {
    (0..g.n)
        .map(|k| g.adj[k].iter().copied().filter(|&(j, _)| j < k).collect())
        .collect()
}

pub(crate) fn enumerate_rgs(g: &ScaledGraph) -> Vec<usize> {
    struct Search<'a> {
        back: &'a [Vec<(usize, i128)>],
        labels: Vec<usize>,
        best: Option<(i128, Vec<usize>)>,
    }

    impl Search<'_> {
        fn go(&mut self, k: usize, clusters: usize, value: i128) {
            if k == self.labels.len() {
                if self.best.as_ref().is_none_or(|(b, _)| value > *b) {
                    self.best = Some((value, self.labels.clone()));
                }
                return;
            }
            let mut sums = [0i128; EXACT_NODE_LIMIT + 1];
            for &(j, w) in &self.back[k] {
                sums[self.labels[j]] += w;
            }
            for (l, &gain) in sums.iter().enumerate().take(clusters + 1) {
                self.labels[k] = l;
                let grown = if l == clusters {
                    clusters + 1
                } else {
                    clusters
                };
                self.go(k + 1, grown, value + gain);
            }
        }
    }

    assert!(g.n <= EXACT_NODE_LIMIT);
    let back = back_edges(g);
    let mut s = Search {
        back: &back,
        labels: vec![0; g.n],
        best: None,
    };
    if g.n == 0 {
        return Vec::new();
    }
    s.go(0, 0, 0);
    s.best.map(|(_, l)| l).unwrap_or_default()
}

/// Depth-first search over cluster assignments in a connectivity-first node
/// order. The bound lets every unassigned node join its best current cluster
/// independently and counts every positive pair among unassigned nodes.
pub(crate) fn branch_and_bound(g: &ScaledGraph) -> Vec<usize> {
    let n = g.n;
    let order = search_order(g);
    let mut rank = vec![0; n];
    for (i, &v) in order.iter().enumerate() {
        rank[v] = i;
    }

    let incumbent = local_search_labels(g, usize::MAX);
    let best_value = g.intra(&incumbent);

    struct State<'a> {
        g: &'a ScaledGraph,
        order: &'a [usize],
        rank: &'a [usize],
        labels: Vec<usize>,
        // sums[v][l]: weight from unassigned v to assigned members of cluster l
        sums: Vec<Vec<i128>>,
        positive_free: i128,
        best_value: i128,
        best: Vec<usize>,
    }

    impl State<'_> {
        fn bound(&self, depth: usize, clusters: usize, value: i128) -> i128 {
            let mut b = value + self.positive_free;
            for &v in &self.order[depth..] {
                let best = self.sums[v][..clusters].iter().copied().max().unwrap_or(0);
                b += best.max(0);
            }
            b
        }

        fn go(&mut self, depth: usize, clusters: usize, value: i128) {
            if depth == self.order.len() {
                if value > self.best_value {
                    self.best_value = value;
                    self.best = self.labels.clone();
                }
                return;
            }
            if self.bound(depth, clusters, value) <= self.best_value {
                return;
            }
            let v = self.order[depth];
            let mut choices: Vec<(i128, usize)> = (0..=clusters)
                .map(|l| (self.sums[v].get(l).copied().unwrap_or(0), l))
                .collect();
            choices[clusters].0 = 0;
            choices.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));

            let freed: i128 = self.g.adj[v]
                .iter()
                .filter(|&&(x, w)| self.rank[x] > depth && w > 0)
                .map(|&(_, w)| w)
                .sum();
            self.positive_free -= freed;
            for (gain, l) in choices {
                self.labels[v] = l;
                for &(x, w) in &self.g.adj[v] {
                    if self.rank[x] > depth {
                        self.sums[x][l] += w;
                    }
                }
                let grown = if l == clusters {
                    clusters + 1
                } else {
                    clusters
                };
                self.go(depth + 1, grown, value + gain);
                for &(x, w) in &self.g.adj[v] {
                    if self.rank[x] > depth {
                        self.sums[x][l] -= w;
                    }
                }
            }
            self.positive_free += freed;
        }
    }

    let positive_free = g
        .adj
        .iter()
        .enumerate()
        .flat_map(|(u, nb)| nb.iter().filter(move |&&(v, w)| u < v && w > 0))
        .map(|&(_, w)| w)
        .sum();
    let mut s = State {
        g,
        order: &order,
        rank: &rank,
        labels: vec![0; n],
        sums: vec![vec![0; n + 1]; n],
        positive_free,
        best_value,
        best: incumbent,
    };
    s.go(0, 0, 0);
    s.best
}

/// Highest-degree node first, then repeatedly the node most strongly tied to
/// the nodes already ordered.
fn search_order(g: &ScaledGraph) -> Vec<usize> {
    let n = g.n;
    let mut placed = vec![false; n];
    let mut tie = vec![0i128; n];
    let strength: Vec<i128> = g
        .adj
        .iter()
        .map(|nb| nb.iter().map(|&(_, w)| w.abs()).sum())
        .collect();
    let mut order = Vec::with_capacity(n);
    for _ in 0..n {
        let v = (0..n)
            .filter(|&v| !placed[v])
            .max_by(|&a, &b| {
                tie[a]
                    .cmp(&tie[b])
                    .then(strength[a].cmp(&strength[b]))
                    .then(b.cmp(&a))
            })
            .expect("unplaced node");
        placed[v] = true;
        order.push(v);
        for &(x, w) in &g.adj[v] {
            tie[x] += w.abs();
        }
    }
    order
}
