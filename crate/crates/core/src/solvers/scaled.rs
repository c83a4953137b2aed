//! Integer view of a rational graph used by the solvers' inner loops.
//!
//! Every weight is multiplied by the lcm of all denominators. Both objectives
//! order clusterings the same way as the signed weight inside clusters,
//! `sum over same-cluster pairs of w`:
//! MaxAgree = (that sum) + (total negative |w|), MinDisagree = total |w| - MaxAgree.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive};

use crate::error::{Error, Result};
use crate::graph::SignedGraph;

#[derive(Debug, Clone)]
pub(crate) struct ScaledGraph {
    pub n: usize,
    pub adj: Vec<Vec<(usize, i128)>>,
}

impl ScaledGraph {
    pub fn new(g: &SignedGraph) -> Result<Self> {
        let lcm = g
            .edges()
            .fold(BigInt::one(), |acc, (_, _, w)| acc.lcm(w.denom()));
        let mut adj = vec![Vec::new(); g.node_count()];
        let mut total = BigInt::from(0);
        for (u, v, w) in g.edges() {
            let scaled = w.numer() * (&lcm / w.denom());
            total += scaled.abs();
            let x = scaled.to_i128().ok_or(Error::WeightOverflow)?;
            adj[u].push((v, x));
            adj[v].push((u, x));
        }
        // headroom for partial sums of either sign
        if total.to_i128().is_none_or(|t| t > i128::MAX / 4) {
            return Err(Error::WeightOverflow);
        }
        Ok(Self {
            n: g.node_count(),
            adj,
        })
    }

    /// Signed weight inside clusters for `labels`.
    pub fn intra(&self, labels: &[usize]) -> i128 {
        let mut s = 0;
        for (u, nb) in self.adj.iter().enumerate() {
            for &(v, w) in nb {
                if u < v && labels[u] == labels[v] {
                    s += w;
                }
            }
        }
        s
    }

    /// Connected components of the nonzero-weight graph, each sorted.
    pub fn components(&self) -> Vec<Vec<usize>> {
        let mut seen = vec![false; self.n];
        let mut out = Vec::new();
        for s in 0..self.n {
            if seen[s] {
                continue;
            }
            seen[s] = true;
            let mut comp = vec![s];
            let mut i = 0;
            while i < comp.len() {
                for &(v, _) in &self.adj[comp[i]] {
                    if !seen[v] {
                        seen[v] = true;
                        comp.push(v);
                    }
                }
                i += 1;
            }
            comp.sort_unstable();
            out.push(comp);
        }
        out
    }

    /// Subgraph induced by `nodes`, reindexed `0..nodes.len()`.
    pub fn induced(&self, nodes: &[usize]) -> Self {
        let mut pos = vec![usize::MAX; self.n];
        for (i, &v) in nodes.iter().enumerate() {
            pos[v] = i;
        }
        let adj = nodes
            .iter()
            .map(|&v| {
                self.adj[v]
                    .iter()
                    .filter(|&&(x, _)| pos[x] != usize::MAX)
                    .map(|&(x, w)| (pos[x], w))
                    .collect()
            })
            .collect();
        Self {
            n: nodes.len(),
            adj,
        }
    }
}
