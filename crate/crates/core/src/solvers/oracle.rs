//! Independent exact optimum for cross-checking the enumeration solver.
//!
//! Partitions are generated as lists of bitmask blocks (the block holding the
//! lowest remaining element is chosen by iterating submasks of the rest), and
//! each partition is scored with [`clustering_value`] on the rational weights.
//! It shares no code path with the restricted-growth enumeration.

use crate::error::{Error, Result};
use crate::graph::{clustering_value, Clustering, ObjectiveKind, SignedGraph};
use crate::weight::Weight;

pub const ORACLE_NODE_LIMIT: usize = 10;

/// Every set partition of `0..n`.
pub fn all_partitions(n: usize) -> Vec<Clustering> {
    fn rec(rest: u32, blocks: &mut Vec<u32>, n: usize, out: &mut Vec<Clustering>) {
        if rest == 0 {
            let mut labels = vec![0; n];
            for (b, mask) in blocks.iter().enumerate() {
                for (v, l) in labels.iter_mut().enumerate() {
                    if mask >> v & 1 == 1 {
                        *l = b;
                    }
                }
            }
            out.push(Clustering::new(&labels));
            return;
        }
        let low = rest & rest.wrapping_neg();
        let others = rest & !low;
        let mut sub = others;
        loop {
            blocks.push(low | sub);
            rec(others & !sub, blocks, n, out);
            blocks.pop();
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & others;
        }
    }

    let mut out = Vec::new();
    let full = if n == 0 { 0 } else { (1u32 << n) - 1 };
    rec(full, &mut Vec::new(), n, &mut out);
    out
}

/// Optimal value of `obj` on `g` by scoring every partition.
pub fn brute_force_optimum(g: &SignedGraph, obj: ObjectiveKind) -> Result<Weight> {
    let n = g.node_count();
    if n > ORACLE_NODE_LIMIT {
        return Err(Error::TooLargeForExact {
            nodes: n,
            limit: ORACLE_NODE_LIMIT,
        });
    }
    let mut best: Option<Weight> = None;
    for c in all_partitions(n) {
        let v = clustering_value(g, &c, obj)?;
        if best.as_ref().is_none_or(|b| obj.better(&v, b)) {
            best = Some(v);
        }
    }
    Ok(best.unwrap_or_default())
}
