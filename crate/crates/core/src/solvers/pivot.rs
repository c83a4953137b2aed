use num_traits::{One, Signed};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::SignedGraph;
use crate::weight::Weight;

pub(crate) fn check_complete_signed(g: &SignedGraph) -> Result<()> {
    let n = g.node_count();
    let pairs = n * n.saturating_sub(1) / 2;
    if g.edge_count() != pairs {
        return Err(Error::NotCompleteSigned(format!(
            "{} of {pairs} pairs carry a weight",
            g.edge_count()
        )));
    }
    if let Some((u, v, _)) = g.edges().find(|(_, _, w)| w.abs() != Weight::one()) {
        return Err(Error::NotCompleteSigned(format!(
            "pair ({u}, {v}) is not +1 or -1"
        )));
    }
    Ok(())
}

/// Visits nodes in a seeded random order; each still-unclustered node opens a
/// cluster holding itself and its unclustered `+1` neighbours.
pub(crate) fn pivot_labels(g: &SignedGraph, seed: u64) -> Result<Vec<usize>> {
    check_complete_signed(g)?;
    let n = g.node_count();
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));

    let mut labels = vec![usize::MAX; n];
    let mut next = 0;
    for &p in &order {
        if labels[p] != usize::MAX {
            continue;
        }
        labels[p] = next;
        for (v, label) in labels.iter_mut().enumerate() {
            if *label == usize::MAX && g.weight_ref(p, v).is_some_and(|w| w.is_one()) {
                *label = next;
            }
        }
        next += 1;
    }
    Ok(labels)
}
