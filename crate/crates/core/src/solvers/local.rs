use super::scaled::ScaledGraph;

/// One-cluster when the total signed weight is positive, else singletons.
pub(crate) fn trivial_labels(g: &ScaledGraph) -> Vec<usize> {
    let total: i128 = g
        .adj
        .iter()
        .enumerate()
        .flat_map(|(u, nb)| nb.iter().filter(move |&&(v, _)| u < v))
        .map(|&(_, w)| w)
        .sum();
    if total > 0 {
        vec![0; g.n]
    } else {
        (0..g.n).collect()
    }
}

fn canonicalize(labels: &mut [usize]) -> usize {
    let mut remap = vec![usize::MAX; labels.len() + 1];
    let mut next = 0;
    for l in labels.iter_mut() {
        if remap[*l] == usize::MAX {
            remap[*l] = next;
            next += 1;
        }
        *l = remap[*l];
    }
    next
}

/// Best-improvement single-node moves from the trivial start, at most `budget`
/// moves. Ties go to the lowest node, then the lowest target label; a new
/// singleton has the highest label.
pub(crate) fn local_search_labels(g: &ScaledGraph, budget: usize) -> Vec<usize> {
    let n = g.n;
    let mut labels = trivial_labels(g);
    let mut clusters = canonicalize(&mut labels);
    let mut sizes = vec![0usize; n + 1];
    for &l in &labels {
        sizes[l] += 1;
    }
    let mut sums = vec![0i128; n + 1];
    let mut touched = Vec::new();

    for _ in 0..budget {
        // (gain, node, target)
        let mut best: Option<(i128, usize, usize)> = None;
        for v in 0..n {
            for &(x, w) in &g.adj[v] {
                let l = labels[x];
                if sums[l] == 0 {
                    touched.push(l);
                }
                sums[l] += w;
            }
            let own = sums[labels[v]];
            let mut consider = |gain: i128, target: usize| {
                if gain > 0 && best.is_none_or(|(b, _, _)| gain > b) {
                    best = Some((gain, v, target));
                }
            };
            for (l, &s) in sums.iter().enumerate().take(clusters) {
                if l != labels[v] {
                    consider(s - own, l);
                }
            }
            if sizes[labels[v]] > 1 {
                consider(-own, clusters);
            }
            for l in touched.drain(..) {
                sums[l] = 0;
            }
            sums[labels[v]] = 0;
        }
        let Some((_, v, target)) = best else {
            break;
        };
        labels[v] = target;
        clusters = canonicalize(&mut labels);
        sizes.iter_mut().for_each(|s| *s = 0);
        for &l in &labels {
            sizes[l] += 1;
        }
    }
    labels
}
