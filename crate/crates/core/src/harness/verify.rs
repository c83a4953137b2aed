//! Invariant suites over generated instances.
//!
//! Each check is a pure function of its instance and seed that reports
//! `Err(detail)` on the first violation it finds; [`verify_all`] tallies them
//! per check name.

use std::collections::{BTreeMap, HashMap};

use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::gen::{generate, GenModel, GenSpec};
use crate::exec::Execution;
use crate::graph::{clustering_value, contributing_edges, Clustering, ObjectiveKind, SignedGraph};
use crate::roll::{
    build_roll, duplicate_of, is_grid_bone, valid_roll_size, RollShape, RolledGraph,
};
use crate::rounding::{edge_draw, round_graph, round_weight, RoundingParams};
use crate::seed::derive;
use crate::solvers::oracle::brute_force_optimum;
use crate::solvers::{solve_exact, solve_local_search, solve_trivial_max};
use crate::weight::{format_weight, int, ratio, to_f64, Weight};

const OBJECTIVES: [ObjectiveKind; 2] = [ObjectiveKind::MaxAgree, ObjectiveKind::MinDisagree];

type Check = std::result::Result<(), String>;

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckResult {
    pub instances_run: usize,
    pub failures: usize,
    pub worst_case_detail: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub checks: BTreeMap<String, CheckResult>,
}

impl VerifyReport {
    pub fn record(&mut self, name: &str, outcome: Check) {
        let entry = self.checks.entry(name.to_string()).or_default();
        entry.instances_run += 1;
        if let Err(detail) = outcome {
            entry.failures += 1;
            entry.worst_case_detail.get_or_insert(detail);
        }
    }

    pub fn failures(&self) -> usize {
        self.checks.values().map(|c| c.failures).sum()
    }

    pub fn passed(&self) -> bool {
        self.failures() == 0
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyOptions {
    pub seed: u64,
    pub sizes: Vec<usize>,
    pub ts: Vec<usize>,
    /// Random instances per `(n, t)`, in addition to one zero-edge graph.
    pub instances: usize,
    /// Random clusterings of the roll per instance.
    pub clusterings: usize,
    /// Samples per rounding distribution in the unbiasedness check.
    pub rounding_samples: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            seed: 0,
            sizes: vec![3, 4, 5],
            ts: vec![0, 1],
            instances: 4,
            clusterings: 4,
            rounding_samples: 20_000,
        }
    }
}

/// Untrimmed duplicate count against an enumeration of all grid-bones.
pub fn check_duplicate_count(n: usize, rows: usize) -> Check {
    let shape = RollShape::new(n, rows).map_err(|e| e.to_string())?;
    let mut bones = 0usize;
    let mut seen = std::collections::HashSet::new();
    for x in 0..shape.grid_size() {
        for y in x + 1..shape.grid_size() {
            let (a, b) = (shape.node_at(x), shape.node_at(y));
            if is_grid_bone(a, b, &shape) {
                bones += 1;
                seen.insert(duplicate_of(a, b, &shape).map_err(|e| e.to_string())?);
            }
        }
    }
    let per = n * (n - 1) / 2;
    let expected = rows * ((rows - 1) / (n - 1) + 1);
    if shape.duplicate_count() != expected || seen.len() != expected || bones != expected * per {
        return Err(format!(
            "n={n} N={rows}: formula {expected}, shape {}, distinct {}, bones {bones}",
            shape.duplicate_count(),
            seen.len()
        ));
    }
    if expected * n <= rows * rows {
        return Err(format!(
            "n={n} N={rows}: {expected} duplicates do not exceed N^2/n"
        ));
    }
    Ok(())
}

/// Every grid-bone is indexed under the duplicate that contains it, and
/// nothing else is indexed.
pub fn check_bone_partition(roll: &RolledGraph) -> Check {
    let shape = roll.shape();
    let index = roll.bone_index();
    let mut bones = 0;
    for x in 0..shape.grid_size() {
        for y in x + 1..shape.grid_size() {
            let (a, b) = (shape.node_at(x), shape.node_at(y));
            match (is_grid_bone(a, b, shape), index.get(&(x, y))) {
                (true, Some(&d)) => {
                    bones += 1;
                    let owner = duplicate_of(a, b, shape).map_err(|e| e.to_string())?;
                    if owner != d || !shape.duplicate_pairs(d).iter().any(|&(_, p)| p == (x, y)) {
                        return Err(format!(
                            "bone ({x},{y}) indexed under {d:?}, owner {owner:?}"
                        ));
                    }
                }
                (true, None) => return Err(format!("bone ({x},{y}) missing from the index")),
                (false, Some(_)) => return Err(format!("non-bone ({x},{y}) is indexed")),
                (false, None) => {}
            }
        }
    }
    let expected = shape.duplicate_count() * shape.n() * (shape.n() - 1) / 2;
    if bones != expected || index.len() != expected {
        return Err(format!(
            "{bones} bones, {} indexed, expected {expected}",
            index.len()
        ));
    }
    Ok(())
}

/// Each kept duplicate carries exactly the base weights at its grid pairs.
pub fn check_isomorphism(roll: &RolledGraph) -> Check {
    let shape = roll.shape();
    for &d in roll.active() {
        for ((u, v), (a, b)) in shape.duplicate_pairs(d) {
            let base = roll.base().weight(u, v);
            let rolled = roll.graph().weight(a, b);
            if base != rolled {
                return Err(format!(
                    "duplicate {d:?}: base ({u},{v}) = {} but grid ({a},{b}) = {}",
                    format_weight(&base),
                    format_weight(&rolled)
                ));
            }
        }
    }
    Ok(())
}

/// Kept duplicates' edge sets are pairwise disjoint and cover every
/// nonzero-weight pair of the roll.
pub fn check_edge_disjointness(roll: &RolledGraph) -> Check {
    let mut owner: HashMap<(usize, usize), usize> = HashMap::new();
    for (i, &d) in roll.active().iter().enumerate() {
        for e in roll.duplicate_edges(d) {
            if let Some(prev) = owner.insert(e, i) {
                return Err(format!(
                    "pair {e:?} shared by active duplicates {prev} and {i}"
                ));
            }
        }
    }
    if owner.len() != roll.graph().edge_count() {
        return Err(format!(
            "active duplicates carry {} pairs, roll has {} edges",
            owner.len(),
            roll.graph().edge_count()
        ));
    }
    if let Some((u, v, _)) = roll
        .graph()
        .edges()
        .find(|(u, v, _)| !owner.contains_key(&(*u, *v)))
    {
        return Err(format!("edge ({u},{v}) not covered by an active duplicate"));
    }
    Ok(())
}

/// The roll's value of `c` equals the sum of its induced candidates' values,
/// and each candidate's value equals `c` restricted to that duplicate's pairs.
pub fn check_candidate_decomposition(
    roll: &RolledGraph,
    c: &Clustering,
    obj: ObjectiveKind,
) -> Check {
    let e = |x: crate::Error| x.to_string();
    let total = clustering_value(roll.graph(), c, obj).map_err(e)?;
    let mut sum = Weight::zero();
    for &d in roll.active() {
        let induced = roll.induced_clustering(c, d).map_err(e)?;
        let candidate = clustering_value(roll.base(), &induced, obj).map_err(e)?;
        let restricted: Weight = roll
            .duplicate_edges(d)
            .into_iter()
            .map(|(a, b)| roll.graph().weight(a, b))
            .zip(roll.duplicate_edges(d))
            .filter(|(w, (a, b))| obj.contributes(w, c.same_cluster(*a, *b)))
            .map(|(w, _)| w.abs())
            .sum();
        if candidate != restricted {
            return Err(format!(
                "{obj}: duplicate {d:?} candidate {} vs restricted {}",
                format_weight(&candidate),
                format_weight(&restricted)
            ));
        }
        sum += candidate;
    }
    if sum != total {
        return Err(format!(
            "{obj}: roll value {} but candidates sum to {}",
            format_weight(&total),
            format_weight(&sum)
        ));
    }
    Ok(())
}

/// Rounded weights stay in `{-alpha, 0, beta}` with the original sign or zero,
/// and `c`'s rounded value is a sum over its pre-rounding contributing pairs.
pub fn check_rounding_support(
    g: &SignedGraph,
    c: &Clustering,
    p: &RoundingParams,
    obj: ObjectiveKind,
) -> Check {
    let e = |x: crate::Error| x.to_string();
    let out = round_graph(g, p, Execution::Sequential).map_err(e)?;
    for (u, v, w) in out.after.edges() {
        let ok_value = *w == -p.alpha().clone() || w == p.beta();
        if !ok_value || w.signum() != g.weight(u, v).signum() {
            return Err(format!("pair ({u},{v}) rounded to {}", format_weight(w)));
        }
    }
    let pre = contributing_edges(&out.before, c, obj).map_err(e)?;
    let post = contributing_edges(&out.after, c, obj).map_err(e)?;
    if !post.is_subset(&pre) {
        return Err(format!("{obj}: a pair contributes only after rounding"));
    }
    let direct = clustering_value(&out.after, c, obj).map_err(e)?;
    let via_pre: Weight = pre.iter().map(|&(u, v)| out.after.weight(u, v).abs()).sum();
    if direct != via_pre {
        return Err(format!(
            "{obj}: rounded value {} vs {} over the pre-rounding set",
            format_weight(&direct),
            format_weight(&via_pre)
        ));
    }
    Ok(())
}

fn random_clustering(n: usize, rng: &mut ChaCha8Rng) -> Clustering {
    let k = rng.random_range(1..=n.max(1) + 1);
    let labels: Vec<usize> = (0..n).map(|_| rng.random_range(0..k)).collect();
    Clustering::new(&labels)
}

fn instance(n: usize, idx: usize, seed: u64) -> SignedGraph {
    if idx == 0 {
        return SignedGraph::new(n);
    }
    let model = match idx % 3 {
        0 => GenModel::PlantedPartition {
            k: (idx % n).max(1),
            flip_prob: 0.2,
        },
        1 => GenModel::UniformRational {
            density: 0.8,
            denominator_bound: 6,
        },
        _ => GenModel::CompleteSigned { plus_prob: 0.5 },
    };
    generate(&GenSpec { n, model, seed }).expect("valid generator spec")
}

/// Structural, decomposition and rounding checks for one base graph rolled
/// with parameter `t`.
pub fn verify_instance(
    g: &SignedGraph,
    t: usize,
    seed: u64,
    clusterings: usize,
) -> Vec<(&'static str, Check)> {
    let mut out = Vec::new();
    let rows = match valid_roll_size(g.node_count(), t) {
        Ok(r) => r,
        Err(e) => return vec![("roll_construction", Err(e.to_string()))],
    };
    let roll = match build_roll(g, rows, Execution::Sequential) {
        Ok(r) => r,
        Err(e) => return vec![("roll_construction", Err(e.to_string()))],
    };
    out.push(("bone_partition", check_bone_partition(&roll)));
    out.push(("isomorphism", check_isomorphism(&roll)));
    out.push(("edge_disjointness", check_edge_disjointness(&roll)));

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let grid = roll.shape().grid_size();
    let total = roll.graph().total_abs_weight();
    for k in 0..clusterings {
        let c = random_clustering(grid, &mut rng);
        for obj in OBJECTIVES {
            out.push((
                "candidate_decomposition",
                check_candidate_decomposition(&roll, &c, obj),
            ));
        }
        let alpha = int(1) + ratio(rng.random_range(0..3), 2);
        let beta = int(1) + ratio(rng.random_range(0..3), 2);
        let params = RoundingParams::new(alpha, beta, derive(seed, "rounding", k as u64))
            .expect("alpha, beta >= 1");
        for obj in OBJECTIVES {
            out.push((
                "rounded_value_on_contributing_set",
                check_rounding_support(roll.graph(), &c, &params, obj),
            ));
        }
        let complement = (|| -> Check {
            let a = clustering_value(roll.graph(), &c, ObjectiveKind::MaxAgree)
                .map_err(|e| e.to_string())?;
            let b = clustering_value(roll.graph(), &c, ObjectiveKind::MinDisagree)
                .map_err(|e| e.to_string())?;
            if a + b != total {
                return Err("MaxAgree + MinDisagree differs from total |w|".into());
            }
            Ok(())
        })();
        out.push(("objective_complement", complement));
    }
    out
}

/// Per-edge mean and pairwise covariance of rounded weights over
/// `samples` seeds, each within 4 standard errors of its target.
fn check_unbiased(
    gamma: &Weight,
    alpha: &Weight,
    beta: &Weight,
    samples: usize,
    seed: u64,
) -> Check {
    let target = to_f64(gamma);
    let mut xs = Vec::with_capacity(samples);
    let mut ys = Vec::with_capacity(samples);
    for s in 0..samples {
        let root = derive(seed, "unbiased", s as u64);
        xs.push(to_f64(&round_weight(
            gamma,
            alpha,
            beta,
            edge_draw(root, 0, 1),
        )));
        ys.push(to_f64(&round_weight(
            gamma,
            alpha,
            beta,
            edge_draw(root, 0, 2),
        )));
    }
    let m = samples as f64;
    let mean = xs.iter().sum::<f64>() / m;
    let sd = (xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (m - 1.0)).sqrt();
    let se = sd / m.sqrt();
    if (mean - target).abs() > 4.0 * se + f64::EPSILON {
        return Err(format!(
            "gamma {target}: mean {mean} is {:.2} SE off",
            (mean - target).abs() / se
        ));
    }
    let mean_y = ys.iter().sum::<f64>() / m;
    let prods: Vec<f64> = xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| (x - mean) * (y - mean_y))
        .collect();
    let cov = prods.iter().sum::<f64>() / m;
    let cov_sd = (prods.iter().map(|p| (p - cov).powi(2)).sum::<f64>() / (m - 1.0)).sqrt();
    if cov.abs() > 4.0 * cov_sd / m.sqrt() + f64::EPSILON {
        return Err(format!(
            "gamma {target}: covariance {cov} of distinct pairs"
        ));
    }
    Ok(())
}

/// Runs every suite. A correct build reports zero failures.
pub fn verify_all(opts: &VerifyOptions, exec: Execution) -> VerifyReport {
    let mut report = VerifyReport::default();

    for &n in &opts.sizes {
        for &t in &opts.ts {
            let outcome = valid_roll_size(n, t)
                .map_err(|e| e.to_string())
                .and_then(|rows| check_duplicate_count(n, rows));
            report.record("duplicate_count", outcome);
        }
    }

    let jobs: Vec<(usize, usize, usize)> = opts
        .sizes
        .iter()
        .flat_map(|&n| {
            opts.ts
                .iter()
                .flat_map(move |&t| (0..=opts.instances).map(move |i| (n, t, i)))
        })
        .collect();
    let results = exec.map_slice(&jobs, |&(n, t, i)| {
        let seed = derive(opts.seed, "instance", (n * 1000 + t * 100 + i) as u64);
        verify_instance(&instance(n, i, seed), t, seed, opts.clusterings)
    });
    for (name, outcome) in results.into_iter().flatten() {
        report.record(name, outcome);
    }

    let distributions = [
        (ratio(1, 2), int(1), int(2)),
        (ratio(-1, 3), int(2), int(1)),
        (int(1), int(1), int(1)),
        (ratio(1, 3), ratio(3, 2), int(1)),
    ];
    let unbiased = exec.map_slice(&distributions, |(g, a, b)| {
        check_unbiased(
            g,
            a,
            b,
            opts.rounding_samples,
            derive(opts.seed, "unbiased-root", 0),
        )
    });
    for outcome in unbiased {
        report.record("rounding_unbiased", outcome);
    }

    let small: Vec<(usize, usize)> = opts
        .sizes
        .iter()
        .filter(|&&n| n <= 6)
        .flat_map(|&n| (1..=opts.instances.max(1) * 3).map(move |i| (n, i)))
        .collect();
    let solver_results = exec.map_slice(&small, |&(n, i)| {
        let seed = derive(opts.seed, "solver-instance", (n * 1000 + i) as u64);
        let g = instance(n, i, seed);
        let mut out: Vec<(&'static str, Check)> = Vec::new();
        for obj in OBJECTIVES {
            let check = (|| -> Check {
                let a = solve_exact(&g, obj).map_err(|e| e.to_string())?;
                let b = brute_force_optimum(&g, obj).map_err(|e| e.to_string())?;
                if a.value != b {
                    return Err(format!(
                        "{obj}: enumeration {} vs oracle {}",
                        format_weight(&a.value),
                        format_weight(&b)
                    ));
                }
                if clustering_value(&g, &a.clustering, obj).ok() != Some(a.value.clone()) {
                    return Err("reported value differs from its clustering".into());
                }
                Ok(())
            })();
            out.push(("exact_oracle_agreement", check));
        }
        let trivial = (|| -> Check {
            let tr = solve_trivial_max(&g).map_err(|e| e.to_string())?.value;
            let opt = solve_exact(&g, ObjectiveKind::MaxAgree)
                .map_err(|e| e.to_string())?
                .value;
            let total = g.total_abs_weight();
            if int(2) * &tr < total || total < opt {
                return Err(format!(
                    "trivial {} total {} opt {}",
                    format_weight(&tr),
                    format_weight(&total),
                    format_weight(&opt)
                ));
            }
            let ls = solve_local_search(&g, ObjectiveKind::MaxAgree, seed, 1000)
                .map_err(|e| e.to_string())?;
            if ls.value > opt || ls.value < tr {
                return Err(format!(
                    "local search {} outside [{}, {}]",
                    format_weight(&ls.value),
                    format_weight(&tr),
                    format_weight(&opt)
                ));
            }
            Ok(())
        })();
        out.push(("solver_bounds", trivial));
        out
    });
    for (name, outcome) in solver_results.into_iter().flatten() {
        report.record(name, outcome);
    }
    report
}
