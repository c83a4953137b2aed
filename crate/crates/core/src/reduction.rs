//! Roll, round, solve, and read candidates back.
//!
//! [`reduce_and_solve`] builds the `N`-fold roll of a normalized graph, rounds
//! its weights, runs a solver on the rounded roll, and reads one candidate
//! clustering of the base graph off every kept duplicate. Candidates are
//! scored against the ORIGINAL base weights, not the rounded ones, and the
//! best candidate is the pipeline's answer.
//!
//! Each report carries its own accounting: the candidate values must sum to
//! the solver clustering's pre-rounding value on the roll, and its
//! post-rounding value must equal the sum of `|w'|` over the pairs that
//! contributed before rounding.

use num_traits::{Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::graph::{clustering_value, contributing_edges, Clustering, ObjectiveKind, SignedGraph};
use crate::roll::{build_roll, valid_roll_size};
use crate::rounding::{
    check_lambda, deviation_stats, hoeffding_tail, round_graph, DeviationStats, RoundingParams,
};
use crate::seed::derive;
use crate::solvers::{solve, solve_exact, SolveResult, SolverSpec};
use crate::weight::{serde_weight, serde_weight_vec, to_f64, Weight};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReductionConfig {
    pub objective: ObjectiveKind,
    /// Roll size parameter: `N = n * (1 + t*(n - 1))`.
    pub t: usize,
    pub rounding: RoundingParams,
    pub solver: SolverSpec,
    #[serde(with = "serde_weight")]
    pub epsilon: Weight,
    /// Reference approximation factor for bad-event accounting.
    #[serde(with = "serde_weight")]
    pub lambda_ref: Weight,
}

impl ReductionConfig {
    pub fn validate(&self) -> Result<()> {
        if self.epsilon <= Weight::zero() {
            return Err(Error::Config("epsilon must be positive".into()));
        }
        check_lambda(&self.lambda_ref)
    }
}

/// Clustering of the `N x n` grid putting every copy of base node `j` in the
/// cluster of `j`.
pub fn duplication_clustering(u: &Clustering, rows: usize) -> Clustering {
    let n = u.len();
    let labels: Vec<usize> = (0..rows * n).map(|x| u.label(x % n)).collect();
    Clustering::new(&labels)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ReductionReport {
    pub rows: usize,
    pub rounding_seed: u64,
    pub solver_seed: u64,
    /// Value on the base graph of the candidate read off each kept duplicate,
    /// in duplicate order.
    #[serde(with = "serde_weight_vec")]
    pub candidate_values: Vec<Weight>,
    pub best_index: usize,
    pub best: SolveResult,
    /// Solver clustering's value on the roll before rounding.
    #[serde(with = "serde_weight")]
    pub rolled_value_pre: Weight,
    /// Solver clustering's value on the rounded roll.
    #[serde(with = "serde_weight")]
    pub rolled_value_post: Weight,
    /// Sum of `|w'|` over the pairs contributing before rounding.
    #[serde(with = "serde_weight")]
    pub rolled_value_post_from_pre_set: Weight,
    pub candidates_sum_to_rolled_value: bool,
    pub post_value_uses_pre_set: bool,
    /// `(alpha + beta)^2 > N * n`, outside the weight range the reduction allows.
    pub weight_bound_exceeded: bool,
    pub stats: Option<DeviationStats>,
}

pub fn reduce_and_solve(
    g: &SignedGraph,
    cfg: &ReductionConfig,
    exec: Execution,
) -> Result<ReductionReport> {
    reduce_with_reference(g, cfg, None, exec)
}

/// Like [`reduce_and_solve`]; when a reference clustering `u` of the base graph
/// is supplied, deviation statistics of the solver clustering against the
/// duplication of `u` are attached.
pub fn reduce_with_reference(
    g: &SignedGraph,
    cfg: &ReductionConfig,
    reference: Option<&Clustering>,
    exec: Execution,
) -> Result<ReductionReport> {
    cfg.validate()?;
    let n = g.node_count();
    let obj = cfg.objective;
    let rows = valid_roll_size(n, cfg.t)?;
    let roll = build_roll(g, rows, exec)?;
    let rounded = round_graph(roll.graph(), &cfg.rounding, exec)?;
    let solved = solve(&rounded.after, obj, cfg.solver)?;
    let c2 = &solved.clustering;

    let candidates = exec.map_slice(roll.active(), |&d| -> Result<(Clustering, Weight)> {
        let c = roll.induced_clustering(c2, d)?;
        let v = clustering_value(g, &c, obj)?;
        Ok((c, v))
    });
    let candidates: Vec<(Clustering, Weight)> = candidates.into_iter().collect::<Result<_>>()?;

    let mut best_index = 0;
    for (i, (_, v)) in candidates.iter().enumerate() {
        if obj.better(v, &candidates[best_index].1) {
            best_index = i;
        }
    }
    let (best_clustering, best_value) = candidates[best_index].clone();
    let candidate_values: Vec<Weight> = candidates.into_iter().map(|(_, v)| v).collect();

    let rolled_value_pre = clustering_value(roll.graph(), c2, obj)?;
    let rolled_value_post = clustering_value(&rounded.after, c2, obj)?;
    let pre_set = contributing_edges(roll.graph(), c2, obj)?;
    let post_set = contributing_edges(&rounded.after, c2, obj)?;
    let rolled_value_post_from_pre_set: Weight = pre_set
        .iter()
        .map(|&(u, v)| rounded.after.weight(u, v).abs())
        .sum();
    let candidates_sum_to_rolled_value =
        candidate_values.iter().sum::<Weight>() == rolled_value_pre;
    let post_value_uses_pre_set =
        post_set.is_subset(&pre_set) && rolled_value_post_from_pre_set == rolled_value_post;

    let ab = cfg.rounding.alpha() + cfg.rounding.beta();
    let weight_bound_exceeded = &ab * &ab > Weight::from_integer((rows * n).into());

    let stats = reference
        .map(|u| -> Result<DeviationStats> {
            let u_n = duplication_clustering(u, rows);
            Ok(deviation_stats(&rounded, c2, &u_n, &cfg.lambda_ref, obj)?
                .with_gap_target(&cfg.epsilon))
        })
        .transpose()?;

    Ok(ReductionReport {
        rows,
        rounding_seed: cfg.rounding.seed(),
        solver_seed: cfg.solver.seed,
        candidate_values,
        best_index,
        best: SolveResult {
            clustering: best_clustering,
            value: best_value,
            objective: obj,
            solver: cfg.solver,
        },
        rolled_value_pre,
        rolled_value_post,
        rolled_value_post_from_pre_set,
        candidates_sum_to_rolled_value,
        post_value_uses_pre_set,
        weight_bound_exceeded,
        stats,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub trial: usize,
    pub rounding_seed: u64,
    pub solver_seed: u64,
    #[serde(with = "serde_weight_vec")]
    pub candidate_values: Vec<Weight>,
    pub best_index: usize,
    #[serde(with = "serde_weight")]
    pub best_value: Weight,
    #[serde(with = "serde_weight")]
    pub rolled_value_pre: Weight,
    #[serde(with = "serde_weight")]
    pub rolled_value_post: Weight,
    pub candidates_sum_to_rolled_value: bool,
    pub post_value_uses_pre_set: bool,
    /// `best / OPT`; `None` when `OPT = 0 < best`.
    pub ratio: Option<f64>,
    pub bad_event: bool,
    pub stats: Option<DeviationStats>,
    /// Hoeffding estimate for the margin exceeding its gap, summed over weight
    /// classes and the three overlap groups.
    pub hoeffding_bound: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HistogramBin {
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub min: f64,
    pub mean: f64,
    pub max: f64,
}

impl Summary {
    fn of(xs: &[f64]) -> Option<Self> {
        if xs.is_empty() {
            return None;
        }
        Some(Self {
            min: xs.iter().copied().fold(f64::INFINITY, f64::min),
            mean: xs.iter().sum::<f64>() / xs.len() as f64,
            max: xs.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub trials: usize,
    pub bad_events: usize,
    pub bad_event_freq: f64,
    pub ratio: Option<Summary>,
    pub ratio_histogram: Vec<HistogramBin>,
    /// Trials whose ratio is undefined (`OPT = 0` but a nonzero best value).
    pub ratio_undefined: usize,
    pub margin: Option<Summary>,
    pub accounting_failures: usize,
    pub mean_hoeffding_bound: Option<f64>,
    /// `ln((N n)^(N n))`, the log of the number of clusterings the union bound
    /// ranges over.
    pub log_union_factor: f64,
    /// Union-bound estimate `min(1, (N n)^(N n) * mean_hoeffding_bound)`.
    pub union_bound: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialSummary {
    pub config: ReductionConfig,
    pub rows: usize,
    #[serde(with = "serde_weight")]
    pub opt_value: Weight,
    pub opt_clustering: Clustering,
    /// The reduction's gap argument assumes an optimum of at least 1.
    pub opt_below_one: bool,
    pub records: Vec<TrialRecord>,
    pub aggregate: Aggregate,
}

const HISTOGRAM_BINS: usize = 20;

fn histogram(xs: &[f64]) -> Vec<HistogramBin> {
    let Some(s) = Summary::of(xs) else {
        return Vec::new();
    };
    if s.max == s.min {
        return vec![HistogramBin {
            lo: s.min,
            hi: s.max,
            count: xs.len(),
        }];
    }
    let width = (s.max - s.min) / HISTOGRAM_BINS as f64;
    let mut bins: Vec<HistogramBin> = (0..HISTOGRAM_BINS)
        .map(|i| HistogramBin {
            lo: s.min + width * i as f64,
            hi: if i + 1 == HISTOGRAM_BINS {
                s.max
            } else {
                s.min + width * (i + 1) as f64
            },
            count: 0,
        })
        .collect();
    for &x in xs {
        let i = (((x - s.min) / width) as usize).min(HISTOGRAM_BINS - 1);
        bins[i].count += 1;
    }
    bins
}

fn ratio_of(best: &Weight, opt: &Weight) -> Option<f64> {
    if opt.is_zero() {
        best.is_zero().then_some(1.0)
    } else {
        (best / opt).to_f64()
    }
}

/// Whether the best candidate misses a `(lambda + eps)`-approximation of `opt`.
pub fn is_bad_event(
    best: &Weight,
    opt: &Weight,
    lambda: &Weight,
    eps: &Weight,
    obj: ObjectiveKind,
) -> bool {
    let factor = lambda + eps;
    match obj {
        ObjectiveKind::MaxAgree => best * &factor < *opt,
        ObjectiveKind::MinDisagree => *best > factor * opt,
    }
}

fn hoeffding_estimate(
    stats: &DeviationStats,
    classes: usize,
    params: &RoundingParams,
) -> Option<f64> {
    let gap = stats.gap_target.as_ref()?;
    let t = gap / Weight::from_integer((3 * classes.max(1)).into());
    let total: f64 = stats
        .classes
        .iter()
        .flat_map(|c| [c.z1, c.z2, c.z3])
        .map(|z| hoeffding_tail(z as u64, &t, params.alpha(), params.beta()))
        .sum();
    Some(total.min(1.0))
}

/// Runs `trials` independent reductions of `g` and compares each best
/// candidate with the exact optimum of `g`.
///
/// Trial `i` rounds with seed `derive(root, "rounding", i)` and solves with
/// seed `derive(root, "solver", i)`, where `root` is the config's rounding
/// seed, so any single trial can be replayed.
pub fn run_trials(
    g: &SignedGraph,
    cfg: &ReductionConfig,
    trials: usize,
    exec: Execution,
) -> Result<TrialSummary> {
    if trials == 0 {
        return Err(Error::Config("at least one trial is required".into()));
    }
    cfg.validate()?;
    let obj = cfg.objective;
    let opt = solve_exact(g, obj)?;
    let rows = valid_roll_size(g.node_count(), cfg.t)?;
    let classes = g.weight_classes().len();
    let root = cfg.rounding.seed();

    let records = exec.map(trials, |i| -> Result<TrialRecord> {
        let rounding_seed = derive(root, "rounding", i as u64);
        let solver_seed = derive(root, "solver", i as u64);
        let trial_cfg = ReductionConfig {
            rounding: cfg.rounding.with_seed(rounding_seed),
            solver: cfg.solver.with_seed(solver_seed),
            ..cfg.clone()
        };
        // the report's own stages stay sequential; trials are the parallel unit
        let report =
            reduce_with_reference(g, &trial_cfg, Some(&opt.clustering), Execution::Sequential)?;
        let hoeffding_bound = report
            .stats
            .as_ref()
            .and_then(|s| hoeffding_estimate(s, classes, &trial_cfg.rounding));
        Ok(TrialRecord {
            trial: i,
            rounding_seed,
            solver_seed,
            best_index: report.best_index,
            ratio: ratio_of(&report.best.value, &opt.value),
            bad_event: is_bad_event(
                &report.best.value,
                &opt.value,
                &cfg.lambda_ref,
                &cfg.epsilon,
                obj,
            ),
            best_value: report.best.value,
            candidate_values: report.candidate_values,
            rolled_value_pre: report.rolled_value_pre,
            rolled_value_post: report.rolled_value_post,
            candidates_sum_to_rolled_value: report.candidates_sum_to_rolled_value,
            post_value_uses_pre_set: report.post_value_uses_pre_set,
            stats: report.stats,
            hoeffding_bound,
        })
    });
    let records: Vec<TrialRecord> = records.into_iter().collect::<Result<_>>()?;

    let grid = (rows * g.node_count()) as f64;
    let aggregate = aggregate(&records, grid * grid.ln());
    Ok(TrialSummary {
        config: cfg.clone(),
        rows,
        opt_below_one: opt.value < Weight::from_integer(1.into()),
        opt_value: opt.value,
        opt_clustering: opt.clustering,
        records,
        aggregate,
    })
}

/// Order-independent summary of trial records.
pub fn aggregate(records: &[TrialRecord], log_union_factor: f64) -> Aggregate {
    let mut sorted: Vec<&TrialRecord> = records.iter().collect();
    sorted.sort_by_key(|r| r.trial);
    let ratios: Vec<f64> = sorted.iter().filter_map(|r| r.ratio).collect();
    let margins: Vec<f64> = sorted
        .iter()
        .filter_map(|r| r.stats.as_ref().map(|s| to_f64(&s.margin)))
        .collect();
    let bounds: Vec<f64> = sorted.iter().filter_map(|r| r.hoeffding_bound).collect();
    let bad_events = sorted.iter().filter(|r| r.bad_event).count();
    let mean_hoeffding_bound =
        (!bounds.is_empty()).then(|| bounds.iter().sum::<f64>() / bounds.len() as f64);
    Aggregate {
        trials: sorted.len(),
        bad_events,
        bad_event_freq: bad_events as f64 / sorted.len().max(1) as f64,
        ratio: Summary::of(&ratios),
        ratio_histogram: histogram(&ratios),
        ratio_undefined: sorted.len() - ratios.len(),
        margin: Summary::of(&margins),
        accounting_failures: sorted
            .iter()
            .filter(|r| !(r.candidates_sum_to_rolled_value && r.post_value_uses_pre_set))
            .count(),
        mean_hoeffding_bound,
        log_union_factor,
        union_bound: mean_hoeffding_bound.map(|b| {
            if b == 0.0 {
                0.0
            } else {
                (log_union_factor + b.ln()).exp().min(1.0)
            }
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solvers::SolverKind;
    use crate::weight::{int, ratio};

    fn cfg(obj: ObjectiveKind, t: usize, seed: u64) -> ReductionConfig {
        ReductionConfig {
            objective: obj,
            t,
            rounding: RoundingParams::new(int(1), int(1), seed).unwrap(),
            solver: SolverSpec::new(SolverKind::Exact),
            epsilon: ratio(1, 20),
            lambda_ref: int(1),
        }
    }

    fn signed_triangle() -> SignedGraph {
        SignedGraph::from_edges(3, [(0, 1, int(1)), (1, 2, int(1)), (0, 2, int(-1))]).unwrap()
    }

    #[test]
    fn duplication_round_trips_through_every_duplicate() {
        let g = signed_triangle();
        let u = Clustering::new(&[0, 0, 1]);
        let roll = build_roll(&g, 9, Execution::Sequential).unwrap();
        let u_n = duplication_clustering(&u, 9);
        for &d in roll.active() {
            assert_eq!(roll.induced_clustering(&u_n, d).unwrap(), u);
        }
        let one = duplication_clustering(&Clustering::single(3), 9);
        assert_eq!(one, Clustering::single(27));
        // w(U^N) = (N^2 / n) w(U)
        for obj in [ObjectiveKind::MaxAgree, ObjectiveKind::MinDisagree] {
            assert_eq!(
                clustering_value(roll.graph(), &u_n, obj).unwrap(),
                int(27) * clustering_value(&g, &u, obj).unwrap()
            );
        }
    }

    #[test]
    fn identity_regime_recovers_optimum() {
        let g = signed_triangle();
        for obj in [ObjectiveKind::MaxAgree, ObjectiveKind::MinDisagree] {
            let r = reduce_and_solve(&g, &cfg(obj, 0, 4), Execution::Sequential).unwrap();
            let opt = solve_exact(&g, obj).unwrap();
            assert_eq!(r.best.value, opt.value);
            assert!(r.candidates_sum_to_rolled_value && r.post_value_uses_pre_set);
            assert_eq!(r.rolled_value_pre, r.rolled_value_post);
        }
    }

    #[test]
    fn empty_graph_gives_zero_candidates() {
        let r = reduce_and_solve(
            &SignedGraph::new(3),
            &cfg(ObjectiveKind::MaxAgree, 1, 0),
            Execution::Sequential,
        )
        .unwrap();
        assert_eq!(r.candidate_values.len(), 27);
        assert!(r.candidate_values.iter().all(Zero::is_zero));
    }

    #[test]
    fn best_beats_mean_for_max() {
        let g = SignedGraph::from_edges(
            3,
            [
                (0, 1, ratio(1, 2)),
                (1, 2, ratio(-1, 3)),
                (0, 2, ratio(2, 3)),
            ],
        )
        .unwrap();
        for seed in 0..10 {
            let r = reduce_and_solve(
                &g,
                &cfg(ObjectiveKind::MaxAgree, 1, seed),
                Execution::Sequential,
            )
            .unwrap();
            let mean = &r.rolled_value_pre / Weight::from_integer(r.candidate_values.len().into());
            assert!(r.best.value >= mean);
            assert!(r.candidates_sum_to_rolled_value && r.post_value_uses_pre_set);
        }
    }

    #[test]
    fn config_validation() {
        let mut c = cfg(ObjectiveKind::MaxAgree, 0, 0);
        c.epsilon = int(0);
        assert!(reduce_and_solve(&signed_triangle(), &c, Execution::Sequential).is_err());
        let mut c = cfg(ObjectiveKind::MaxAgree, 0, 0);
        c.lambda_ref = ratio(1, 2);
        assert!(c.validate().is_err());
        assert!(run_trials(
            &signed_triangle(),
            &cfg(ObjectiveKind::MaxAgree, 0, 0),
            0,
            Execution::Sequential
        )
        .is_err());
    }

    #[test]
    fn identity_trials_have_no_bad_events() {
        let g = signed_triangle();
        let s = run_trials(
            &g,
            &cfg(ObjectiveKind::MaxAgree, 0, 1),
            10,
            Execution::Parallel,
        )
        .unwrap();
        assert_eq!(s.aggregate.bad_events, 0);
        assert_eq!(s.aggregate.accounting_failures, 0);
        assert_eq!(s.aggregate.ratio.as_ref().unwrap().min, 1.0);
        let seq = run_trials(
            &g,
            &cfg(ObjectiveKind::MaxAgree, 0, 1),
            10,
            Execution::Sequential,
        )
        .unwrap();
        assert_eq!(s, seq);
    }

    #[test]
    fn bad_event_directions() {
        let (l, e) = (int(1), ratio(1, 10));
        assert!(is_bad_event(
            &int(9),
            &int(10),
            &l,
            &e,
            ObjectiveKind::MaxAgree
        ));
        assert!(!is_bad_event(
            &int(10),
            &int(11),
            &l,
            &e,
            ObjectiveKind::MaxAgree
        ));
        assert!(is_bad_event(
            &int(12),
            &int(10),
            &l,
            &e,
            ObjectiveKind::MinDisagree
        ));
        assert!(!is_bad_event(
            &int(11),
            &int(10),
            &l,
            &e,
            ObjectiveKind::MinDisagree
        ));
    }
}
