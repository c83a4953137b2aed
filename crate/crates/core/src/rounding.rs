//! Two-point randomized rounding of normalized weights onto `{-alpha, 0, beta}`,
//! and the deviation bookkeeping used to study its concentration.
//!
//! A positive weight `g` becomes `beta` with probability `g / beta` and `0`
//! otherwise; a negative weight becomes `-alpha` with probability `-g / alpha`
//! and `0` otherwise. Each rounded weight has expectation exactly `g`, and its
//! sign is either zero or the sign of `g`, so a pair that does not contribute
//! to a clustering's value before rounding cannot contribute after it.
//!
//! Each pair draws from its own stream seeded by `(seed, u, v)`, making the
//! outcome independent of evaluation order.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exec::Execution;
use crate::graph::{contributing_edges, Clustering, ObjectiveKind, SignedGraph};
use crate::seed::edge_seed;
use crate::weight::{format_weight, serde_weight, Weight};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RoundingParams {
    #[serde(with = "serde_weight")]
    alpha: Weight,
    #[serde(with = "serde_weight")]
    beta: Weight,
    seed: u64,
}

impl RoundingParams {
    pub fn new(alpha: Weight, beta: Weight, seed: u64) -> Result<Self> {
        let one = Weight::one();
        if alpha < one || beta < one {
            return Err(Error::RoundingParams(format!(
                "alpha = {} and beta = {} must both be at least 1",
                format_weight(&alpha),
                format_weight(&beta)
            )));
        }
        Ok(Self { alpha, beta, seed })
    }

    pub fn alpha(&self) -> &Weight {
        &self.alpha
    }

    pub fn beta(&self) -> &Weight {
        &self.beta
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn with_seed(&self, seed: u64) -> Self {
        Self {
            seed,
            ..self.clone()
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RoundingOutcome {
    pub before: SignedGraph,
    pub after: SignedGraph,
    pub params: RoundingParams,
}

/// Uniform 64-bit draw for pair `{u, v}`.
pub fn edge_draw(seed: u64, u: usize, v: usize) -> u64 {
    ChaCha8Rng::seed_from_u64(edge_seed(seed, u, v)).next_u64()
}

/// `true` iff `draw / 2^64 < p`, evaluated exactly.
fn below(draw: u64, p: &Weight) -> bool {
    BigInt::from(draw) * p.denom() < (p.numer() << 64)
}

/// Rounds one weight given a uniform 64-bit draw.
pub fn round_weight(gamma: &Weight, alpha: &Weight, beta: &Weight, draw: u64) -> Weight {
    if gamma.is_positive() {
        if below(draw, &(gamma / beta)) {
            beta.clone()
        } else {
            Weight::zero()
        }
    } else if gamma.is_negative() {
        if below(draw, &(-gamma / alpha)) {
            -alpha.clone()
        } else {
            Weight::zero()
        }
    } else {
        Weight::zero()
    }
}

pub fn round_graph(
    g: &SignedGraph,
    p: &RoundingParams,
    exec: Execution,
) -> Result<RoundingOutcome> {
    if let Some((_, _, w)) = g.edges().find(|(_, _, w)| w.abs() > Weight::one()) {
        return Err(Error::Unnormalized(format_weight(w)));
    }
    let edges: Vec<(usize, usize, &Weight)> = g.edges().collect();
    let rounded = exec.map_slice(&edges, |&(u, v, w)| {
        round_weight(w, &p.alpha, &p.beta, edge_draw(p.seed, u, v))
    });
    let mut after = SignedGraph::new(g.node_count());
    for ((u, v, _), w) in edges.iter().zip(rounded) {
        after.insert_unchecked(*u, *v, w);
    }
    Ok(RoundingOutcome {
        before: g.clone(),
        after,
        params: p.clone(),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassTotals {
    pub count: usize,
    #[serde(with = "serde_weight")]
    pub total: Weight,
}

/// Contributing pairs grouped by their weight `g`: `count = |E(C, g)|` and
/// `total = count * |g|`.
pub fn contributing_weight_by_class(
    g: &SignedGraph,
    c: &Clustering,
    obj: ObjectiveKind,
) -> Result<BTreeMap<Weight, ClassTotals>> {
    let mut out: BTreeMap<Weight, ClassTotals> = BTreeMap::new();
    for (u, v) in contributing_edges(g, c, obj)? {
        let w = g.weight(u, v);
        let entry = out.entry(w.clone()).or_insert(ClassTotals {
            count: 0,
            total: Weight::zero(),
        });
        entry.count += 1;
        entry.total += w.abs();
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassOverlap {
    #[serde(with = "serde_weight")]
    pub gamma: Weight,
    /// Contributing for `C'` only.
    pub z1: usize,
    /// Contributing for the reference only.
    pub z2: usize,
    /// Contributing for both.
    pub z3: usize,
}

/// Deviation of a candidate clustering `C'` and a reference clustering `U`
/// (typically the duplication of an optimum) under one rounding.
///
/// With `D(X) = sum over the pre-rounding contributing set of X of (|w'| - |w|)`:
/// `s1 = D(C')` and `s2 = D(U) / lambda`. `margin` is the combination that must
/// exceed `gap_target` for rounding luck alone to let a clustering that is not a
/// `(lambda + eps)`-approximation pass as a `lambda`-approximation:
/// `s1 - s2` for MaxAgree, `lambda^2 * s2 - s1` for MinDisagree.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeviationStats {
    pub classes: Vec<ClassOverlap>,
    #[serde(with = "serde_weight")]
    pub s1: Weight,
    #[serde(with = "serde_weight")]
    pub s2: Weight,
    #[serde(with = "serde_weight")]
    pub margin: Weight,
    #[serde(with = "serde_weight")]
    pub lambda: Weight,
    /// Pre-rounding value of the reference clustering.
    #[serde(with = "serde_weight")]
    pub reference_value: Weight,
    pub objective: ObjectiveKind,
    #[serde(with = "crate::weight::serde_weight_opt")]
    pub gap_target: Option<Weight>,
}

impl DeviationStats {
    /// Gap the margin must exceed: `eps * w(U) / (lambda * (lambda + eps))` for
    /// MaxAgree, `eps * w(U)` for MinDisagree.
    pub fn gap_for(&self, eps: &Weight) -> Weight {
        match self.objective {
            ObjectiveKind::MaxAgree => {
                eps * &self.reference_value / (&self.lambda * (&self.lambda + eps))
            }
            ObjectiveKind::MinDisagree => eps * &self.reference_value,
        }
    }

    pub fn with_gap_target(mut self, eps: &Weight) -> Self {
        self.gap_target = Some(self.gap_for(eps));
        self
    }
}

pub(crate) fn check_lambda(lambda: &Weight) -> Result<()> {
    if *lambda < Weight::one() {
        return Err(Error::Lambda(format!(
            "lambda = {} must be at least 1",
            format_weight(lambda)
        )));
    }
    Ok(())
}

pub fn deviation_stats(
    out: &RoundingOutcome,
    c_prime: &Clustering,
    u_n: &Clustering,
    lambda: &Weight,
    obj: ObjectiveKind,
) -> Result<DeviationStats> {
    check_lambda(lambda)?;
    let e_c = contributing_edges(&out.before, c_prime, obj)?;
    let e_u = contributing_edges(&out.before, u_n, obj)?;
    let deviation = |&(u, v): &(usize, usize)| -> Weight {
        out.after.weight(u, v).abs() - out.before.weight(u, v).abs()
    };
    let d_c: Weight = e_c.iter().map(deviation).sum();
    let d_u: Weight = e_u.iter().map(deviation).sum();

    let mut classes: BTreeMap<Weight, ClassOverlap> = BTreeMap::new();
    let union: BTreeSet<&(usize, usize)> = e_c.iter().chain(e_u.iter()).collect();
    for e in union {
        let gamma = out.before.weight(e.0, e.1);
        let entry = classes.entry(gamma.clone()).or_insert(ClassOverlap {
            gamma,
            z1: 0,
            z2: 0,
            z3: 0,
        });
        match (e_c.contains(e), e_u.contains(e)) {
            (true, false) => entry.z1 += 1,
            (false, true) => entry.z2 += 1,
            _ => entry.z3 += 1,
        }
    }

    let s1 = d_c;
    let s2 = &d_u / lambda;
    let margin = match obj {
        ObjectiveKind::MaxAgree => &s1 - &s2,
        ObjectiveKind::MinDisagree => lambda * &d_u - &s1,
    };
    let reference_value = e_u
        .iter()
        .map(|&(u, v)| out.before.weight(u, v).abs())
        .sum();
    Ok(DeviationStats {
        classes: classes.into_values().collect(),
        s1,
        s2,
        margin,
        lambda: lambda.clone(),
        reference_value,
        objective: obj,
        gap_target: None,
    })
}

/// Hoeffding bound on `Pr{ sum of z independent centered terms > t }` when each
/// term ranges over an interval of length `range`: `exp(-2 t^2 / (z range^2))`,
/// clamped to 1. Zero terms cannot exceed a positive `t`.
pub fn hoeffding_tail_with_range(z: u64, t: &Weight, range: &Weight) -> f64 {
    if !t.is_positive() {
        return 1.0;
    }
    if z == 0 {
        return 0.0;
    }
    let exponent =
        Weight::from_integer(2.into()) * t * t / (Weight::from_integer(z.into()) * range * range);
    exponent.to_f64().map_or(0.0, |e| (-e).exp()).min(1.0)
}

/// Hoeffding bound with interval length `alpha + beta` for every weight class.
pub fn hoeffding_tail(z: u64, t: &Weight, alpha: &Weight, beta: &Weight) -> f64 {
    hoeffding_tail_with_range(z, t, &(alpha + beta))
}

/// Tighter per-class interval length: `beta` for positive classes, `alpha`
/// for negative ones.
pub fn class_range(gamma: &Weight, alpha: &Weight, beta: &Weight) -> Weight {
    if gamma.is_negative() {
        alpha.clone()
    } else {
        beta.clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::clustering_value;
    use crate::weight::{int, ratio};

    fn params(alpha: i64, beta: i64, seed: u64) -> RoundingParams {
        RoundingParams::new(int(alpha), int(beta), seed).unwrap()
    }

    #[test]
    fn rejects_bad_params_and_input() {
        assert!(RoundingParams::new(ratio(1, 2), int(1), 0).is_err());
        assert!(RoundingParams::new(int(1), ratio(9, 10), 0).is_err());
        let g = SignedGraph::from_edges(2, [(0, 1, int(2))]).unwrap();
        assert!(matches!(
            round_graph(&g, &params(1, 1, 0), Execution::Sequential),
            Err(Error::Unnormalized(_))
        ));
    }

    #[test]
    fn full_probability_is_identity() {
        for draw in [0, 1, u64::MAX / 2, u64::MAX] {
            assert_eq!(round_weight(&int(1), &int(1), &int(1), draw), int(1));
            assert_eq!(round_weight(&int(-1), &int(1), &int(1), draw), int(-1));
            assert_eq!(round_weight(&int(0), &int(3), &int(3), draw), int(0));
        }
    }

    #[test]
    fn threshold_is_exact() {
        // p = 1/4 of 2^64
        let edge = 1u64 << 62;
        let g = ratio(1, 2);
        assert_eq!(round_weight(&g, &int(1), &int(2), edge - 1), int(2));
        assert_eq!(round_weight(&g, &int(1), &int(2), edge), int(0));
        assert_eq!(round_weight(&ratio(-1, 3), &int(2), &int(1), 0), int(-2));
    }

    #[test]
    fn half_over_two_has_mean_half() {
        let samples = 100_000u64;
        let hits = (0..samples)
            .filter(|&s| round_weight(&ratio(1, 2), &int(1), &int(2), edge_draw(s, 0, 1)) == int(2))
            .count() as f64;
        let mean = 2.0 * hits / samples as f64;
        assert!((mean - 0.5).abs() < 0.01, "mean {mean}");
    }

    #[test]
    fn deterministic_and_order_free() {
        let g = SignedGraph::from_edges(
            4,
            [
                (0, 1, ratio(1, 3)),
                (1, 2, ratio(-2, 3)),
                (2, 3, ratio(1, 2)),
            ],
        )
        .unwrap();
        let p = params(2, 2, 99);
        let a = round_graph(&g, &p, Execution::Sequential).unwrap();
        let b = round_graph(&g, &p, Execution::Parallel).unwrap();
        assert_eq!(a, b);
        for (u, v, w) in a.after.edges() {
            assert_eq!(w.signum(), g.weight(u, v).signum());
        }
    }

    #[test]
    fn class_totals_sum_to_value() {
        let g = SignedGraph::from_edges(
            4,
            [
                (0, 1, int(1)),
                (0, 2, int(1)),
                (1, 3, ratio(-1, 2)),
                (2, 3, ratio(1, 2)),
            ],
        )
        .unwrap();
        let c = Clustering::new(&[0, 0, 0, 1]);
        let by = contributing_weight_by_class(&g, &c, ObjectiveKind::MaxAgree).unwrap();
        assert_eq!(
            by[&int(1)],
            ClassTotals {
                count: 2,
                total: int(2)
            }
        );
        let total: Weight = by.values().map(|t| t.total.clone()).sum();
        assert_eq!(
            total,
            clustering_value(&g, &c, ObjectiveKind::MaxAgree).unwrap()
        );

        let empty = contributing_weight_by_class(
            &SignedGraph::new(3),
            &Clustering::single(3),
            ObjectiveKind::MaxAgree,
        )
        .unwrap();
        assert!(empty.is_empty());
    }

    #[test]
    fn identity_rounding_has_zero_deviation() {
        let g = SignedGraph::from_edges(3, [(0, 1, int(1)), (1, 2, int(-1))]).unwrap();
        let out = round_graph(&g, &params(1, 1, 5), Execution::Sequential).unwrap();
        let c = Clustering::new(&[0, 1, 1]);
        let u = Clustering::single(3);
        let s = deviation_stats(&out, &c, &u, &int(2), ObjectiveKind::MaxAgree).unwrap();
        assert!(s.s1.is_zero() && s.s2.is_zero() && s.margin.is_zero());
    }

    #[test]
    fn self_comparison_overlaps_fully() {
        let g = SignedGraph::from_edges(
            4,
            [(0, 1, ratio(1, 2)), (1, 2, ratio(-1, 2)), (2, 3, int(1))],
        )
        .unwrap();
        let out = round_graph(&g, &params(1, 1, 5), Execution::Sequential).unwrap();
        let u = Clustering::new(&[0, 0, 1, 1]);
        let s = deviation_stats(&out, &u, &u, &int(3), ObjectiveKind::MaxAgree).unwrap();
        let by = contributing_weight_by_class(&g, &u, ObjectiveKind::MaxAgree).unwrap();
        for class in &s.classes {
            assert_eq!((class.z1, class.z2), (0, 0));
            assert_eq!(class.z3, by[&class.gamma].count);
        }
        assert!(deviation_stats(&out, &u, &u, &ratio(1, 2), ObjectiveKind::MaxAgree).is_err());
    }

    #[test]
    fn hoeffding_closed_form() {
        let b = hoeffding_tail(100, &int(50), &int(1), &int(1));
        assert!((b - (-12.5f64).exp()).abs() < 1e-15);
        assert_eq!(hoeffding_tail(100, &int(0), &int(1), &int(1)), 1.0);
        assert!(hoeffding_tail(100, &ratio(1, 1_000_000), &int(1), &int(1)) > 0.999_999);
        assert_eq!(hoeffding_tail(0, &int(1), &int(1), &int(1)), 0.0);
        assert_eq!(class_range(&ratio(-1, 2), &int(3), &int(5)), int(3));
    }
}
