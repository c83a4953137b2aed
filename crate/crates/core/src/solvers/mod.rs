//! Clustering solvers behind one black-box contract: graph and objective in,
//! clustering out. Every result's value is recomputed exactly from the
//! returned clustering.

mod exact;
mod local;
pub mod oracle;
mod pivot;
mod scaled;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{clustering_value, Clustering, ObjectiveKind, SignedGraph};
use crate::weight::{serde_weight, Weight};

pub use exact::{BRANCH_AND_BOUND_LIMIT, EXACT_NODE_LIMIT};
use scaled::ScaledGraph;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SolverKind {
    Exact,
    TrivialMax,
    Pivot,
    LocalSearch,
}

impl fmt::Display for SolverKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SolverKind::Exact => "exact",
            SolverKind::TrivialMax => "trivial",
            SolverKind::Pivot => "pivot",
            SolverKind::LocalSearch => "local",
        })
    }
}

impl FromStr for SolverKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "exact" => Ok(SolverKind::Exact),
            "trivial" | "trivial-max" => Ok(SolverKind::TrivialMax),
            "pivot" => Ok(SolverKind::Pivot),
            "local" | "local-search" => Ok(SolverKind::LocalSearch),
            other => Err(format!(
                "unknown solver {other:?} (expected exact, trivial, pivot or local)"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolverSpec {
    pub kind: SolverKind,
    pub seed: u64,
    /// Move budget for local search.
    pub budget: usize,
}

impl SolverSpec {
    pub const DEFAULT_BUDGET: usize = 10_000;

    pub fn new(kind: SolverKind) -> Self {
        Self {
            kind,
            seed: 0,
            budget: Self::DEFAULT_BUDGET,
        }
    }

    pub fn with_seed(self, seed: u64) -> Self {
        Self { seed, ..self }
    }

    pub fn with_budget(self, budget: usize) -> Self {
        Self { budget, ..self }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SolveResult {
    pub clustering: Clustering,
    #[serde(with = "serde_weight")]
    pub value: Weight,
    pub objective: ObjectiveKind,
    pub solver: SolverSpec,
}

fn finish(
    g: &SignedGraph,
    labels: &[usize],
    obj: ObjectiveKind,
    solver: SolverSpec,
) -> Result<SolveResult> {
    let clustering = Clustering::new(labels);
    let value = clustering_value(g, &clustering, obj)?;
    Ok(SolveResult {
        clustering,
        value,
        objective: obj,
        solver,
    })
}

pub fn solve(g: &SignedGraph, obj: ObjectiveKind, spec: SolverSpec) -> Result<SolveResult> {
    let labels = match spec.kind {
        SolverKind::Exact => exact::exact_labels(&ScaledGraph::new(g)?)?,
        SolverKind::TrivialMax => local::trivial_labels(&ScaledGraph::new(g)?),
        SolverKind::Pivot => pivot::pivot_labels(g, spec.seed)?,
        SolverKind::LocalSearch => {
            if spec.budget == 0 {
                return Err(Error::SolverSpec(
                    "local search needs a budget of at least 1".into(),
                ));
            }
            local::local_search_labels(&ScaledGraph::new(g)?, spec.budget)
        }
    };
    finish(g, &labels, obj, spec)
}

/// Optimal clustering. Graphs with up to [`EXACT_NODE_LIMIT`] nodes are fully
/// enumerated; larger ones are solved per connected component.
pub fn solve_exact(g: &SignedGraph, obj: ObjectiveKind) -> Result<SolveResult> {
    solve(g, obj, SolverSpec::new(SolverKind::Exact))
}

/// Better of one-cluster and all-singletons; at least half the total weight.
pub fn solve_trivial_max(g: &SignedGraph) -> Result<SolveResult> {
    solve(
        g,
        ObjectiveKind::MaxAgree,
        SolverSpec::new(SolverKind::TrivialMax),
    )
}

/// Randomized pivot on a complete `+1/-1` instance, scored as MinDisagree.
pub fn solve_pivot(g: &SignedGraph, seed: u64) -> Result<SolveResult> {
    solve(
        g,
        ObjectiveKind::MinDisagree,
        SolverSpec::new(SolverKind::Pivot).with_seed(seed),
    )
}

pub fn solve_local_search(
    g: &SignedGraph,
    obj: ObjectiveKind,
    seed: u64,
    budget: usize,
) -> Result<SolveResult> {
    solve(
        g,
        obj,
        SolverSpec::new(SolverKind::LocalSearch)
            .with_seed(seed)
            .with_budget(budget),
    )
}
