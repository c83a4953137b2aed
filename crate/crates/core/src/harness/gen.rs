use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Clustering, SignedGraph};
use crate::weight::{int, ratio};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum GenModel {
    /// Complete `+1/-1` graph agreeing with `k` random planted clusters, with
    /// each sign flipped independently with probability `flip_prob`.
    PlantedPartition { k: usize, flip_prob: f64 },
    /// Each pair present with probability `density`, weight `p/q` with
    /// `1 <= q <= denominator_bound` and `0 < |p| <= q`.
    UniformRational {
        density: f64,
        denominator_bound: u32,
    },
    /// Complete graph, each pair `+1` with probability `plus_prob`, else `-1`.
    CompleteSigned { plus_prob: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenSpec {
    pub n: usize,
    pub model: GenModel,
    pub seed: u64,
}

fn check_prob(name: &str, p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::GenSpec(format!("{name} = {p} is not a probability")));
    }
    Ok(())
}

impl GenSpec {
    pub fn validate(&self) -> Result<()> {
        match self.model {
            GenModel::PlantedPartition { k, flip_prob } => {
                check_prob("flip_prob", flip_prob)?;
                if k == 0 || k > self.n.max(1) {
                    return Err(Error::GenSpec(format!("k = {k} must be in 1..={}", self.n)));
                }
            }
            GenModel::UniformRational {
                density,
                denominator_bound,
            } => {
                check_prob("density", density)?;
                if denominator_bound == 0 {
                    return Err(Error::GenSpec(
                        "denominator_bound must be at least 1".into(),
                    ));
                }
            }
            GenModel::CompleteSigned { plus_prob } => check_prob("plus_prob", plus_prob)?,
        }
        Ok(())
    }
}

pub fn generate(spec: &GenSpec) -> Result<SignedGraph> {
    generate_with_planted(spec).map(|(g, _)| g)
}

/// Also returns the planted clustering for [`GenModel::PlantedPartition`].
pub fn generate_with_planted(spec: &GenSpec) -> Result<(SignedGraph, Option<Clustering>)> {
    spec.validate()?;
    let n = spec.n;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut g = SignedGraph::new(n);
    let mut planted = None;
    match spec.model {
        GenModel::PlantedPartition { k, flip_prob } => {
            let labels: Vec<usize> = (0..n).map(|_| rng.random_range(0..k)).collect();
            for u in 0..n {
                for v in u + 1..n {
                    let same = labels[u] == labels[v];
                    let flip = rng.random_bool(flip_prob);
                    g.set_weight(u, v, int(if same != flip { 1 } else { -1 }))?;
                }
            }
            planted = Some(Clustering::new(&labels));
        }
        GenModel::UniformRational {
            density,
            denominator_bound,
        } => {
            for u in 0..n {
                for v in u + 1..n {
                    if rng.random_bool(density) {
                        let q = rng.random_range(1..=i64::from(denominator_bound));
                        let mut p = rng.random_range(1..=q);
                        if rng.random_bool(0.5) {
                            p = -p;
                        }
                        g.set_weight(u, v, ratio(p, q))?;
                    }
                }
            }
        }
        GenModel::CompleteSigned { plus_prob } => {
            for u in 0..n {
                for v in u + 1..n {
                    g.set_weight(u, v, int(if rng.random_bool(plus_prob) { 1 } else { -1 }))?;
                }
            }
        }
    }
    Ok((g, planted))
}
