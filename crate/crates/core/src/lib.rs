//! Correlation clustering on signed graphs with exact rational weights.
//!
//! The crate covers the whole roll-based reduction pipeline:
//!
//! - [`graph`]: signed graphs, clusterings and the MaxAgree / MinDisagree objectives.
//! - [`roll`]: the N-fold roll of a graph into an `N x n` grid, its duplicates and
//!   the clusterings they induce back on the base graph.
//! - [`rounding`]: unbiased two-point rounding of weights onto `{-alpha, 0, beta}`
//!   and the deviation statistics that drive the concentration argument.
//! - [`solvers`]: exact enumeration, trivial, pivot and local-search solvers.
//! - [`reduction`]: roll, round, solve, extract candidates and pick the best one,
//!   plus a Monte-Carlo trial runner.
//! - [`harness`]: instance generators and the invariant verification suites.
//!
//! All objective values are exact [`Weight`]s (big rationals).

pub mod error;
pub mod exec;
pub mod graph;
pub mod harness;
pub mod io;
pub mod reduction;
pub mod roll;
pub mod rounding;
pub mod seed;
pub mod solvers;
pub mod weight;

pub use error::{Error, Result};
pub use exec::Execution;
pub use graph::{
    clustering_value, contributing_edges, normalize_weights, Clustering, Normalized, ObjectiveKind,
    SignedGraph,
};
pub use weight::Weight;
