use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("self-loop on node {0}")]
    SelfLoop(usize),
    #[error("node {node} out of range for a graph with {n} nodes")]
    NodeOutOfRange { node: usize, n: usize },
    #[error("pair ({0}, {1}) given more than once")]
    DuplicatePair(usize, usize),
    #[error("clustering covers {got} nodes but the graph has {expected}")]
    ClusteringMismatch { expected: usize, got: usize },
    #[error("invalid roll shape: {0}")]
    RollShape(String),
    #[error("({a_row},{a_col})-({b_row},{b_col}) is not a grid-bone")]
    NotGridBone {
        a_row: usize,
        a_col: usize,
        b_row: usize,
        b_col: usize,
    },
    #[error("duplicate (start {start}, slope {slope}) is not active in this roll")]
    InactiveDuplicate { start: usize, slope: usize },
    #[error("weight {0} has absolute value above 1; normalize the graph first")]
    Unnormalized(String),
    #[error("invalid rounding parameters: {0}")]
    RoundingParams(String),
    #[error("invalid approximation factor: {0}")]
    Lambda(String),
    #[error("graph with {nodes} nodes is too large for the exact solver (limit {limit})")]
    TooLargeForExact { nodes: usize, limit: usize },
    #[error("pivot needs a complete +1/-1 instance: {0}")]
    NotCompleteSigned(String),
    #[error("weights cannot be scaled to 128-bit integers")]
    WeightOverflow,
    #[error("invalid solver spec: {0}")]
    SolverSpec(String),
    #[error("invalid generator spec: {0}")]
    GenSpec(String),
    #[error("invalid reduction config: {0}")]
    Config(String),
    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },
}
