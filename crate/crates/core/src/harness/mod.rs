//! Instance generation and invariant verification.

mod gen;
mod verify;

pub use gen::{generate, generate_with_planted, GenModel, GenSpec};
pub use verify::{
    check_bone_partition, check_candidate_decomposition, check_duplicate_count,
    check_edge_disjointness, check_isomorphism, check_rounding_support, verify_all,
    verify_instance, CheckResult, VerifyOptions, VerifyReport,
};
