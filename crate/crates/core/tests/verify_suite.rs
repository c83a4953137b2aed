use ccroll::graph::{Clustering, ObjectiveKind, SignedGraph};
use ccroll::harness::{
    check_candidate_decomposition, check_edge_disjointness, check_rounding_support, verify_all,
    verify_instance, VerifyOptions,
};
use ccroll::roll::build_roll;
use ccroll::rounding::RoundingParams;
use ccroll::weight::{int, ratio};
use ccroll::Execution;

fn triangle() -> SignedGraph {
    SignedGraph::from_edges(
        3,
        [(0, 1, int(1)), (1, 2, ratio(-1, 2)), (0, 2, ratio(1, 3))],
    )
    .unwrap()
}

#[test]
fn default_options_pass() {
    let report = verify_all(&VerifyOptions::default(), Execution::Parallel);
    assert!(report.passed(), "{report:#?}");
    for name in [
        "bone_partition",
        "isomorphism",
        "edge_disjointness",
        "candidate_decomposition",
        "duplicate_count",
    ] {
        assert!(report.checks[name].instances_run > 0, "{name} never ran");
    }
}

#[test]
fn corrupted_trim_list_fails_disjointness() {
    let roll = build_roll(&triangle(), 9, Execution::Sequential).unwrap();
    assert!(check_edge_disjointness(&roll).is_ok());
    let mut active = roll.active().to_vec();
    let last = active.len() - 1;
    active[last] = active[0];
    let corrupted = roll.with_active(active);
    let err = check_edge_disjointness(&corrupted).unwrap_err();
    assert!(err.contains("shared"), "{err}");
}

#[test]
fn zero_edge_graph_is_vacuous() {
    let empty = SignedGraph::new(5);
    for t in [0, 1] {
        for (name, outcome) in verify_instance(&empty, t, 9, 3) {
            assert!(outcome.is_ok(), "{name}: {outcome:?}");
        }
    }
    let roll = build_roll(&empty, 5, Execution::Sequential).unwrap();
    let c = Clustering::singletons(25);
    let p = RoundingParams::new(int(2), int(1), 1).unwrap();
    for obj in [ObjectiveKind::MaxAgree, ObjectiveKind::MinDisagree] {
        assert!(check_candidate_decomposition(&roll, &c, obj).is_ok());
        assert!(check_rounding_support(roll.graph(), &c, &p, obj).is_ok());
    }
}

#[test]
fn report_is_identical_across_execution_modes() {
    let opts = VerifyOptions {
        instances: 2,
        rounding_samples: 2_000,
        ..VerifyOptions::default()
    };
    assert_eq!(
        verify_all(&opts, Execution::Parallel),
        verify_all(&opts, Execution::Sequential)
    );
}
