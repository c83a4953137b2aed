use ccroll::graph::{Clustering, ObjectiveKind};
use ccroll::harness::{generate, GenModel, GenSpec};
use ccroll::reduction::duplication_clustering;
use ccroll::roll::build_roll;
use ccroll::rounding::{deviation_stats, round_graph, RoundingParams};
use ccroll::seed::derive;
use ccroll::solvers::solve_exact;
use ccroll::weight::{int, to_f64};
use ccroll::Execution;

fn mean_and_se(xs: &[f64]) -> (f64, f64) {
    let m = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / m;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (m - 1.0);
    (mean, (var / m).sqrt())
}

/// Both deviation sums are centered: their empirical means over 10^4
/// roundings sit within 3 standard errors of zero.
#[test]
fn deviation_sums_are_centered() {
    let spec = GenSpec {
        n: 4,
        model: GenModel::UniformRational {
            density: 1.0,
            denominator_bound: 6,
        },
        seed: 17,
    };
    let g = generate(&spec).unwrap();
    let roll = build_roll(&g, 4, Execution::Sequential).unwrap();
    let u = duplication_clustering(&solve_exact(&g, ObjectiveKind::MaxAgree).unwrap().clustering, 4);
    let c_prime = Clustering::new(&(0..16).map(|x| x % 3).collect::<Vec<_>>());
    for obj in [ObjectiveKind::MaxAgree, ObjectiveKind::MinDisagree] {
        let samples = Execution::Parallel.map(10_000, |i| {
            let p = RoundingParams::new(int(1), int(2), derive(99, "deviation", i as u64)).unwrap();
            let out = round_graph(roll.graph(), &p, Execution::Sequential).unwrap();
            let s = deviation_stats(&out, &c_prime, &u, &int(2), obj).unwrap();
            (to_f64(&s.s1), to_f64(&s.s2))
        });
        let (s1, s2): (Vec<f64>, Vec<f64>) = samples.into_iter().unzip();
        for (name, xs) in [("s1", s1), ("s2", s2)] {
            let (mean, se) = mean_and_se(&xs);
            assert!(se > 0.0, "{obj} {name} never varied");
            assert!(mean.abs() <= 3.0 * se, "{obj} {name}: mean {mean} with SE {se}");
        }
    }
}
