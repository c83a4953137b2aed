use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use ccroll::harness::VerifyReport;
use ccroll::io::read_graph;
use ccroll::reduction::TrialSummary;

fn ccroll(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ccroll"))
        .args(args)
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    assert!(
        o.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&o.stderr)
    );
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

const TRIANGLE: &str = "3 3\n0 1 1\n1 2 -1/2\n0 2 0.25\n";

#[test]
fn gen_is_deterministic_per_seed() {
    let a = stdout(&ccroll(&[
        "--seed", "7", "gen", "--n", "6", "--model", "uniform",
    ]));
    let b = stdout(&ccroll(&[
        "gen", "--n", "6", "--model", "uniform", "--seed", "7",
    ]));
    let c = stdout(&ccroll(&[
        "--seed", "8", "gen", "--n", "6", "--model", "uniform",
    ]));
    assert_eq!(a, b);
    assert_ne!(a, c);
    let g = read_graph(&a).unwrap();
    assert_eq!(g.node_count(), 6);
    assert!(g
        .edges()
        .all(|(_, _, w)| w.numer().magnitude() <= w.denom().magnitude()));
}

#[test]
fn solve_prints_labels_then_value() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "g.txt", TRIANGLE);
    let out = stdout(&ccroll(&[
        "solve",
        g.to_str().unwrap(),
        "--objective",
        "max",
    ]));
    let lines: Vec<&str> = out.lines().collect();
    // 0-1 and 0-2 together would force 1-2 together; dropping 0-2 is cheapest
    assert_eq!(lines, ["0 0 1", "3/2"]);
    let out = stdout(&ccroll(&[
        "solve",
        g.to_str().unwrap(),
        "--objective",
        "min",
    ]));
    assert_eq!(out.lines().nth(1), Some("1/4"));
}

#[test]
fn roll_writes_graph_and_sidecar() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "g.txt", TRIANGLE);
    let out = dir.path().join("rolled.txt");
    stdout(&ccroll(&[
        "--out",
        out.to_str().unwrap(),
        "roll",
        g.to_str().unwrap(),
        "--t",
        "1",
    ]));
    let rolled = read_graph(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(rolled.node_count(), 27);
    assert_eq!(rolled.edge_count(), 27 * 3);
    let sidecar: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("rolled.txt.json")).unwrap())
            .unwrap();
    assert_eq!(sidecar["rows"], 9);
    assert_eq!(sidecar["duplicates_total"], 45);
    assert_eq!(sidecar["active"].as_array().unwrap().len(), 27);
}

#[test]
fn round_requires_normalized_weights() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "g.txt", "2 1\n0 1 3\n");
    let failed = ccroll(&["round", g.to_str().unwrap()]);
    assert_eq!(failed.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&failed.stderr).contains("--normalize"));
    let sidecar = dir.path().join("s.json");
    let out = stdout(&ccroll(&[
        "round",
        g.to_str().unwrap(),
        "--normalize",
        "--sidecar",
        sidecar.to_str().unwrap(),
    ]));
    assert_eq!(out, "2 1\n0 1 1\n");
    let s: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(sidecar).unwrap()).unwrap();
    assert_eq!(s["scale"], "3");
    assert_eq!(s["classes"][0]["mean"], "1");
}

#[test]
fn reduce_report_parses_and_accounts() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "g.txt", TRIANGLE);
    let report = dir.path().join("report.json");
    let args = [
        "--seed",
        "3",
        "--out",
        report.to_str().unwrap(),
        "reduce",
        g.to_str().unwrap(),
        "--t",
        "1",
        "--trials",
        "16",
    ];
    stdout(&ccroll(&args));
    let first = std::fs::read_to_string(&report).unwrap();
    let summary: TrialSummary = serde_json::from_str(&first).unwrap();
    assert_eq!(summary.records.len(), 16);
    assert_eq!(summary.rows, 9);
    assert_eq!(summary.aggregate.accounting_failures, 0);
    assert!(summary
        .records
        .iter()
        .all(|r| r.candidate_values.len() == 27));

    stdout(&ccroll(&args));
    assert_eq!(
        std::fs::read_to_string(&report).unwrap(),
        first,
        "same seed, same report"
    );

    let csv = stdout(&ccroll(&[
        "--format",
        "csv",
        "reduce",
        g.to_str().unwrap(),
        "--trials",
        "4",
    ]));
    assert!(csv.starts_with("lo,hi,count\n"));
}

#[test]
fn verify_passes_and_reports_every_check() {
    let out = stdout(&ccroll(&[
        "verify",
        "--sizes",
        "3,4",
        "--ts",
        "0,1",
        "--instances",
        "2",
        "--samples",
        "2000",
    ]));
    let report: VerifyReport = serde_json::from_str(&out).unwrap();
    assert!(report.passed());
    assert!(report
        .checks
        .contains_key("rounded_value_on_contributing_set"));

    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "g.txt", TRIANGLE);
    let csv = stdout(&ccroll(&["--format", "csv", "verify", g.to_str().unwrap()]));
    assert!(
        csv.lines()
            .skip(1)
            .all(|l| l.split(',').nth(2) == Some("0")),
        "{csv}"
    );
}

#[test]
fn config_file_fills_in_and_flags_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write(
        dir.path(),
        "run.conf",
        "# defaults\nseed = 7\nmodel = uniform\nn = 6\ntrials = 3\n",
    );
    let cfg = cfg.to_str().unwrap();
    let direct = stdout(&ccroll(&["--seed", "7", "gen", "--n", "6"]));
    assert_eq!(stdout(&ccroll(&["--config", cfg, "gen"])), direct);

    let other = stdout(&ccroll(&["--seed", "8", "gen", "--n", "6"]));
    assert_eq!(
        stdout(&ccroll(&["--config", cfg, "--seed", "8", "gen"])),
        other
    );
    assert_eq!(
        stdout(&ccroll(&["--config", cfg, "gen", "--seed", "8"])),
        other
    );
    assert_eq!(
        stdout(&ccroll(&["--seed", "8", "--config", cfg, "gen"])),
        other
    );

    let bad = write(dir.path(), "bad.conf", "colour = blue\n");
    let out = ccroll(&["--config", bad.to_str().unwrap(), "gen", "--n", "3"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("colour"));
}

#[test]
fn malformed_graph_is_reported_with_line() {
    let dir = tempfile::tempdir().unwrap();
    let g = write(dir.path(), "g.txt", "3 2\n0 1 1\n1 0 -1\n");
    let out = ccroll(&["solve", g.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(
        String::from_utf8_lossy(&out.stderr).contains("line 3"),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
}
