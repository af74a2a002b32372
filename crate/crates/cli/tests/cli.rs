use std::path::Path;
use std::process::{Command, Output};

use ltp_cli::{BenchReport, RunReport};
use serde_json::Value;

fn ltp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ltp"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_owned()
}

const TRIANGLE: &str = "3 3\n0 1\n1 2\n2 0\n";
const K4: &str = "4 6\n0 1\n0 2\n0 3\n1 2\n1 3\n2 3\n";

#[test]
fn gen_is_reproducible() {
    let a = ltp(&["gen", "--n", "4", "--m", "6", "--seed", "1"]);
    let b = ltp(&["gen", "--n", "4", "--m", "6", "--seed", "1"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let text = stdout(&a);
    assert_eq!(text.lines().count(), 7);
    assert!(text.starts_with("4 6\n"));
}

#[test]
fn gen_edge_cases() {
    let o = ltp(&["gen", "--n", "1", "--m", "0"]);
    assert_eq!(stdout(&o), "1 0\n");
    let o = ltp(&["gen", "--n", "3", "--m", "31"]);
    assert!(!o.status.success());
    assert!(o.stdout.is_empty());
    assert!(String::from_utf8_lossy(&o.stderr).contains("error"));
}

#[test]
fn gen_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("g.txt");
    let o = ltp(&["gen", "--n", "5", "--m", "7", "--out", p.to_str().unwrap()]);
    assert!(o.status.success() && o.stdout.is_empty());
    let g = ltp_core::Graph::parse(&std::fs::read_to_string(p).unwrap()).unwrap();
    assert_eq!((g.vertex_count(), g.edge_count()), (5, 7));
}

#[test]
fn solve_dp_on_triangle() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "t.txt", TRIANGLE);
    let o = ltp(&["solve", &f, "--engine", "dp"]);
    assert!(o.status.success());
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["length"], 3);
    assert_eq!(v["engine"], "dp");
    assert!(v["queries"].is_null());
}

#[test]
fn solve_hybrid_det_on_k4_reports_ledger() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "k4.txt", K4);
    let o = ltp(&["solve", &f, "--engine", "hybrid", "--mode", "det"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["length"], 5);
    assert_eq!(v["engine"], "hybrid-det");
    assert_eq!(v["trail"].as_array().unwrap().len(), 5);
    let total = v["queries"]["total"].as_u64().unwrap();
    let levels: u64 = v["queries"]["per_level"]
        .as_object()
        .unwrap()
        .values()
        .map(|q| q.as_u64().unwrap())
        .sum();
    assert!(total > 0);
    assert_eq!(total, levels);
}

#[test]
fn report_keys_are_always_present() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "t.txt", TRIANGLE);
    for engine in ["oracle", "dp", "hybrid"] {
        let o = ltp(&["solve", &f, "--engine", engine]);
        let v: Value = serde_json::from_slice(&o.stdout).unwrap();
        for key in [
            "engine", "n", "m", "length", "trail", "queries", "seed", "alpha", "mode", "wall_ms",
        ] {
            assert!(v.get(key).is_some(), "{engine}: missing {key}");
        }
        let back: RunReport = serde_json::from_slice(&o.stdout).unwrap();
        assert_eq!(serde_json::to_value(&back).unwrap(), v);
    }
}

#[test]
fn stochastic_solve_is_bit_stable() {
    let dir = tempfile::tempdir().unwrap();
    let g = ltp(&["gen", "--n", "5", "--m", "9", "--seed", "4"]);
    let f = write(dir.path(), "g.txt", &stdout(&g));
    let run = || {
        let o = ltp(&[
            "solve", &f, "--engine", "hybrid", "--mode", "stoch", "--seed", "11",
        ]);
        let mut v: Value = serde_json::from_slice(&o.stdout).unwrap();
        v["wall_ms"] = Value::Null;
        v
    };
    let a = run();
    assert_eq!(a, run());
    assert_eq!(a["engine"], "hybrid-stoch");
    assert_eq!(a["repeats"], 18);
}

#[test]
fn oracle_bound_is_enforced() {
    let dir = tempfile::tempdir().unwrap();
    let ok = write(
        dir.path(),
        "a.txt",
        &stdout(&ltp(&["gen", "--n", "6", "--m", "14", "--seed", "2"])),
    );
    let o = ltp(&["solve", &ok, "--engine", "oracle"]);
    assert!(o.status.success());
    let big = write(
        dir.path(),
        "b.txt",
        &stdout(&ltp(&["gen", "--n", "6", "--m", "15", "--seed", "2"])),
    );
    let o = ltp(&["solve", &big, "--engine", "oracle"]);
    assert!(!o.status.success());
    assert!(o.stdout.is_empty());
}

#[test]
fn parse_errors_name_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "bad.txt", "3 2\n0 1\n1 5\n");
    let o = ltp(&["solve", &f, "--engine", "dp"]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 3"));
}

#[test]
fn verify_random_batch() {
    let o = ltp(&["verify", "--random", "50", "5", "10", "123"]);
    assert!(o.status.success(), "{}", stdout(&o));
    assert!(stdout(&o).ends_with("50/50 agree\n"));
}

#[test]
fn verify_single_edge_and_empty() {
    let dir = tempfile::tempdir().unwrap();
    let one = write(dir.path(), "one.txt", "2 1\n0 1\n");
    let o = ltp(&["verify", &one]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("oracle 1 dp 1 hybrid-det 1"));
    let empty = write(dir.path(), "empty.txt", "1 0\n");
    let o = ltp(&["verify", &empty]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("oracle 0 dp 0 hybrid-det 0"));
}

#[test]
fn costs_reports() {
    let o = ltp(&["costs", "--m", "20", "--alpha", "0.055"]);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["classical_count"], 15504);
    let o = ltp(&["costs", "--m", "2000"]);
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    for key in ["classical_exponent", "quantum_exponent"] {
        assert!((v[key].as_f64().unwrap() - 0.789).abs() < 0.02);
    }
    assert!(!ltp(&["costs", "--m", "3"]).status.success());
}

#[test]
fn bench_deterministic_always_succeeds() {
    let o = ltp(&["bench", "--sizes", "8", "--runs", "1", "--mode", "det"]);
    assert!(o.status.success());
    let r: BenchReport = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(r.summary.len(), 1);
    assert_eq!(r.summary[0].success_rate, 1.0);
}

#[test]
fn bench_stochastic_success_rate() {
    let o = ltp(&[
        "bench", "--sizes", "10,8", "--runs", "20", "--mode", "stoch",
    ]);
    assert!(o.status.success());
    let r: BenchReport = serde_json::from_slice(&o.stdout).unwrap();
    let keys: Vec<(usize, u64)> = r.records.iter().map(|x| (x.m, x.seed)).collect();
    let mut sorted = keys.clone();
    sorted.sort();
    assert_eq!(keys, sorted);
    for s in &r.summary {
        assert!(s.success_rate >= 0.8, "m={}: {}", s.m, s.success_rate);
        assert!(s.queries.min <= s.queries.mean && s.queries.mean <= s.queries.max);
    }
}

#[test]
fn bench_csv_has_both_tables() {
    let o = ltp(&[
        "bench", "--sizes", "6", "--runs", "3", "--mode", "stoch", "--format", "csv",
    ]);
    let text = stdout(&o);
    let tables: Vec<&str> = text.split("\n\n").collect();
    assert_eq!(tables.len(), 2);
    assert_eq!(tables[0].lines().count(), 4);
    assert!(tables[1].starts_with("m,runs,success_rate"));
}
