use std::path::Path;
use std::process::{Command, Output};

fn edgenet(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_edgenet"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn generate(dir: &Path, edges: &str) -> String {
    let path = dir.join("g.tsv");
    let p = path.to_str().unwrap().to_owned();
    let out = edgenet(&[
        "generate", "--alpha", "0.5", "--theta", "1", "--edges", edges, "--seed", "2015", "--out", &p,
    ]);
    assert_eq!(out.status.code(), Some(0));
    p
}

#[test]
fn generate_writes_requested_edges() {
    let dir = tempfile::tempdir().unwrap();
    let path = generate(dir.path(), "1000");
    let text = std::fs::read_to_string(path).unwrap();
    assert!(text.starts_with("# edges=1000\n"));
    assert_eq!(text.lines().filter(|l| !l.starts_with('#')).count(), 1000);
}

#[test]
fn generate_matches_bundled_sample() {
    let dir = tempfile::tempdir().unwrap();
    let path = generate(dir.path(), "1000");
    let bundled = include_str!("../../core/tests/data/synthetic_1000.tsv");
    assert_eq!(std::fs::read_to_string(path).unwrap(), bundled);
}

#[test]
fn fit_prints_json() {
    let dir = tempfile::tempdir().unwrap();
    let path = generate(dir.path(), "1000");
    for method in ["moment", "mle"] {
        let out = edgenet(&["fit", "--in", &path, "--method", method]);
        assert_eq!(out.status.code(), Some(0), "{method}");
        let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
        assert_eq!(v["method"], method);
        assert_eq!(v["n_edges"], 1000);
        assert!(v["alpha_hat"].as_f64().unwrap() > 0.0);
    }
}

#[test]
fn mle_on_simple_input_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = generate(dir.path(), "200");
    let out = edgenet(&["fit", "--in", &path, "--method", "mle", "--simple"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn loglik_forms_agree() {
    let dir = tempfile::tempdir().unwrap();
    let path = generate(dir.path(), "300");
    let value = |form: &str| {
        let out = edgenet(&[
            "loglik", "--in", &path, "--alpha", "0.4", "--theta", "-0.1", "--form", form,
        ]);
        assert_eq!(out.status.code(), Some(0));
        let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
        v["log_likelihood"].as_f64().unwrap()
    };
    assert!((value("closed") - value("sequential")).abs() < 1e-9);
}

#[test]
fn invalid_alpha_exits_with_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = generate(dir.path(), "10");
    let out = edgenet(&["loglik", "--in", &path, "--alpha", "1.5", "--theta", "1"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn unknown_subcommand_and_missing_file() {
    assert_eq!(edgenet(&["frobnicate"]).status.code(), Some(1));
    let out = edgenet(&["degrees", "--in", "/nonexistent/g.tsv"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn malformed_edge_list_is_a_data_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.tsv");
    std::fs::write(&path, "1 2 3\n").unwrap();
    let out = edgenet(&["degrees", "--in", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn experiments_write_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let growth = dir.path().join("growth.csv");
    let out = edgenet(&[
        "growth-experiment", "--alpha", "0.5", "--theta", "1", "--edges", "500",
        "--replicates", "4", "--out", growth.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(std::fs::read_to_string(&growth).unwrap().starts_with("replicate,seed,n_vertices\n"));

    let deg = dir.path().join("deg");
    let out = edgenet(&[
        "degree-experiment", "--alpha", "0.5", "--theta", "1", "--edges", "2000",
        "--out", deg.to_str().unwrap(), "--gnuplot",
    ]);
    assert_eq!(out.status.code(), Some(0));
    for f in ["ccdf_multigraph.csv", "ccdf_projected.csv", "replicates.csv", "ccdf.gp"] {
        assert!(deg.join(f).exists(), "{f}");
    }
}
