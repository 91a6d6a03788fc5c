//! End-to-end checks of the `snet` binary: exit codes, output formats,
//! thread invariance, and agreement with recorded golden outputs.

use std::io::BufReader;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixture(name: &str) -> String {
    format!(
        "{}/../../fixtures/{name}",
        env!("CARGO_MANIFEST_DIR")
    )
}

fn snet(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_snet"))
        .args(args)
        .output()
        .expect("binary spawns")
}

fn stdout_of(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("stdout is utf-8")
}

fn write_temp(dir: &Path, name: &str, content: &str) -> PathBuf {
    let path = dir.join(name);
    std::fs::write(&path, content).unwrap();
    path
}

/// Rules whose single replacement is the direct arc `A -> B`: the markers sit
/// at distance 1 and both keep degree 1, so both structural conditions fail.
const BAD_RULES: &str = r#"{
  "num_colors": 1,
  "rules": {
    "1": [
      {
        "p": "1",
        "nodes": ["A", "B"],
        "arcs": [["A", "B", 1]]
      }
    ]
  }
}"#;

#[test]
fn help_exits_zero() {
    let out = snet(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout_of(&out).contains("validate"));
}

#[test]
fn validate_accepts_bundled_rules() {
    let out = snet(&["validate", &fixture("two_color_rules.json")]);
    assert_eq!(out.status.code(), Some(0), "stderr: {:?}", out.stderr);
    assert!(stdout_of(&out).contains("conditions (a),(b) satisfied for colors 1,2"));
}

#[test]
fn validate_rejects_structural_failure_unless_skipped() {
    let dir = tempfile::tempdir().unwrap();
    let rules = write_temp(dir.path(), "bad.json", BAD_RULES);
    let rules = rules.to_str().unwrap();

    let out = snet(&["validate", rules]);
    assert_eq!(out.status.code(), Some(1));

    let out = snet(&["validate", rules, "--skip-structural"]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn malformed_rules_are_a_parse_error() {
    let dir = tempfile::tempdir().unwrap();
    let rules = write_temp(dir.path(), "broken.json", "{ not json");
    let out = snet(&["validate", rules.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn missing_file_is_a_parse_error() {
    let out = snet(&["analyze", "/nonexistent/rules.json"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn exceeding_the_arc_budget_exits_with_budget_code() {
    let out = snet(&[
        "simulate",
        &fixture("two_color_rules.json"),
        &fixture("two_color_init.json"),
        "--steps",
        "12",
        "--budget",
        "4096",
    ]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn zero_runs_is_a_usage_error() {
    let out = snet(&[
        "estimate",
        &fixture("two_color_rules.json"),
        &fixture("two_color_init.json"),
        "--runs",
        "0",
    ]);
    assert_eq!(out.status.code(), Some(64));
}

#[test]
fn simulate_output_is_thread_invariant_and_matches_golden() {
    let dir = tempfile::tempdir().unwrap();
    let mut outputs = Vec::new();
    for threads in ["1", "4", "8"] {
        let graph = dir.path().join(format!("graph_{threads}.jsonl"));
        let summary = dir.path().join(format!("summary_{threads}.csv"));
        let out = snet(&[
            "--threads",
            threads,
            "simulate",
            &fixture("two_color_rules.json"),
            &fixture("two_color_init.json"),
            "--steps",
            "5",
            "--seed",
            "42",
            "--out",
            graph.to_str().unwrap(),
            "--summary",
            summary.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0), "stderr: {:?}", out.stderr);
        outputs.push((
            std::fs::read(&graph).unwrap(),
            std::fs::read(&summary).unwrap(),
        ));
    }
    assert_eq!(outputs[0], outputs[1], "1 vs 4 threads");
    assert_eq!(outputs[0], outputs[2], "1 vs 8 threads");

    let golden_graph = std::fs::read(fixture("golden/two_color_t5_seed42_graph.jsonl")).unwrap();
    let golden_summary = std::fs::read(fixture("golden/two_color_t5_seed42_summary.csv")).unwrap();
    assert_eq!(outputs[0].0, golden_graph, "graph drifted from golden");
    assert_eq!(outputs[0].1, golden_summary, "summary drifted from golden");
}

#[test]
fn zero_steps_returns_the_initial_graph() {
    let dir = tempfile::tempdir().unwrap();
    let graph_path = dir.path().join("g0.jsonl");
    let out = snet(&[
        "simulate",
        &fixture("two_color_rules.json"),
        &fixture("two_color_init.json"),
        "--steps",
        "0",
        "--out",
        graph_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));

    let file = std::fs::File::open(&graph_path).unwrap();
    let g = snet::generator::read_graph_jsonl(BufReader::new(file)).unwrap();
    let rs = snet::rulesio::parse_ruleset(
        &std::fs::read_to_string(fixture("two_color_rules.json")).unwrap(),
    )
    .unwrap();
    let init = snet::rulesio::parse_initial_graph(
        &std::fs::read_to_string(fixture("two_color_init.json")).unwrap(),
        rs.num_colors,
    )
    .unwrap();
    let expected = snet::generator::ColoredDigraph::from_initial(&init, rs.num_colors);
    assert_eq!(g, expected);
}

#[test]
fn analyze_json_reports_the_full_shape() {
    let out = snet(&["analyze", &fixture("two_color_rules.json"), "--json"]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout_of(&out)).unwrap();
    for key in [
        "m_matrix",
        "n_matrix",
        "rho_m",
        "rho_n",
        "m_primitive",
        "n_primitive",
        "m_invertible",
        "n_invertible",
        "degree_dimension",
        "hypotheses_met",
        "failed_hypotheses",
    ] {
        assert!(v.get(key).is_some(), "missing key {key}");
    }
    assert_eq!(v["hypotheses_met"], serde_json::Value::Bool(true));
    let rho_m = v["rho_m"].as_f64().unwrap();
    assert!((rho_m - 4.283882181415011).abs() < 1e-9);
}

#[test]
fn analyze_rejects_malformed_comparison_values() {
    let rules = fixture("two_color_rules.json");
    for bad in ["1.0", "4.2839,1.0", "0,1.7", "a,b"] {
        let out = snet(&["analyze", &rules, "--compare", bad]);
        assert_eq!(out.status.code(), Some(64), "--compare {bad}");
    }
}

#[test]
fn analyze_exits_domain_error_on_failed_hypotheses() {
    let dir = tempfile::tempdir().unwrap();
    let rules = write_temp(dir.path(), "bad.json", BAD_RULES);
    let out = snet(&["analyze", rules.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn process_runs_from_a_matrix_file_but_needs_invertible_mean_for_martingale() {
    let dir = tempfile::tempdir().unwrap();
    // Two equally likely replacements with singular mean [[1,1],[1,1]].
    let singular = write_temp(
        dir.path(),
        "singular.json",
        r#"{
  "matrices": [
    {"p": "1/2", "rows": [[2, 0], [0, 2]]},
    {"p": "1/2", "rows": [[0, 2], [2, 0]]}
  ]
}"#,
    );
    let path = singular.to_str().unwrap();

    let out = snet(&["process", "--matrix", path, "--steps", "6", "--seed", "3"]);
    assert_eq!(out.status.code(), Some(0), "stderr: {:?}", out.stderr);
    let text = stdout_of(&out);
    assert!(text.starts_with("t,xi,log_xi"), "got: {text}");
    assert_eq!(text.lines().count(), 8);

    let out = snet(&[
        "process", "--matrix", path, "--steps", "6", "--trials", "50", "--martingale",
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn process_refuses_both_rules_and_matrix_file() {
    let dir = tempfile::tempdir().unwrap();
    let m = write_temp(
        dir.path(),
        "m.json",
        r#"{"matrices": [{"p": "1", "rows": [[2]]}]}"#,
    );
    let out = snet(&[
        "process",
        &fixture("two_color_rules.json"),
        "--matrix",
        m.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(64));
}

#[test]
fn estimate_reports_per_run_fits_and_an_aggregate() {
    let dir = tempfile::tempdir().unwrap();
    let prefix = dir.path().join("est");
    let out = snet(&[
        "estimate",
        &fixture("two_color_rules.json"),
        &fixture("two_color_init.json"),
        "--steps",
        "4",
        "--runs",
        "2",
        "--seed",
        "9",
        "--out",
        prefix.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "stderr: {:?}", out.stderr);
    let text = stdout_of(&out);
    assert!(text.contains("run 0: delta_hat ="), "got: {text}");
    assert!(text.contains("estimated dimension:"), "got: {text}");
    assert!(dir.path().join("est.run0.csv").exists());
    assert!(dir.path().join("est.run0.json").exists());
    assert!(dir.path().join("est.aggregate.json").exists());

    let agg: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("est.aggregate.json")).unwrap())
            .unwrap();
    assert!(agg["mean"].as_f64().is_some());
    assert_eq!(agg["delta_hats"].as_array().unwrap().len(), 2);
}
