//! End-to-end tests of the binary: exit codes, report shape, determinism.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

const DIAG_SPEC: &str = r#"{"ambient_dim":2,"unital":true,"generators":[[[[1,1,0,1],[0,1,0,1]],[[0,1,0,1],[2,1,0,1]]]]}"#;
const FULL_M2_SPEC: &str = r#"{"ambient_dim":2,"unital":true,"generators":[[[[0,1,0,1],[1,1,0,1]],[[0,1,0,1],[0,1,0,1]]]]}"#;

fn run(args: &[&str]) -> (Option<i32>, Value, Output) {
    let out = Command::new(env!("CARGO_BIN_EXE_cstar"))
        .args(args)
        .output()
        .expect("binary runs");
    let report: Value = serde_json::from_slice(&out.stdout)
        .unwrap_or_else(|e| panic!("stdout is not JSON ({e}): {:?}", out));
    (out.status.code(), report, out)
}

fn write_file(dir: &Path, name: &str, content: &str) -> PathBuf {
    let path = dir.join(name);
    fs::write(&path, content).unwrap();
    path
}

#[test]
fn spectrum_on_diagonal_generator() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_file(dir.path(), "diag.json", DIAG_SPEC);
    let (code, report, _) = run(&["spectrum", spec.to_str().unwrap()]);
    assert_eq!(code, Some(0));
    assert_eq!(report["pass"], Value::Bool(true));
    assert_eq!(report["command"], "spectrum");
    let points = &report["results"]["generators"][0]["spectrum"];
    assert_eq!(points.as_array().unwrap().len(), 2);
    assert_eq!(points[0][0].as_f64().unwrap(), 1.0);
    assert_eq!(points[1][0].as_f64().unwrap(), 2.0);
    assert!(report["checks"].as_array().unwrap().iter().all(|c| c["pass"] == true));
}

#[test]
fn reports_are_byte_identical_across_runs() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_file(dir.path(), "m2.json", FULL_M2_SPEC);
    let (_, _, first) = run(&["gns", spec.to_str().unwrap()]);
    let (_, _, second) = run(&["gns", spec.to_str().unwrap()]);
    assert_eq!(first.stdout, second.stdout);
    assert!(!first.stdout.is_empty());
}

#[test]
fn seed_enters_the_digest() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_file(dir.path(), "m2.json", FULL_M2_SPEC);
    let (code_a, a, _) = run(&["certify", spec.to_str().unwrap(), "--seed", "0"]);
    let (code_b, b, _) = run(&["certify", spec.to_str().unwrap(), "--seed", "7"]);
    assert_eq!(code_a, Some(0));
    assert_eq!(code_b, Some(0));
    assert_ne!(a["inputs_digest"], b["inputs_digest"]);
    assert_eq!(a["seed"], 0);
    assert_eq!(b["seed"], 7);
}

#[test]
fn zero_denominator_is_a_spec_error() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_file(
        dir.path(),
        "bad.json",
        r#"{"ambient_dim":1,"unital":true,"generators":[[[[1,0,0,1]]]]}"#,
    );
    let (code, report, _) = run(&["spectrum", spec.to_str().unwrap()]);
    assert_eq!(code, Some(2));
    assert_eq!(report["pass"], Value::Bool(false));
    assert!(report["error"].as_str().unwrap().contains("denominator"));
}

#[test]
fn missing_file_is_an_error_report() {
    let (code, report, _) = run(&["certify", "/definitely/not/here.json"]);
    assert_eq!(code, Some(2));
    assert!(report["error"].as_str().unwrap().contains("cannot read"));
}

#[test]
fn matrix_units_generate_the_full_algebra() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_file(dir.path(), "m2.json", FULL_M2_SPEC);
    let (code, report, _) = run(&["certify", spec.to_str().unwrap()]);
    assert_eq!(code, Some(0));
    assert_eq!(report["results"]["algebra_dim"], 4);
    assert_eq!(report["results"]["commutative"], Value::Bool(false));
    assert_eq!(report["results"]["blocks"][0]["size"], 2);
}

#[test]
fn gelfand_refuses_a_noncommutative_algebra() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_file(dir.path(), "m2.json", FULL_M2_SPEC);
    let (code, report, _) = run(&["gelfand", spec.to_str().unwrap()]);
    assert_eq!(code, Some(2));
    assert!(report["error"].as_str().unwrap().contains("commutative"));
}

#[test]
fn gelfand_counts_characters_on_a_diagonal_algebra() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_file(dir.path(), "diag.json", DIAG_SPEC);
    let (code, report, _) = run(&["gelfand", spec.to_str().unwrap()]);
    assert_eq!(code, Some(0));
    assert_eq!(report["results"]["characters"], 2);
}

#[test]
fn jspec_and_calculus_pass_on_a_normal_generator() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_file(dir.path(), "diag.json", DIAG_SPEC);
    let (code, report, _) = run(&["jspec", spec.to_str().unwrap()]);
    assert_eq!(code, Some(0), "jspec: {report}");
    assert_eq!(report["results"]["point_count"], 2);
    let (code, report, _) = run(&["calculus", spec.to_str().unwrap()]);
    assert_eq!(code, Some(0), "calculus: {report}");
    // f(z) = z^2 + z/2 + 1 on {1, 2}: sup |f| = 6 at z = 2.
    assert!((report["results"]["spectrum_sup"].as_f64().unwrap() - 6.0).abs() < 1e-9);
}

#[test]
fn states_projections_and_gns_pass_on_both_examples() {
    let dir = tempfile::tempdir().unwrap();
    for (name, text) in [("diag.json", DIAG_SPEC), ("m2.json", FULL_M2_SPEC)] {
        let spec = write_file(dir.path(), name, text);
        for cmd in ["states", "projections", "gns"] {
            let (code, report, _) = run(&[cmd, spec.to_str().unwrap()]);
            assert_eq!(code, Some(0), "{cmd} on {name}: {report}");
        }
    }
}

#[test]
fn russell_level_three_is_exact_and_deterministic() {
    let (code, report, first) = run(&["russell", "--level", "3"]);
    assert_eq!(code, Some(0));
    assert_eq!(report["results"]["dim"], 8);
    let taus = report["results"]["tau_by_pinned_blocks"].as_array().unwrap();
    assert_eq!(taus[1]["tau"], "1/2");
    assert_eq!(taus[3]["tau"], "1/8");
    let (_, _, second) = run(&["russell", "--level", "3"]);
    assert_eq!(first.stdout, second.stdout);
}

#[test]
fn russell_rejects_an_oversized_level() {
    let (code, report, _) = run(&["russell", "--level", "40"]);
    assert_eq!(code, Some(2));
    assert!(report["error"].as_str().unwrap().contains("outside supported range"));
}

#[test]
fn tree_rank_of_the_singleton_root() {
    let dir = tempfile::tempdir().unwrap();
    let file = write_file(dir.path(), "root.tree", "()\n");
    let (code, report, _) = run(&["trees", "rank", file.to_str().unwrap()]);
    assert_eq!(code, Some(0));
    assert_eq!(report["results"]["root_rank"], 1);
    assert_eq!(report["results"]["node_count"], 1);
}

#[test]
fn tree_rank_counts_a_listed_spine() {
    let dir = tempfile::tempdir().unwrap();
    let file = write_file(dir.path(), "spine.tree", "# three-node spine\n1\n1,2\n1,2,3\n");
    let (code, report, _) = run(&["trees", "rank", file.to_str().unwrap()]);
    assert_eq!(code, Some(0));
    assert_eq!(report["results"]["root_rank"], 4);
    assert_eq!(report["results"]["depth"], 3);
}

#[test]
fn listed_trees_are_well_founded() {
    let dir = tempfile::tempdir().unwrap();
    let file = write_file(dir.path(), "t.tree", "0\n0,0\n1\n");
    let (code, report, _) = run(&["trees", "wellfounded", file.to_str().unwrap()]);
    assert_eq!(code, Some(0));
    assert_eq!(report["results"]["outcome"], "well_founded");
    assert_eq!(report["results"]["root_rank"], 3);
}

#[test]
fn branch_search_respects_the_budget() {
    let dir = tempfile::tempdir().unwrap();
    let file = write_file(
        dir.path(),
        "pair.tree",
        "0:0\n0:0,1:0\n0:0,1:0,2:0\n0:0,1:0,2:0,3:0\n0:0,1:0,2:0,3:0,4:0\n",
    );
    let path = file.to_str().unwrap();
    // A finite listing cut off by the budget stays inconclusive.
    let (code, report, _) = run(&["trees", "member", path, "--x", "0,1,2,3,4", "--depth-budget", "3"]);
    assert_eq!(code, Some(0));
    assert_eq!(report["results"]["outcome"], "unknown");
    assert_eq!(report["results"]["frontier"], "0,0,0");
    // With enough budget the whole section is explored and ranked.
    let (code, report, _) = run(&["trees", "member", path, "--x", "0,1,2,3,4", "--depth-budget", "9"]);
    assert_eq!(code, Some(0));
    assert_eq!(report["results"]["outcome"], "no_branch");
    assert!(report["checks"]
        .as_array()
        .unwrap()
        .iter()
        .any(|c| c["name"] == "exhausted_section_is_wellfounded" && c["pass"] == true));
}

#[test]
fn eventually_constant_inputs_are_accepted() {
    let dir = tempfile::tempdir().unwrap();
    let file = write_file(dir.path(), "pair.tree", "0:5\n0:5,1:5\n");
    let (code, report, _) = run(&[
        "trees",
        "member",
        file.to_str().unwrap(),
        "--x",
        "0",
        "--x-tail",
        "1",
    ]);
    assert_eq!(code, Some(0), "{report}");
    assert_eq!(report["results"]["outcome"], "no_branch");
}

#[test]
fn unknown_subcommand_exits_with_two() {
    let out = Command::new(env!("CARGO_BIN_EXE_cstar"))
        .arg("frobnicate")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn bad_tolerance_is_an_error_report() {
    let dir = tempfile::tempdir().unwrap();
    let spec = write_file(dir.path(), "diag.json", DIAG_SPEC);
    let (code, report, _) = run(&["spectrum", spec.to_str().unwrap(), "--tol", "2.0"]);
    assert_eq!(code, Some(2));
    assert!(report["error"].is_string());
}
