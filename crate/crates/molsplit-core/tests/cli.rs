//! End-to-end runs of the `molsplit` binary: output layout, exit codes,
//! manifest round-trips, and byte-level determinism against golden files.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

fn golden(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/golden")
        .join(name)
}

fn molsplit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_molsplit"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn assert_ok(out: &Output) {
    assert!(
        out.status.success(),
        "stdout: {}\nstderr: {}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
}

fn read(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap_or_else(|e| panic!("read {}: {e}", path.display()))
}

#[test]
fn hi_split_writes_folds_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out = molsplit(&[
        "hi-split",
        "--in",
        fixture("hi_dataset.csv").to_str().unwrap(),
        "--k",
        "3",
        "--threshold",
        "0.4",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_ok(&out);
    let manifest: serde_json::Value =
        serde_json::from_str(&read(&dir.path().join("manifest.json"))).unwrap();
    assert_eq!(manifest["method"], "hi-split");
    assert_eq!(manifest["folds"].as_array().unwrap().len(), 3);
    assert_eq!(manifest["removed"].as_array().unwrap().len(), 0);
    for i in 1..=3 {
        let train = read(&dir.path().join(format!("train_{i}.csv")));
        let test = read(&dir.path().join(format!("test_{i}.csv")));
        assert!(train.starts_with("id,smiles,label\n"));
        assert!(test.starts_with("id,smiles,label\n"));
    }
}

#[test]
fn hi_split_manifest_survives_its_own_audit() {
    let dir = tempfile::tempdir().unwrap();
    assert_ok(&molsplit(&[
        "hi-split",
        "--in",
        fixture("hi_dataset.csv").to_str().unwrap(),
        "--k",
        "2",
        "--fractions",
        "0.6,0.4",
        "--out",
        dir.path().to_str().unwrap(),
    ]));
    for i in 1..=2 {
        let train = dir.path().join(format!("train_{i}.csv"));
        let test = dir.path().join(format!("test_{i}.csv"));
        let out = molsplit(&[
            "audit",
            "--train",
            train.to_str().unwrap(),
            "--test",
            test.to_str().unwrap(),
            "--threshold",
            "0.4",
        ]);
        assert_ok(&out);
        let report: serde_json::Value =
            serde_json::from_slice(&out.stdout).expect("audit prints JSON");
        assert_eq!(
            report["leakage_fraction"], 0.0,
            "fold {i} leaks: {report}"
        );
    }
}

#[test]
fn lo_split_emits_cluster_column() {
    let dir = tempfile::tempdir().unwrap();
    let out = molsplit(&[
        "lo-split",
        "--in",
        fixture("lo_dataset.csv").to_str().unwrap(),
        "--mode",
        "pki",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_ok(&out);
    let test = read(&dir.path().join("test_1.csv"));
    assert!(test.starts_with("id,smiles,value,cluster\n"));
    assert_eq!(test.lines().count(), 7, "six cluster members plus header");
    assert!(test.lines().skip(1).all(|l| l.ends_with(",0")));
    let manifest: serde_json::Value =
        serde_json::from_str(&read(&dir.path().join("manifest.json"))).unwrap();
    let clusters = manifest["folds"][0]["clusters"].as_array().unwrap();
    assert_eq!(clusters.len(), 1);
    assert_eq!(clusters[0]["members"].as_array().unwrap().len(), 7);
    // The anchor trains, the rest of its cluster tests.
    let anchor = clusters[0]["anchor"].as_str().unwrap();
    let train: Vec<&str> = manifest["folds"][0]["train"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_str().unwrap())
        .collect();
    assert!(train.contains(&anchor));
}

#[test]
fn greedy_split_reports_removals() {
    let dir = tempfile::tempdir().unwrap();
    let out = molsplit(&[
        "greedy-split",
        "--in",
        fixture("hi_dataset.csv").to_str().unwrap(),
        "--test-fraction",
        "0.3",
        "--seed",
        "7",
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_ok(&out);
    let manifest: serde_json::Value =
        serde_json::from_str(&read(&dir.path().join("manifest.json"))).unwrap();
    assert_eq!(manifest["method"], "greedy-split");
    assert_eq!(manifest["parameters"]["initial_partition"], "seeded-random");
    let removed = manifest["removed"].as_array().unwrap().len();
    let kept = manifest["folds"][0]["test"].as_array().unwrap().len();
    assert_eq!(removed + kept, 3, "test side of 10 molecules at 0.3");
}

#[test]
fn kcut_solve_matches_the_enumerated_answer() {
    let out = molsplit(&[
        "kcut-solve",
        "--problem",
        fixture("kcut_path3.json").to_str().unwrap(),
    ]);
    assert_ok(&out);
    let solution: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(solution["kept_weight"], 2);
    assert_eq!(solution["optimal"], true);
    assert_eq!(solution["gap"], 0);
    assert_eq!(solution["assignment"][1], 0, "the middle vertex goes");
}

#[test]
fn metrics_subcommand_scores_tables() {
    let out = molsplit(&[
        "metrics",
        "--predictions",
        fixture("predictions_hi.csv").to_str().unwrap(),
        "--mode",
        "hi",
    ]);
    assert_ok(&out);
    let value: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(value["metric"], "pr_auc");
    let v = value["value"].as_f64().unwrap();
    assert!(v > 0.0 && v <= 1.0);

    let out = molsplit(&[
        "metrics",
        "--predictions",
        fixture("predictions_lo.csv").to_str().unwrap(),
        "--mode",
        "lo",
        "--dummy",
    ]);
    assert_ok(&out);
    let value: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(value["value"], 0.0, "constant predictions rank-correlate 0");
}

#[test]
fn circles_counts_families() {
    let out = molsplit(&[
        "circles",
        "--in",
        fixture("hi_dataset.csv").to_str().unwrap(),
        "--threshold",
        "0.5",
    ]);
    assert_ok(&out);
    let count: usize = String::from_utf8_lossy(&out.stdout).trim().parse().unwrap();
    assert!(count >= 3, "at least one representative per family");
}

#[test]
fn preprocess_binary_mode_labels_and_filters() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("clean.csv");
    let out = molsplit(&[
        "preprocess",
        "--in",
        fixture("raw_activity.csv").to_str().unwrap(),
        "--mode",
        "binary",
        "--out",
        out_path.to_str().unwrap(),
    ]);
    assert_ok(&out);
    let text = read(&out_path);
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("id,smiles,value,label"));
    let rows: Vec<&str> = lines.collect();
    // CCO kept (consistent 0s), CCCO kept (1), ambiguous rows and the
    // conflicting CCN group dropped, CCCCCCO kept (0), CCS kept (1).
    assert_eq!(rows.len(), 4);
    assert!(rows.iter().any(|r| r.starts_with("CCCO,CCCO,7") && r.ends_with(",1")));
    assert!(rows.iter().all(|r| !r.starts_with("CCN")));
}

#[test]
fn input_errors_exit_one() {
    let out = molsplit(&["metrics", "--predictions", "/no/such/file.csv", "--mode", "hi"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!out.stderr.is_empty());

    let out = molsplit(&["definitely-not-a-subcommand"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn infeasible_splits_exit_two() {
    // Identical molecules cannot be split at all.
    let dir = tempfile::tempdir().unwrap();
    let input = dir.path().join("same.csv");
    std::fs::write(&input, "id,smiles\nm1,CCO\nm2,CCO\nm3,CCO\nm4,CCO\n").unwrap();
    let out = molsplit(&[
        "hi-split",
        "--in",
        input.to_str().unwrap(),
        "--k",
        "2",
        "--out",
        dir.path().join("out").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("lower the bounds"), "hint missing: {stderr}");
}

#[test]
fn version_prints_tool_and_format_versions() {
    let out = molsplit(&["--version"]);
    assert_ok(&out);
    let text = String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("manifest format"), "got: {text}");
}

#[test]
fn edges_out_dumps_the_neighborhood_graph() {
    let dir = tempfile::tempdir().unwrap();
    let edges = dir.path().join("edges.csv");
    assert_ok(&molsplit(&[
        "hi-split",
        "--in",
        fixture("hi_dataset.csv").to_str().unwrap(),
        "--k",
        "3",
        "--edges-out",
        edges.to_str().unwrap(),
        "--out",
        dir.path().join("out").to_str().unwrap(),
    ]));
    let text = read(&edges);
    assert!(text.starts_with("u,v,similarity\n"));
    assert!(text.lines().count() > 3);
}

/// Criterion-8-style determinism checks live in the acceptance suite; here
/// the same three fixtures are pinned against committed golden bytes so
/// accidental format drift shows up in review.
#[test]
fn golden_outputs_are_stable() {
    // 1. hi-split manifest + fold CSVs.
    let dir = tempfile::tempdir().unwrap();
    assert_ok(&molsplit(&[
        "hi-split",
        "--in",
        fixture("hi_dataset.csv").to_str().unwrap(),
        "--k",
        "3",
        "--seed",
        "0",
        "--out",
        dir.path().to_str().unwrap(),
    ]));
    for name in ["manifest.json", "train_1.csv", "test_1.csv"] {
        assert_eq!(
            read(&dir.path().join(name)),
            read(&golden(&format!("hi_{name}"))),
            "golden mismatch for {name}"
        );
    }

    // 2. kcut solution JSON.
    let out = molsplit(&[
        "kcut-solve",
        "--problem",
        fixture("kcut_path3.json").to_str().unwrap(),
    ]);
    assert_ok(&out);
    assert_eq!(
        String::from_utf8_lossy(&out.stdout),
        read(&golden("kcut_solution.json"))
    );

    // 3. audit report JSON.
    let out = molsplit(&[
        "audit",
        "--train",
        fixture("audit_train.csv").to_str().unwrap(),
        "--test",
        fixture("audit_test.csv").to_str().unwrap(),
        "--threshold",
        "0.4",
    ]);
    assert_ok(&out);
    assert_eq!(
        String::from_utf8_lossy(&out.stdout),
        read(&golden("audit_report.json"))
    );
}
