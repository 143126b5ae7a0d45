//! The command-line binary: exit codes, report contents and reproducibility.

use std::path::Path;
use std::process::Command;

use serde_json::Value;

fn pinchlab(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_pinchlab")).args(args).output().expect("binary runs");
    (out.status.code().expect("exit code"), String::from_utf8_lossy(&out.stdout).into_owned())
}

fn report(args: &[&str]) -> (i32, Value) {
    let mut full = args.to_vec();
    full.extend(["--out", "-"]);
    let (code, stdout) = pinchlab(&full);
    (code, serde_json::from_str(&stdout).unwrap_or_else(|e| panic!("{e}: {stdout}")))
}

fn without_runtime(path: &Path) -> String {
    std::fs::read_to_string(path)
        .unwrap()
        .lines()
        .filter(|l| !l.trim_start().starts_with("\"runtime_ms\""))
        .collect::<Vec<_>>()
        .join("\n")
}

#[test]
fn zoo_list_is_sorted_and_complete() {
    let (code, r) = report(&["zoo", "list"]);
    assert_eq!(code, 0);
    let labels: Vec<&str> = r["entries"].as_array().unwrap().iter().map(|e| e["label"].as_str().unwrap()).collect();
    let mut sorted = labels.clone();
    sorted.sort_unstable();
    assert_eq!(labels, sorted);
    assert!(labels.iter().any(|l| l.starts_with("round-sphere")));
    assert!(labels.iter().any(|l| l.starts_with("s1xs")));
    assert_eq!(r["schema_version"], 1);
}

#[test]
fn audit_verdicts_and_exit_codes() {
    let (code, r) = report(&["audit", "--theorem", "weyl-ricci", "--metric", "s1xs:n=8:t=0.1:normalized"]);
    assert_eq!((code, r["verdict"].as_str().unwrap()), (0, "boundary"));
    assert_eq!(r["hypothesis_flags"]["bach_flat"], true);
    assert_eq!(r["yamabe"]["provenance"], "yamabe-metric-RVol");

    let (code, r) = report(&["audit", "--theorem", "rm0-lp", "--metric", "round-sphere:n=6:r=1"]);
    assert_eq!((code, r["verdict"].as_str().unwrap()), (0, "hypothesis-satisfied"));

    let (code, r) = report(&["audit", "--theorem", "pointwise", "--metric", "s1xs:n=6:t=0.1"]);
    assert_eq!((code, r["verdict"].as_str().unwrap()), (0, "boundary"));

    let (code, r) = report(&["audit", "--audit", "weyl-ricci", "--metric", "s1xs:n=4:t=0.1:normalized", "--no-bach"]);
    assert_eq!((code, r["verdict"].as_str().unwrap()), (1, "not-satisfied"));

    // S¹×S⁵ is outside the low-dimensional pointwise audit
    assert_eq!(pinchlab(&["audit", "--theorem", "pointwise-low-dim", "--metric", "s1xs:n=6:t=0.1"]).0, 2);
    assert_eq!(pinchlab(&["audit", "--theorem", "rm0-lp", "--p", "2", "--metric", "round-sphere:n=6:r=1"]).0, 2);
    assert_eq!(pinchlab(&["audit", "--theorem", "gursky", "--metric", "nowhere"]).0, 2);
    assert_eq!(pinchlab(&["audit", "--theorem", "gursky", "--metric", "round-sphere:n=4:r=1", "--frobnicate"]).0, 2);
}

#[test]
fn identical_runs_give_identical_reports() {
    let dir = tempfile::tempdir().unwrap();
    let runs = [
        vec!["sample", "--inequality", "huisken", "--n", "4", "--trials", "100000", "--seed", "7"],
        vec!["audit", "--theorem", "gauss-bonnet", "--metric", "round-sphere:n=4:r=1", "--grid", "8"],
    ];
    for (i, args) in runs.iter().enumerate() {
        let a = dir.path().join(format!("a{i}.json"));
        let b = dir.path().join(format!("b{i}.json"));
        for p in [&a, &b] {
            let mut full = args.clone();
            let ps = p.to_str().unwrap();
            full.extend(["--out", ps]);
            assert_eq!(pinchlab(&full).0, 0, "{args:?}");
        }
        assert_eq!(without_runtime(&a), without_runtime(&b), "{args:?}");
    }
    let r: Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("a0.json")).unwrap()).unwrap();
    assert_eq!(r["violations"], 0);
    assert_eq!(r["input"]["seed"], 7);
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 4, "no temporary files left behind");
}

#[test]
fn sample_rejects_bad_input() {
    assert_eq!(pinchlab(&["sample", "--inequality", "nope", "--n", "4"]).0, 2);
    assert_eq!(pinchlab(&["sample", "--inequality", "cubic-trace", "--n", "2"]).0, 2);
    assert_eq!(pinchlab(&["sample", "--inequality", "huisken", "--n", "4", "--k", "1"]).0, 2);
    assert_eq!(pinchlab(&["sample", "--inequality", "huisken", "--n", "4", "--trials", "0"]).0, 2);
}

#[test]
fn verify_suites() {
    assert_eq!(pinchlab(&["verify", ""]).0, 2);
    assert_eq!(pinchlab(&["verify", "unknown"]).0, 2);
    let (code, r) = report(&["verify", "algebra", "--n", "4", "--n", "5", "--trials", "50"]);
    assert_eq!(code, 0);
    assert_eq!(r["passed"], true);
    assert_eq!(r["checks"].as_array().unwrap().len(), 32);
}

#[test]
fn curvature_reports() {
    let (code, r) = report(&["curvature", "--metric", "round-sphere:n=4:r=1", "--no-bach"]);
    assert_eq!(code, 0);
    assert!(r["weyl"].as_array().unwrap().iter().all(|v| v.as_f64().unwrap().abs() < 1e-12));
    assert!((r["scalar"].as_f64().unwrap() - 12.0).abs() < 1e-12);

    let (_, r) = report(&["curvature", "--metric", "fubini-study"]);
    assert!(r["bach_max_entry"].as_f64().unwrap() < 1e-5);

    let (_, r) = report(&["curvature", "--metric", "perturbed-flat:n=4:amp=0.1:seed=42", "--point", "-0.3,0.2,1,2"]);
    assert!(r["bach_max_entry"].as_f64().unwrap() > 1e-3);
    assert_eq!(r["riemann_source"], "finite-difference");

    assert_eq!(pinchlab(&["curvature", "--metric", "nowhere:n=4"]).0, 2);
    assert_eq!(pinchlab(&["curvature", "--metric", "round-sphere:n=4:r=1", "--point", "1,2"]).0, 2);
    assert_eq!(pinchlab(&["curvature", "--metric", "round-sphere:n=4:r=1", "--fd-order", "3"]).0, 2);
}

#[test]
fn constants_domain_errors_exit_two() {
    let (code, r) = report(&["constants", "--n", "4", "--p", "2"]);
    assert_eq!(code, 0);
    let names: Vec<&str> = r["constants"].as_array().unwrap().iter().map(|c| c["name"].as_str().unwrap()).collect();
    assert_eq!(names, ["C", "A", "E", "C1", "C2", "C3", "epsilon"]);
    assert_eq!(pinchlab(&["constants", "--n", "6", "--name", "C3"]).0, 2);
    assert_eq!(pinchlab(&["constants", "--n", "6", "--p", "2.5"]).0, 2);
    assert_eq!(pinchlab(&["constants", "--n", "6", "--p", "4", "--branch", "intermediate"]).0, 2);
    assert_eq!(pinchlab(&["constants", "--n", "5", "--p", "3", "--branch", "intermediate"]).0, 0);
}
