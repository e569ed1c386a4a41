//! End-to-end command-line behaviour: wire formats, exit codes, reports.

use std::path::Path;
use std::process::Command;

fn heyde() -> Command {
    Command::new(env!("CARGO_BIN_EXE_heyde"))
}

fn write(dir: &Path, name: &str, contents: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path.display().to_string()
}

#[test]
fn check_heyde_haar_instance_decomposes() {
    let dir = tempfile::tempdir().unwrap();
    let alpha = write(dir.path(), "alpha.json", r#"{"matrix": [[2]]}"#);
    let haar = r#"{"group": "Z5", "mass": [
        {"element": [0], "p": "1", "q": "5"},
        {"element": [1], "p": "1", "q": "5"},
        {"element": [2], "p": "1", "q": "5"},
        {"element": [3], "p": "1", "q": "5"},
        {"element": [4], "p": "1", "q": "5"}
    ]}"#;
    let mu1 = write(dir.path(), "mu1.json", haar);
    let mu2 = write(dir.path(), "mu2.json", haar);
    let out = heyde()
        .args([
            "check-heyde",
            "--group",
            "Z5",
            "--alpha",
            &alpha,
            "--mu1",
            &mu1,
            "--mu2",
            &mu2,
            "--json",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let oracle = &report["checks"][0];
    assert_eq!(oracle["holds"], true);
    let decomposition = &oracle["verdict"]["decomposition"];
    assert_eq!(decomposition["K"].as_array().unwrap().len(), 5);
    assert_eq!(decomposition["x1"], serde_json::json!([0]));
    assert_eq!(decomposition["x2"], serde_json::json!([0]));
    assert_eq!(report["checks"][2]["ok"], true);
}

#[test]
fn check_heyde_two_torsion_has_no_decomposition() {
    let dir = tempfile::tempdir().unwrap();
    let alpha = write(dir.path(), "alpha.json", r#"{"matrix": [[1]]}"#);
    let skewed = r#"{"group": "Z2", "mass": [
        {"element": [0], "p": "3", "q": "4"},
        {"element": [1], "p": "1", "q": "4"}
    ]}"#;
    let mu1 = write(dir.path(), "mu1.json", skewed);
    let mu2 = write(dir.path(), "mu2.json", skewed);
    let out = heyde()
        .args([
            "check-heyde", "--group", "Z2", "--alpha", &alpha, "--mu1", &mu1, "--mu2", &mu2,
            "--json",
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["checks"][0]["holds"], true);
    assert_eq!(report["checks"][0]["verdict"]["decomposition"], serde_json::Value::Null);
}

#[test]
fn malformed_group_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let alpha = write(dir.path(), "alpha.json", r#"{"matrix": [[1]]}"#);
    let out = heyde()
        .args([
            "check-heyde", "--group", "Z6", "--alpha", &alpha, "--mu1", &alpha, "--mu2", &alpha,
        ])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("prime power"));
}

#[test]
fn sweep_budget_zero_is_empty_and_ok() {
    let out = heyde()
        .args(["sweep", "--group", "Z5", "--budget", "0", "--json"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["checks"].as_array().unwrap().len(), 0);
    assert_eq!(report["counts"], serde_json::json!({}));
}

#[test]
fn sweep_odd_groups_reports_no_failures() {
    let out = heyde()
        .args([
            "sweep", "--group", "Z3", "--group", "Z5", "--group", "Z9", "--group", "Z3xZ3",
            "--seed", "42", "--budget", "20", "--json",
        ])
        .output()
        .unwrap();
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(report["counts"].get("failures").is_none());
    // boundary counterexamples from condition-(1)-violating automorphisms
    // are expected and flagged, hence exit 3 rather than 0
    assert_eq!(out.status.code(), Some(3));
    for check in report["checks"].as_array().unwrap() {
        assert_eq!(check["holds"], true, "{check}");
    }
}

#[test]
fn verify_inline_models_exit_zero() {
    let specs = [
        r#"{"model": "lemma5", "p": 3, "ladder": [1, 2, 3], "a": "1/2", "level": 2}"#,
        r#"{"model": "case1", "p": 3, "y0": "1", "grid": {"m_bound": 8, "n_max": 3, "random_pairs": 200}}"#,
        r#"{"model": "case2", "c": "1/2", "grid": {"m_bound": 8, "n_max": 2, "random_pairs": 200}}"#,
    ];
    for spec in specs {
        let out = heyde().args(["verify", "--model", spec, "--json"]).output().unwrap();
        assert_eq!(
            out.status.code(),
            Some(0),
            "{spec}: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
        for check in report["checks"].as_array().unwrap() {
            assert_eq!(check["holds"], true, "{check}");
        }
    }
}

#[test]
fn verify_rejects_bad_model_spec() {
    let out = heyde()
        .args(["verify", "--model", r#"{"model": "case1", "p": 3, "y0": "3"}"#])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn listings_have_expected_counts() {
    let out = heyde()
        .args(["list-automorphisms", "--group", "Z9", "--json"])
        .output()
        .unwrap();
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["counts"]["automorphisms"], 6);
    assert_eq!(report["counts"]["condition_1"], 3);

    let out = heyde()
        .args(["list-subgroups", "--group", "Z3xZ3", "--json"])
        .output()
        .unwrap();
    let report: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["counts"]["subgroups"], 6);
}

#[test]
fn out_flag_writes_the_report() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let out = heyde()
        .args([
            "sweep", "--group", "Z5", "--seed", "1", "--budget", "5", "--out",
            path.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert!(out.status.code().is_some());
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(report["command"], "sweep");
    assert_eq!(report["schema"], "heyde-report/1");
}

#[test]
fn cap_env_var_is_honored() {
    let out = heyde()
        .args(["list-subgroups", "--group", "Z27xZ27"])
        .env("HEYDE_CAP", "100")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("cap"));
}
