use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn rankone(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rankone")).args(args).output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn write_config(dir: &Path, text: &str) -> String {
    let path = dir.join("config.json");
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_owned()
}

fn results(dir: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(dir.join("results.json")).unwrap()).unwrap()
}

#[test]
fn every_bundled_config_passes() {
    let tmp = tempfile::tempdir().unwrap();
    let out = rankone(&["run", "--all-bundled", "--out", tmp.path().to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stdout));
    let r = results(&tmp.path().join("ex42-mult-not-positive"));
    assert_eq!(r["status"], "pass");
    let csv = fs::read_to_string(tmp.path().join("ex42-mult-not-positive/joint-pointwise.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("n,shifts,mu_lower,mu_upper"));
    assert_eq!(lines.next(), Some("1,1;2,0/1,0/1"));
    assert!(lines.all(|l| l.ends_with(",0/1,0/1")));
}

#[test]
fn list_shows_every_bundled_config() {
    let out = rankone(&["list"]);
    assert_eq!(code(&out), 0);
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 11);
    for name in ["ex41-positive", "prop64-avoid", "order-matrix"] {
        assert!(text.contains(name));
    }
}

#[test]
fn order_reports_both_relations() {
    let out = rankone(&["order", "1,2", "1,3"]);
    assert_eq!(code(&out), 0);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["le_p"], false);
    assert_eq!(v["le_m"], true);
    assert!(v["le_p_witness"].is_null());
    assert_eq!(v["le_m_witness"]["relation"], "le_m");
}

#[test]
fn order_normalizes_mixed_signs() {
    let out = rankone(&["order", "-1,1", "1,2"]);
    assert_eq!(code(&out), 0);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["v"]["vector"], serde_json::json!([1, 2]));
    assert!(v["v"]["reduction"].is_string());
}

#[test]
fn unknown_keys_are_usage_errors() {
    let tmp = tempfile::tempdir().unwrap();
    let path = write_config(
        tmp.path(),
        r#"{ "name": "bad", "construction": { "builder": "example42" }, "colour": 1 }"#,
    );
    let out = rankone(&["run", &path, "--out", tmp.path().join("o").to_str().unwrap()]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("colour"));
}

#[test]
fn bad_arguments_are_usage_errors() {
    assert_eq!(code(&rankone(&["run", "--bundled", "no-such-config"])), 1);
    assert_eq!(code(&rankone(&["frobnicate"])), 1);
    assert_eq!(code(&rankone(&["--help"])), 0);
}

#[test]
fn empty_experiment_list_passes() {
    let tmp = tempfile::tempdir().unwrap();
    let path = write_config(
        tmp.path(),
        r#"{ "name": "empty", "construction": { "builder": "example42" }, "experiments": [] }"#,
    );
    let dir = tmp.path().join("o");
    let out = rankone(&["run", &path, "--out", dir.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let r = results(&dir);
    assert_eq!(r["experiments"], serde_json::json!([]));
}

#[test]
fn falsified_expectation_exits_two() {
    let tmp = tempfile::tempdir().unwrap();
    let path = write_config(
        tmp.path(),
        r#"{
          "name": "wrong",
          "construction": { "builder": "example42" },
          "experiments": [
            { "id": "product", "kind": "profile", "mode": "multiplicative", "v": [1, 2],
              "points": { "heights": { "from": 0, "to": 3 } }, "expect": { "min_lower": "1/2" } },
            { "id": "fine", "kind": "order", "v": [1], "w": [1, 2], "expect": { "le_p": true } }
          ]
        }"#,
    );
    let dir = tmp.path().join("o");
    let out = rankone(&["run", &path, "--out", dir.to_str().unwrap()]);
    assert_eq!(code(&out), 2);
    let r = results(&dir);
    assert_eq!(r["experiments"][0]["status"], "fail");
    assert_eq!(r["experiments"][1]["status"], "pass");
}

#[test]
fn exhausted_budget_is_an_error_not_a_refutation() {
    let tmp = tempfile::tempdir().unwrap();
    let path = write_config(
        tmp.path(),
        r#"{
          "name": "tight",
          "construction": { "builder": "example42" },
          "limits": { "cardinality_budget": 2 },
          "experiments": [
            { "id": "zero", "kind": "profile", "mode": "joint", "v": [1, 2],
              "points": { "values": [300] }, "expect": { "all_zero": true } }
          ]
        }"#,
    );
    let dir = tmp.path().join("o");
    let out = rankone(&["run", &path, "--out", dir.to_str().unwrap()]);
    assert_eq!(code(&out), 1);
    assert_eq!(results(&dir)["experiments"][0]["status"], "error");
}

#[test]
fn reruns_are_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    for dir in [&a, &b] {
        let out = rankone(&["run", "--bundled", "ex41-positive", "--out", dir.to_str().unwrap()]);
        assert_eq!(code(&out), 0);
    }
    for file in ["results.json", "joint-at-heights.csv"] {
        assert_eq!(
            fs::read(a.join(file)).unwrap(),
            fs::read(b.join(file)).unwrap(),
            "{file}"
        );
    }
    assert!(a.join("run-meta.json").exists());
}

#[test]
fn audit_agrees_with_the_oracle() {
    let out = rankone(&["audit", "--bundled", "hk-positive", "--max-depth", "4"]);
    assert_eq!(code(&out), 0);
    assert!(String::from_utf8_lossy(&out.stdout).contains("0 disagreements"));
}
