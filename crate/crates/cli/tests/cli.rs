use std::fs;
use std::process::{Command, Output};

use serde_json::Value;

fn predltl(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_predltl"))
        .args(args)
        .env_remove("PREDLTL_CONFIG_DIR")
        .output()
        .expect("binary runs")
}

fn stdout_json(o: &Output) -> Value {
    assert!(
        o.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&o.stderr)
    );
    serde_json::from_slice(&o.stdout).expect("stdout is JSON")
}

fn error_json(o: &Output, code: i32) -> Value {
    assert_eq!(
        o.status.code(),
        Some(code),
        "stderr: {}",
        String::from_utf8_lossy(&o.stderr)
    );
    let v: Value = serde_json::from_slice(&o.stderr).expect("stderr is JSON");
    assert_eq!(v["error"]["exit_code"], code);
    v
}

#[test]
fn translate_reports_counts() {
    let v = stdout_json(&predltl(&["translate", "(F G a()) | F b()", "--contract"]));
    assert_eq!(v["states"], 4);
    assert_eq!(v["accepting"].as_array().unwrap().len(), 2);
    assert_eq!(v["epsilon_edges"], 1);
    let t = stdout_json(&predltl(&["translate", "true"]));
    assert_eq!(t["states"], 1);
}

#[test]
fn translate_writes_dot_and_hoa_that_reimports() {
    let dir = tempfile::tempdir().unwrap();
    let dot = dir.path().join("a.dot");
    let hoa = dir.path().join("a.hoa");
    let o = predltl(&[
        "translate",
        "(F G a()) | F b()",
        "--contract",
        "--dot",
        dot.to_str().unwrap(),
        "--hoa-out",
        hoa.to_str().unwrap(),
    ]);
    let direct = stdout_json(&o);
    assert!(fs::read_to_string(&dot).unwrap().starts_with("digraph"));
    let imported = stdout_json(&predltl(&["translate", "--hoa-in", hoa.to_str().unwrap()]));
    assert_eq!(imported["states"], direct["states"]);
    assert_eq!(imported["epsilon_edges"], direct["epsilon_edges"]);
}

#[test]
fn dot_goes_to_stdout_without_a_path() {
    let o = predltl(&["translate", "F b()", "--dot"]);
    assert!(o.status.success());
    assert!(String::from_utf8_lossy(&o.stdout).starts_with("digraph"));
}

#[test]
fn sequences_list_both_branches() {
    let o = predltl(&["sequences", "(F G a()) | F b()", "--contract"]);
    assert!(o.status.success());
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.contains("reach b() avoid false"));
    assert!(text.contains("reach a() avoid !a()"));
    let v = stdout_json(&predltl(&[
        "sequences",
        "(F G a()) | F b()",
        "--contract",
        "--json",
    ]));
    assert_eq!(v["sequences"].as_array().unwrap().len(), 2);
}

#[test]
fn dead_automaton_has_no_sequences() {
    let v = stdout_json(&predltl(&["sequences", "false", "--json"]));
    assert!(v["sequences"].as_array().unwrap().is_empty());
    assert!(v["note"].is_string());
}

#[test]
fn unknown_state_is_an_input_error() {
    error_json(&predltl(&["sequences", "F b()", "--from-state", "9"]), 2);
}

#[test]
fn parse_errors_are_machine_readable() {
    let v = error_json(&predltl(&["parse", "F ("]), 2);
    assert_eq!(v["error"]["kind"], "input");
    error_json(&predltl(&["no-such-command"]), 2);
}

#[test]
fn evaluate_is_deterministic_across_workers() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = dir.path().join("m.json");
    fs::write(
        &manifest,
        r#"{"seed": 5, "env": "fallout", "formula": {"template": "ra_fw2"}, "policy": "oracle", "episodes": 6}"#,
    )
    .unwrap();
    let m = manifest.to_str().unwrap();
    let a = predltl(&["evaluate", m, "--workers", "1"]);
    let b = predltl(&["evaluate", m, "--workers", "3"]);
    assert_eq!(a.stdout, b.stdout);
    let v = stdout_json(&a);
    assert_eq!(v["success_rate"], 1.0);
    assert_eq!(v["records"].as_array().unwrap().len(), 6);
}

#[test]
fn evaluate_rejects_zero_episodes() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = dir.path().join("m.json");
    fs::write(
        &manifest,
        r#"{"seed": 5, "env": "fallout", "formula": {"template": "ra_fw2"}, "policy": "oracle", "episodes": 0}"#,
    )
    .unwrap();
    error_json(&predltl(&["evaluate", manifest.to_str().unwrap()]), 2);
}

#[test]
fn manifests_resolve_through_config_dir() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(
        dir.path().join("cfg.json"),
        r#"{"seed": 1, "env": "fallout", "formula": {"template": "ra_fw1"}, "policy": "random", "episodes": 2}"#,
    )
    .unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_predltl"))
        .args(["evaluate", "cfg.json"])
        .env("PREDLTL_CONFIG_DIR", dir.path())
        .current_dir(std::env::temp_dir())
        .output()
        .unwrap();
    assert_eq!(stdout_json(&o)["episodes"], 2);
}

#[test]
fn simulate_prints_a_trace() {
    let v = stdout_json(&predltl(&[
        "simulate",
        "--template",
        "ra_fw1",
        "--seed",
        "3",
    ]));
    assert_eq!(v["trace"]["outcome"]["terminal"], "sequence_complete");
    let o = predltl(&["simulate", "--template", "ra_rgb1", "--ndjson"]);
    assert!(o.status.success());
    let lines: Vec<Value> = String::from_utf8(o.stdout)
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert!(lines.len() > 2);
}

#[test]
fn infeasible_reset_exits_with_three() {
    // No cell lies below a negative threshold.
    let o = predltl(&[
        "env",
        "snapshot",
        "--env",
        "fallout",
        "--atom",
        "rad(-0.5)",
        "--atom",
        "loc(10,10)",
    ]);
    error_json(&o, 3);
}

#[test]
fn curriculum_sample_emits_ndjson() {
    let o = predltl(&[
        "curriculum",
        "sample",
        "--env",
        "rgbzone",
        "--stage",
        "5",
        "--count",
        "20",
        "--seed",
        "2",
    ]);
    assert!(o.status.success());
    let lines: Vec<Value> = String::from_utf8(o.stdout)
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect();
    assert_eq!(lines.len(), 20);
    assert!(lines.iter().all(|l| l["stage"] == 5));
    error_json(
        &predltl(&["curriculum", "sample", "--env", "fallout", "--stage", "8"]),
        2,
    );
}

#[test]
fn env_snapshot_observation_sizes() {
    let v = stdout_json(&predltl(&[
        "env", "snapshot", "--env", "rgbzone", "--seed", "4",
    ]));
    assert_eq!(v["observation"].as_array().unwrap().len(), 165);
    let v = stdout_json(&predltl(&[
        "env", "snapshot", "--env", "fallout", "--atom", "loc(3,4)",
    ]));
    assert_eq!(v["observation"].as_array().unwrap().len(), 882);
}
