use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use privarch::dsl::load_bundle;
use privarch::semantics::{run_trace, Event};
use serde_json::Value;

fn example(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/examples").join(name)
}

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_privarch"))
        .args(args)
        .env("PRIVARCH_COLOR", "never")
        .output()
        .expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("JSON output")
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn check_accepts_case_study() {
    let o = run(&["check", p(&example("smart_metering.parch"))]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("smart_metering: consistent"));
}

#[test]
fn check_names_duplicate_computation() {
    let o = run(&["check", p(&fixture("duplicate_fee.parch"))]);
    assert_eq!(code(&o), 2);
    assert!(stdout(&o).contains("C1 FAIL"));
    let o = run(&["check", "--json", p(&fixture("duplicate_fee.parch"))]);
    let j = json(&o);
    assert_eq!(j["consistent"], false);
    let failed: Vec<&Value> =
        j["report"]["entries"].as_array().unwrap().iter().filter(|e| e["status"] == "fail").collect();
    assert_eq!(failed.len(), 1);
    assert_eq!(failed[0]["check"], "C1");
}

#[test]
fn parse_errors_carry_spans() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("garbage.parch");
    std::fs::write(&path, "architecture a {\n  component A\n  has A (v);\n}").unwrap();
    let o = run(&["check", p(&path)]);
    assert_eq!(code(&o), 3);
    assert!(stderr(&o).contains("garbage.parch:3:"), "{}", stderr(&o));
    let o = run(&["prove", "--json", p(&path)]);
    assert_eq!(code(&o), 3);
    assert_eq!(json(&o)["diagnostics"][0]["span"]["line"], 3);
}

#[test]
fn usage_errors() {
    assert_eq!(code(&run(&["check", "/nonexistent/file.parch"])), 4);
    assert_eq!(code(&run(&["frobnicate"])), 4);
    assert_eq!(code(&run(&["crosscheck"])), 4);
    assert_eq!(code(&run(&["--help"])), 0);
    let o = Command::new(env!("CARGO_BIN_EXE_privarch"))
        .args(["check", p(&example("smart_metering.parch"))])
        .env("PRIVARCH_COLOR", "sometimes")
        .output()
        .unwrap();
    assert_eq!(code(&o), 4);
}

#[test]
fn color_is_opt_in() {
    let o = Command::new(env!("CARGO_BIN_EXE_privarch"))
        .args(["check", p(&example("smart_metering.parch"))])
        .env("PRIVARCH_COLOR", "always")
        .output()
        .unwrap();
    assert!(stdout(&o).contains("\x1b[32m"));
    assert!(!stdout(&run(&["check", p(&example("smart_metering.parch"))])).contains('\x1b'));
}

#[test]
fn prove_case_study() {
    let o = run(&["prove", p(&example("smart_metering.parch"))]);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    for rule in ["[H2]", "[H6]", "[K5]", "[K∧]"] {
        assert!(out.contains(rule), "{rule} missing");
    }
    assert_eq!(out.matches("  proved").count(), 3);
}

#[test]
fn prove_json_and_goal_selection() {
    let path = example("smart_metering.parch");
    let j = json(&run(&["prove", "--json", "--goal", "1", p(&path)]));
    assert_eq!(j["all_proved"], true);
    assert_eq!(j["goals"].as_array().unwrap().len(), 1);
    assert_eq!(j["goals"][0]["result"]["outcome"], "proved");
    assert_eq!(j["goals"][0]["result"]["derivation"]["rule"], "H2");
    let o = run(&["prove", "--goal", "hasall M (Cons) & hasall M (Fee)", p(&path)]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("[H3]"));
    assert_eq!(code(&run(&["prove", "--goal", "9", p(&path)])), 4);
    assert_eq!(code(&run(&["prove", "--goal", "hasall Q (Fee)", p(&path)])), 3);
}

#[test]
fn prove_without_goals_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("nogoals.parch");
    std::fs::write(&path, "architecture a { component A; var v; has A (v); }").unwrap();
    assert_eq!(code(&run(&["prove", p(&path)])), 4);
    assert_eq!(code(&run(&["prove", "--goal", "hasall A (v)", p(&path)])), 0);
    assert_eq!(code(&run(&["simulate", p(&path)])), 4);
    assert_eq!(code(&run(&["verify", "--goal", "hasall A (v)", p(&path)])), 4);
}

#[test]
fn prove_refuses_inconsistent_architectures() {
    let o = run(&["prove", p(&fixture("duplicate_fee.parch"))]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("C1"));
}

#[test]
fn prove_without_trust_cites_missing_trust() {
    let o = run(&["prove", p(&fixture("no_trust.parch"))]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("not provable"));
    assert!(stdout(&o).contains("Trust_{P,M}"));
}

#[test]
fn prove_with_zero_budget_reports_exhaustion() {
    let o = run(&["prove", "--budget", "0", "--goal", "1", p(&example("hash_injectivity.parch"))]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("budget exhausted"));
    let j = json(&run(&["prove", "--json", "--budget", "0", "--goal", "1", p(&example("hash_injectivity.parch"))]));
    assert_eq!(j["goals"][0]["result"]["outcome"], "budget_exhausted");
    assert_eq!(code(&run(&["prove", "--goal", "1", p(&example("hash_injectivity.parch"))])), 0);
}

#[test]
fn simulate_replays_to_printed_state() {
    let path = example("smart_metering.parch");
    let o = run(&["simulate", "--seed", "7", "--count", "1", "--json", p(&path)]);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    assert_eq!(out.lines().count(), 1);
    let line: Value = serde_json::from_str(out.lines().next().unwrap()).unwrap();
    let trace: Vec<Event> = serde_json::from_value(line["trace"].clone()).unwrap();
    assert!(!trace.is_empty());
    let b = load_bundle(&path).unwrap();
    let state = run_trace(&trace, &b.architecture, &b.model.unwrap().interp).unwrap();
    assert_eq!(serde_json::to_value(&state).unwrap(), line["final"]);
}

#[test]
fn simulate_is_deterministic() {
    let path = example("spotcheck.parch");
    for extra in [&[][..], &["--json"][..]] {
        let mut args = vec!["simulate", "--seed", "11", "--count", "3"];
        args.extend_from_slice(extra);
        args.push(p(&path));
        let a = run(&args);
        let b = run(&args);
        assert_eq!(code(&a), 0);
        assert!(!a.stdout.is_empty());
        assert_eq!(a.stdout, b.stdout);
    }
    let o = run(&["simulate", "--count", "0", p(&path)]);
    assert_eq!(code(&o), 0);
    assert!(o.stdout.is_empty());
}

#[test]
fn verify_case_study_on_small_bounds() {
    let o = run(&["verify", "--domain", "0..1", "--range", "2", "--json", p(&example("smart_metering.parch"))]);
    assert_eq!(code(&o), 0);
    let j = json(&o);
    assert_eq!(j["exhaustive"], true);
    assert_eq!(j["all_hold"], true);
    for g in j["goals"].as_array().unwrap() {
        assert_eq!(g["verdict"], "holds");
    }
}

#[test]
fn verify_without_trust_gives_witness() {
    let o = run(&["verify", "--json", p(&fixture("no_trust.parch"))]);
    assert_eq!(code(&o), 1);
    let j = json(&o);
    assert_eq!(j["goals"][0]["verdict"], "holds");
    assert_eq!(j["goals"][2]["verdict"], "fails");
    assert!(j["goals"][2]["witness"]["note"].as_str().unwrap().contains("P"));
    let o = run(&["verify", p(&fixture("no_trust.parch"))]);
    assert!(stdout(&o).contains("witness:"));
}

#[test]
fn verify_labels_truncated_runs() {
    let path = example("smart_metering.parch");
    let o = run(&["verify", "--max-states", "5", "--goal", "2", p(&path)]);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    assert!(out.contains("truncated by bounds"));
    assert!(out.contains("holds within bounds"));
    let o = run(&["verify", "--max-states", "5", "--goal", "1", p(&path)]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("fails within bounds"));
    let j = json(&run(&[
        "verify",
        "--json",
        "--value-cap",
        "1",
        "--domain",
        "0..1",
        "--range",
        "1",
        "--goal",
        "2",
        p(&path),
    ]));
    assert_eq!(j["exhaustive"], false);
    assert_eq!(j["goals"][0]["verdict"], "holds-within-bounds");
    assert_eq!(code(&run(&["verify", "--domain", "3..1", p(&example("smart_metering.parch"))])), 4);
}

#[test]
fn crosscheck_case_study_agrees() {
    let o = run(&["crosscheck", "--domain", "0..1", "--range", "2", p(&example("smart_metering.parch"))]);
    assert_eq!(code(&o), 0);
    let out = stdout(&o);
    assert_eq!(out.matches(" agree ").count(), 3, "{out}");
    assert!(out.contains("soundness discrepancies: 0"));
}

#[test]
fn crosscheck_random_batch_is_sound() {
    let o = run(&["crosscheck", "--random", "25", "--seed", "1", "--json"]);
    assert_eq!(code(&o), 0);
    let j = json(&o);
    assert_eq!(j["soundness_discrepancies"], 0);
    assert_eq!(j["unclassified_gaps"], 0);
    assert_eq!(j["first_seed"], 1);
    let seeds: Vec<u64> = j["architectures"].as_array().unwrap().iter().map(|a| a["seed"].as_u64().unwrap()).collect();
    assert_eq!(seeds, (1..=25).collect::<Vec<_>>());
    let text = run(&["crosscheck", "--random", "5", "--seed", "9"]);
    assert!(stdout(&text).lines().next().unwrap().starts_with("seed 9:"));
}

#[test]
fn crosscheck_catches_the_mutation() {
    let path = fixture("no_trust.parch");
    let o = run(&["crosscheck", "--mutate", "drop-k5-trust", p(&path)]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).contains("SOUNDNESS DISCREPANCY"));
    assert_eq!(code(&run(&["crosscheck", p(&path)])), 0);
    assert!(!stdout(&run(&["crosscheck", "--help"])).contains("mutate"));
}

fn schema(name: &str) -> Value {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../docs/schemas").join(name);
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

fn assert_required(schema: &Value, v: &Value) {
    for key in schema["required"].as_array().unwrap() {
        assert!(v.get(key.as_str().unwrap()).is_some(), "missing {key} in {v}");
    }
}

#[test]
fn json_outputs_carry_schema_keys() {
    let sm = example("smart_metering.parch");
    assert_required(&schema("check.json"), &json(&run(&["check", "--json", p(&sm)])));
    assert_required(&schema("prove.json"), &json(&run(&["prove", "--json", p(&sm)])));
    let line = stdout(&run(&["simulate", "--json", p(&sm)]));
    assert_required(&schema("simulate.json"), &serde_json::from_str(line.trim()).unwrap());
    assert_required(&schema("verify.json"), &json(&run(&["verify", "--json", p(&fixture("no_trust.parch"))])));
    assert_required(&schema("crosscheck.json"), &json(&run(&["crosscheck", "--json", "--random", "2"])));
    for name in ["check.json", "prove.json", "simulate.json", "verify.json", "crosscheck.json", "common.json"] {
        assert!(schema(name)["$id"].as_str().unwrap().contains("/v1/"));
    }
}
