use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_progset")).args(args).output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stderr_json(o: &Output) -> Value {
    let text = String::from_utf8_lossy(&o.stderr);
    let line = text.lines().last().unwrap_or_default();
    serde_json::from_str(line).unwrap_or_else(|_| panic!("not JSON: {text}"))
}

#[test]
fn help_and_version() {
    assert_eq!(code(&run(&["--help"])), 0);
    assert_eq!(code(&run(&["--version"])), 0);
    assert_eq!(code(&run(&["find", "--help"])), 0);
}

#[test]
fn invalid_input_is_exit_3_with_json() {
    for args in [
        vec!["bogus"],
        vec!["construct", "cantor", "--a", "1/3"],
        vec!["construct", "cantor", "--a", "0.25"],
        vec!["construct", "equidistribute", "--epsilon", "3/2"],
        vec!["find", "gp", "--a", "1/4", "--q", "1"],
        vec!["find", "gp", "--a", "1/3", "--q", "1/2"],
        vec!["profile", "/nonexistent.json", "--t", "1"],
    ] {
        let o = run(&args);
        assert_eq!(code(&o), 3, "{args:?}");
        let j = stderr_json(&o);
        assert_eq!(j["exit_code"], 3);
        assert!(j["message"].as_str().is_some_and(|m| !m.is_empty()));
    }
    let o = run(&["find", "gp", "--a", "1/3", "--q", "1/2"]);
    assert!(stderr_json(&o)["message"].as_str().unwrap().contains("FAIL"));
}

#[test]
fn cor44_fail_is_a_result_not_an_error() {
    let o = run(&["series", "cor44", "--a", "1/3"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    assert!(text.lines().nth(1).unwrap().contains(",FAIL,"));
}

#[test]
fn run_manifest_records_and_replays() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("c.json");
    let out_s = out.to_str().unwrap();
    let o = run(&["--precision-bits", "128", "construct", "cantor", "--a", "1/4", "--depth", "5", "--out", out_s]);
    assert_eq!(code(&o), 0);
    let man_path = format!("{out_s}.manifest.json");
    let m: Value = serde_json::from_slice(&std::fs::read(&man_path).unwrap()).unwrap();
    assert_eq!(m["kind"], "run");
    assert_eq!(m["command"], "construct");
    assert_eq!(m["precision_bits"], 128);
    assert!(!m["args"].as_array().unwrap().iter().any(|a| a == "--out"));
    let c: Value = serde_json::from_slice(&std::fs::read(&out).unwrap()).unwrap();
    assert_eq!(c["removed"].as_array().unwrap().len(), 5);
    assert_eq!(code(&run(&["replay", &man_path])), 0);

    // a second run whose input was edited afterwards is rejected
    let csv = dir.path().join("w.csv");
    let csv_s = csv.to_str().unwrap();
    assert_eq!(code(&run(&["series", "prop31", "--set", out_s, "--n", "4", "--out", csv_s])), 0);
    let csv_man = format!("{csv_s}.manifest.json");
    assert_eq!(code(&run(&["replay", &csv_man])), 0);
    let mut edited = c.clone();
    edited["depth"] = 4.into();
    std::fs::write(&out, serde_json::to_vec(&edited).unwrap()).unwrap();
    let o = run(&["replay", &csv_man]);
    assert_eq!(code(&o), 4);
    assert_eq!(stderr_json(&o)["error"], "certificate");
}

#[test]
fn tampered_witnesses_are_exit_4() {
    let dir = tempfile::tempdir().unwrap();
    let set = dir.path().join("cantor.json");
    let w = dir.path().join("ap.json");
    let (set_s, w_s) = (set.to_str().unwrap(), w.to_str().unwrap());
    assert_eq!(code(&run(&["construct", "cantor", "--a", "1/4", "--out", set_s])), 0);
    assert_eq!(code(&run(&["find", "ap", "--set", set_s, "--delta", "1/3", "--terms", "8", "--out", w_s])), 0);
    assert_eq!(code(&run(&["replay", w_s])), 0);
    let mut j: Value = serde_json::from_slice(&std::fs::read(&w).unwrap()).unwrap();
    j["b"] = "1/2".into();
    std::fs::write(&w, serde_json::to_vec(&j).unwrap()).unwrap();
    assert_eq!(code(&run(&["replay", w_s])), 4);

    let g = dir.path().join("gp.json");
    let g_s = g.to_str().unwrap();
    assert_eq!(code(&run(&["find", "gp", "--a", "1/4", "--q", "1/2", "--cantor-depth", "8", "--ap-depth", "10", "--out", g_s])), 0);
    let mut j: Value = serde_json::from_slice(&std::fs::read(&g).unwrap()).unwrap();
    j["existence_margin"] = "1/1".into();
    std::fs::write(&g, serde_json::to_vec(&j).unwrap()).unwrap();
    assert_eq!(code(&run(&["replay", g_s])), 4);
}

#[test]
fn glued_certificates_replay() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("t13.json");
    let s = out.to_str().unwrap();
    assert_eq!(code(&run(&["construct", "theorem13", "--out", s])), 0);
    assert_eq!(code(&run(&["replay", s])), 0);
    let mut j: Value = serde_json::from_slice(&std::fs::read(&out).unwrap()).unwrap();
    j["removed"][0]["parts"].as_array_mut().unwrap().pop();
    std::fs::write(&out, serde_json::to_vec(&j).unwrap()).unwrap();
    assert_eq!(code(&run(&["replay", s])), 4);
}

#[test]
fn precision_from_environment() {
    let o = Command::new(env!("CARGO_BIN_EXE_progset"))
        .env("PROGSET_PRECISION_BITS", "8")
        .args(["series", "cor44", "--a", "1/4"])
        .output()
        .unwrap();
    assert_eq!(code(&o), 3);
    assert!(stderr_json(&o)["message"].as_str().unwrap().contains("precision"));
}

#[test]
fn profiles_and_series_shapes() {
    let dir = tempfile::tempdir().unwrap();
    let set = dir.path().join("e.json");
    let s = set.to_str().unwrap();
    assert_eq!(code(&run(&["construct", "equidistribute", "--epsilon", "1/4", "--out", s])), 0);
    let o = run(&["profile", s, "--grid", "0:1/2:3"]);
    assert_eq!(code(&o), 0);
    let text = String::from_utf8(o.stdout).unwrap();
    assert_eq!(text.lines().count(), 8);
    assert!(text.lines().skip(1).all(|l| l.contains(",3,4,")));
    // the written batches stop at 10, so a window past them is refused
    assert_eq!(code(&run(&["profile", s, "--t", "10"])), 3);
    let o = run(&["profile", s, "--mode", "density", "--t", "1/2", "--center", "1/2", "--one-sided"]);
    assert_eq!(String::from_utf8(o.stdout).unwrap().lines().nth(1).unwrap(), "1/2,1/2,1/2");
    let o = run(&["series", "lemma42", "--set", s]);
    assert_eq!(code(&o), 0);
    assert_eq!(String::from_utf8(o.stdout).unwrap().lines().count(), 11);
}
