//! End-to-end runs of the `pwldyn` binary: exit codes, warnings and
//! byte-identical output across runs.

use std::process::{Command, Output};

fn pwldyn(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pwldyn"))
        .args(args)
        .env_remove("PWLDYN_BUDGET")
        .output()
        .expect("binary runs")
}

fn code(args: &[&str]) -> i32 {
    pwldyn(args).status.code().expect("exit code")
}

fn stdout(args: &[&str]) -> String {
    String::from_utf8(pwldyn(args).stdout).unwrap()
}

#[test]
fn orbit_exit_codes() {
    assert_eq!(code(&["orbit", "--a", "0", "--b", "-1", "--x", "5", "--y", "7"]), 0);
    assert_eq!(code(&["orbit", "--a", "1", "--b", "3", "--x", "1", "--y", "1", "--max-iters", "1"]), 2);
    let out = stdout(&["orbit", "--a", "1", "--b", "3", "--x", "1", "--y", "1"]);
    assert!(out.contains("period 3"), "{out}");
}

#[test]
fn usage_and_unsupported_codes() {
    assert_eq!(code(&["--help"]), 0);
    assert_eq!(code(&["no-such-command"]), 1);
    assert_eq!(code(&["orbit", "--b", "one", "--x", "0", "--y", "0"]), 1);
    assert_eq!(code(&["rotation", "--b", "3"]), 4);
    assert_eq!(code(&["trapezoid", "--b", "1/2"]), 4);
    assert_eq!(code(&["entropy", "--a", "1", "--b", "1"]), 4);
}

#[test]
fn decimal_input_warns() {
    let out = pwldyn(&["graph", "build", "--b", "0.2"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(!out.stderr.is_empty());
}

#[test]
fn graph_check_and_entropy() {
    assert_eq!(code(&["graph", "check", "--b", "-3"]), 0);
    let out = stdout(&["entropy", "--b", "3"]);
    assert!(out.contains("0.2534"), "{out}");
    assert!(stdout(&["rotation", "--b", "-1"]).contains("1/6"));
}

#[test]
fn output_is_deterministic() {
    for args in [
        &["classify", "--b", "-3/2"][..],
        &["entropy", "--b", "3"][..],
        &["orbit", "--b", "-3/2", "--x", "1/3", "--y", "2", "--format", "json"][..],
    ] {
        let first = pwldyn(args);
        let second = pwldyn(args);
        assert_eq!(first.status.code(), Some(0), "{args:?}");
        assert_eq!(first.stdout, second.stdout, "{args:?}");
        serde_json::from_slice::<serde_json::Value>(&first.stdout).expect("valid json");
    }
    let first = pwldyn(&["verify", "--suite", "atlas"]);
    assert_eq!(first.status.code(), Some(0));
    let text = String::from_utf8(first.stdout).unwrap();
    assert!(text.starts_with("PASS criterion  3"), "{text}");
}

#[test]
fn budget_from_environment() {
    let out = Command::new(env!("CARGO_BIN_EXE_pwldyn"))
        .args(["orbit", "--a", "1", "--b", "3", "--x", "1", "--y", "1"])
        .env("PWLDYN_BUDGET", "1")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}
