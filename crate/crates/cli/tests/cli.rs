use std::io::Write;
use std::path::Path;
use std::process::{Command, Output, Stdio};

use clwork::hpm::TableProgram;

const DISTRIBUTION: &str = "((p->q)&(p->r))->(p->(q&r))";

fn clwork(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_clwork")).args(args).output().expect("binary runs")
}

fn clwork_with_input(args: &[&str], input: &str) -> Output {
    let mut child = Command::new(env!("CARGO_BIN_EXE_clwork"))
        .args(args)
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .expect("binary runs");
    child.stdin.take().expect("piped").write_all(input.as_bytes()).expect("stdin accepts input");
    child.wait_with_output().expect("binary exits")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).expect("utf-8 output")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn path(dir: &Path, name: &str) -> String {
    dir.join(name).to_str().expect("utf-8 path").to_string()
}

#[test]
fn prove_distribution_in_cl1() {
    let o = clwork(&["prove", "--dialect", "cl1", DISTRIBUTION]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    assert!(text.starts_with("proved in cl1"));
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 5);
    assert!(rows[4].starts_with("5. (p -> q) & (p -> r) -> p -> q & r"));
    assert!(rows[4].ends_with("(from {2,4} by Rule (a))"));
}

#[test]
fn contraction_is_not_provable_in_cl2() {
    let o = clwork(&["prove", "--dialect", "cl2", "P -> (P /\\ P)"]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).starts_with("not provable in cl2"));
    assert_eq!(code(&clwork(&["prove", "--dialect", "cl2", "P /\\ P -> P"])), 0);
}

#[test]
fn exhausted_budget_is_unknown() {
    assert_eq!(code(&clwork(&["prove", "--budget", "1", DISTRIBUTION])), 2);
}

#[test]
fn eval_adjudicates_runs() {
    let f = "(true|false)->((false|true)/\\true)";
    let o = clwork(&["eval", "--formula", f, "--run", "B:1.1 T:2.1.2"]);
    assert_eq!((code(&o), stdout(&o).trim()), (0, "legal, winner=T"));
    let o = clwork(&["eval", "--formula", f, "--run", "T:1.1"]);
    assert_eq!(stdout(&o).trim(), "illegal, blame=T, winner=B");
    let o = clwork(&["eval", "-f", "p | q", "--set", "p=false", "--set", "q=true", "--run", "T:2"]);
    assert_eq!(stdout(&o).trim(), "legal, winner=T");
}

#[test]
fn exit_codes_for_errors() {
    assert_eq!(code(&clwork(&["frobnicate"])), 64);
    assert_eq!(code(&clwork(&["prove"])), 64);
    assert_eq!(code(&clwork(&["prove", "--dialect", "cl9", "p"])), 64);
    assert_eq!(code(&clwork(&["eval", "-f", "p", "--run", "X:1"])), 64);
    assert_eq!(code(&clwork(&["check", "--proof", "/nonexistent/proof.json"])), 64);
    assert_eq!(code(&clwork(&["parse", "p ->"])), 65);
    assert_eq!(code(&clwork(&["prove", "--dialect", "cl1", "P -> P"])), 65);
    assert_eq!(code(&clwork(&["eval", "-f", "p"])), 65);
    assert_eq!(code(&clwork(&["--help"])), 0);
}

#[test]
fn every_verb_speaks_json() {
    let dir = tempfile::tempdir().unwrap();
    let proof = path(dir.path(), "d.json");
    let agent = path(dir.path(), "d.agent");
    assert_eq!(code(&clwork(&["prove", DISTRIBUTION, "--out", &proof])), 0);
    let schedule = path(dir.path(), "s.txt");
    std::fs::write(&schedule, "0: 2.2.1\n").unwrap();
    let cases: Vec<Vec<&str>> = vec![
        vec!["parse", DISTRIBUTION],
        vec!["prove", DISTRIBUTION],
        vec!["prove", "--dialect", "cl2", "P -> P /\\ P"],
        vec!["check", "--proof", &proof],
        vec!["decide-blindfree", "!x.?y.(P(x)->P(y))"],
        vec!["eval", "-f", "p", "--set", "p=true"],
        vec!["trace", "-f", "p | q", "--set", "p=true", "--set", "q=true", "--run", "T:1"],
        vec!["static-check", "-f", "p & q", "--set", "p=true", "--set", "q=true"],
        vec!["extract", "--proof", &proof, "--out", &agent],
        vec!["verify", "--proof", &proof, "--universe", "1"],
        vec!["hpm-run", "--machine", &agent, "--schedule", &schedule],
        vec!["parse", "p ->"],
    ];
    for args in cases {
        let mut full = vec!["--json"];
        full.extend(&args);
        let o = clwork(&full);
        let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap_or_else(|e| panic!("{args:?}: {e}"));
        assert!(v.is_object(), "{args:?}");
    }
    let o = clwork(&["--json", "prove", DISTRIBUTION]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["verdict"], "proved");
    assert_eq!(v["proof"]["format"], "clwork-proof/1");
    let o = clwork(&["--json", "parse", "p ->"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["error"], "engine");
}

#[test]
fn repeated_invocations_are_identical() {
    let dir = tempfile::tempdir().unwrap();
    let proof = path(dir.path(), "c.json");
    clwork(&["prove", "P /\\ P -> P", "--out", &proof]);
    for args in [
        vec!["--json", "prove", DISTRIBUTION],
        vec!["--json", "prove", "!x.?y.(P(x)->P(y))"],
        vec!["verify", "--proof", &proof, "--shape", "P=and-of-ors", "--universe", "1"],
        vec!["trace", "-f", "!x. (p | ~p)", "--set", "p=true", "--run", "B:2 T:1"],
    ] {
        let a = clwork(&args);
        let b = clwork(&args);
        assert_eq!(a.stdout, b.stdout, "{args:?}");
        assert_eq!(code(&a), code(&b));
    }
}

#[test]
fn check_accepts_every_emitted_proof() {
    let dir = tempfile::tempdir().unwrap();
    for (i, f) in [
        DISTRIBUTION,
        "P /\\ P -> P",
        "(P | Q) -> (P \\/ Q)",
        "!x.?y.(P(x)->P(y))",
        "all x. (P(x) -> P(x))",
        "?x. (p -> p) | q",
    ]
    .iter()
    .enumerate()
    {
        let proof = path(dir.path(), &format!("{i}.json"));
        let o = clwork(&["prove", f, "--out", &proof]);
        assert_eq!(code(&o), 0, "{f}: {}", stdout(&o));
        let o = clwork(&["check", "--proof", &proof]);
        assert_eq!(code(&o), 0, "{f}");
        assert!(stdout(&o).starts_with("valid "));
    }
}

#[test]
fn tampered_proof_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let proof = path(dir.path(), "d.json");
    clwork(&["prove", DISTRIBUTION, "--out", &proof]);
    let text = std::fs::read_to_string(&proof).unwrap().replacen("(p -> q) -> p -> q", "(p -> q) -> p -> r", 1);
    std::fs::write(&proof, text).unwrap();
    let o = clwork(&["check", "--proof", &proof]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).starts_with("invalid proof"));
}

#[test]
fn extract_then_verify_and_run_on_the_machine() {
    let dir = tempfile::tempdir().unwrap();
    let proof = path(dir.path(), "d.json");
    let agent = path(dir.path(), "d.agent");
    clwork(&["prove", DISTRIBUTION, "--out", &proof]);
    assert_eq!(code(&clwork(&["extract", "--proof", &proof, "--out", &agent])), 0);
    let o = clwork(&["verify", "--agent", &agent, "-f", DISTRIBUTION, "--universe", "1", "--schedule", "interleaved"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert!(stdout(&o).starts_with("wins on"));
    assert!(stdout(&o).contains(" 8 interpretations"));

    let schedule = path(dir.path(), "s.txt");
    std::fs::write(&schedule, "# consequent right\n0: 2.2.2\n").unwrap();
    let o = clwork(&[
        "hpm-run",
        "--machine",
        &agent,
        "--schedule",
        &schedule,
        "-f",
        DISTRIBUTION,
        "--set",
        "p=true",
        "--set",
        "q=false",
        "--set",
        "r=false",
    ]);
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    assert!(text.contains("run: B:2.2.2 T:1.2\n"), "{text}");
    assert!(text.trim_end().ends_with("legal, winner=T"));
}

#[test]
fn a_losing_agent_fails_verification() {
    let dir = tempfile::tempdir().unwrap();
    let agent = path(dir.path(), "one.agent");
    std::fs::write(&agent, r#"{"format":"clwork-agent/1","kind":"fixed","moves":["1"]}"#).unwrap();
    let family = path(dir.path(), "fam.json");
    let fam = clwork::semantics::Interpretation::family_to_json(&[
        clwork::semantics::Interpretation::default().with_letter("p", true),
        clwork::semantics::Interpretation::default().with_letter("p", false),
    ]);
    std::fs::write(&family, fam).unwrap();
    let o = clwork(&["verify", "--agent", &agent, "-f", "p | ~p", "--interp-family", &family]);
    assert_eq!(code(&o), 1);
    assert!(stdout(&o).starts_with("loses on p | ~p"));
    assert_eq!(code(&clwork(&["verify", "--agent", &agent])), 64);
}

#[test]
fn hpm_run_on_a_transition_table() {
    let dir = tempfile::tempdir().unwrap();
    let machine = path(dir.path(), "m.json");
    std::fs::write(&machine, TableProgram::emit_once("2").to_json()).unwrap();
    let o = clwork(&["hpm-run", "--machine", &machine, "-f", "false | true", "--cycles", "8"]);
    assert_eq!(code(&o), 0);
    assert!(stdout(&o).contains("run: T:2\n"), "{}", stdout(&o));
    assert!(stdout(&o).trim_end().ends_with("legal, winner=T"));
    let bad = path(dir.path(), "bad.json");
    std::fs::write(&bad, "{}").unwrap();
    assert_eq!(code(&clwork(&["hpm-run", "--machine", &bad])), 65);
}

#[test]
fn play_against_the_extracted_strategy() {
    let dir = tempfile::tempdir().unwrap();
    let proof = path(dir.path(), "d.json");
    clwork(&["prove", DISTRIBUTION, "--out", &proof]);
    let args = ["play", "--proof", &proof, "--set", "p=true", "--set", "q=false", "--set", "r=true"];
    let o = clwork_with_input(&args, "moves\nB:2.2.2\n");
    assert_eq!(code(&o), 0);
    let text = stdout(&o);
    assert!(text.contains("legal: 2.2.1 2.2.2"), "{text}");
    assert!(text.contains("machine: T:1.2"));
    assert!(text.contains("position: (p -> r) -> p -> r"));
    assert!(text.trim_end().ends_with("legal, winner=T"));
    let o = clwork_with_input(&args, "1.7\n");
    assert!(stdout(&o).trim_end().ends_with("illegal, winner=T, blame=B"), "{}", stdout(&o));
    let o = clwork_with_input(&args, "");
    assert!(stdout(&o).trim_end().ends_with("legal, winner=T"));
}

#[test]
fn static_check_reports_each_valuation() {
    let o = clwork(&["static-check", "-f", "!x. (p | ~p) -> p", "--set", "p=true"]);
    assert_eq!(code(&o), 0, "{}", stdout(&o));
    assert!(stdout(&o).starts_with("{}: static up to"));
    let o = clwork(&["static-check", "-f", "p(x) | q", "--set", "q=true", "--universe", "2"]);
    assert_eq!(code(&o), 65);
}
