//! The command line, driven in-process.

use std::path::Path;

use dyncons::cli::{run_cli, EXIT_CHECK_FAILED, EXIT_OK, EXIT_USAGE};

fn cli(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = run_cli(
        std::iter::once("dyncons").chain(args.iter().copied()),
        &mut out,
        &mut err,
    );
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn p(dir: &Path, name: &str) -> String {
    dir.join(name).to_str().unwrap().to_string()
}

#[test]
fn generate_summary() {
    let dir = tempfile::tempdir().unwrap();
    let s = p(dir.path(), "s.json");
    let (code, out, _) = cli(&["generate", "--gen", "stable_window", "--n", "8", "--d", "7", "--seed", "1", "--r-st", "5", "--out", &s]);
    assert_eq!(code, EXIT_OK);
    assert_eq!(
        out,
        "generator=stable_window seed=1 n=8 D=7 horizon=41\n\
         root components: [1,4] {0,2,4,6} | [5,34] {0,1,3} | [35,36] {0,1,2,6,7} | [37,41] {1,2,3,5}\n\
         roots=1 multi_root_rounds=0/41\n\
         unbounded_stable_roots=0\n\
         r_ST=5 bound=34\n\
         tag=ASSUMPTION_1 oracle=ASSUMPTION_1\n\
         assumption holds\n"
    );
}

#[test]
fn run_then_check() {
    let dir = tempfile::tempdir().unwrap();
    let (s, t) = (p(dir.path(), "s.json"), p(dir.path(), "t.jsonl"));
    cli(&["generate", "--gen", "stable_window", "--n", "6", "--d", "3", "--seed", "9", "--r-st", "2", "--out", &s]);
    let (code, out, _) = cli(&["run", "--scenario", &s, "--trace", &t]);
    assert_eq!(code, EXIT_OK, "{out}");
    assert!(out.starts_with("decided=6/6 "));
    assert!(out.contains("TERMINATION: pass"));
    let (code, out, _) = cli(&["check", "--scenario", &s, "--trace", &t]);
    assert_eq!(code, EXIT_OK, "{out}");
    assert!(out.starts_with("REPLAY: pass\nAGREEMENT: pass\n"));

    // tamper with a recorded state
    let text = std::fs::read_to_string(&t).unwrap();
    let tampered = text.replacen("\"locked\":true", "\"locked\":false", 1);
    assert_ne!(text, tampered);
    std::fs::write(&t, tampered).unwrap();
    let (code, out, _) = cli(&["check", "--scenario", &s, "--trace", &t]);
    assert_eq!(code, EXIT_CHECK_FAILED);
    assert!(out.starts_with("REPLAY: fail"));
}

#[test]
fn two_roots_fails_agreement() {
    let dir = tempfile::tempdir().unwrap();
    let (s, t) = (p(dir.path(), "s.json"), p(dir.path(), "t.jsonl"));
    let (_, out, _) = cli(&["generate", "--gen", "two_roots", "--n0", "2", "--n1", "2", "--horizon", "40", "--out", &s]);
    assert!(out.contains("tag=VIOLATION(two_roots) oracle=VIOLATION(multiple_roots)"));
    let (code, out, _) = cli(&["run", "--scenario", &s, "--trace", &t]);
    assert_eq!(code, EXIT_CHECK_FAILED);
    assert!(out.contains("AGREEMENT: fail (round 11, processes [0,2], values [0,1]"));
}

#[test]
fn oracle_queries() {
    let dir = tempfile::tempdir().unwrap();
    let s = p(dir.path(), "c.json");
    cli(&["generate", "--gen", "complete_then_rings", "--out", &s]);
    assert_eq!(cli(&["oracle", "--scenario", &s, "--query", "diam", "1", "3"]).1, "D^[1,3]=1\n");
    assert_eq!(cli(&["oracle", "--scenario", &s, "--query", "cd", "0", "0", "2"]).1, "cd_2(0,0)=1\n");
    assert_eq!(cli(&["oracle", "--scenario", &s, "--query", "rst"]).1, "r_ST=NONE\n");
    assert_eq!(cli(&["oracle", "--scenario", &s, "--query", "bogus"]).0, EXIT_USAGE);
}

#[test]
fn empty_batch_writes_header_only() {
    let dir = tempfile::tempdir().unwrap();
    let csv = p(dir.path(), "e.csv");
    let (code, out, _) = cli(&["batch", "--gen", "churn", "--count", "0", "--out", &csv]);
    assert_eq!(code, EXIT_OK);
    assert!(out.starts_with("rows=0"));
    let text = std::fs::read_to_string(&csv).unwrap();
    assert_eq!(text.lines().count(), 1);
    assert!(text.starts_with("seed,generator,n,D,horizon,r_st,"));
}

#[test]
fn batch_then_report() {
    let dir = tempfile::tempdir().unwrap();
    let csv = p(dir.path(), "b.csv");
    let (code, _, _) = cli(&["batch", "--gen", "stable_window", "--count", "5", "--out", &csv]);
    assert_eq!(code, EXIT_OK);
    let (code, out, _) = cli(&["report", "--input", &csv, "--format", "json"]);
    assert_eq!(code, EXIT_OK);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["rows"], 5);
}

#[test]
fn usage_errors() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(cli(&["run", "--scenario", "/nonexistent.json", "--trace", "/tmp/x"]).0, EXIT_USAGE);
    assert_eq!(cli(&["generate", "--gen", "churn", "--out", &p(dir.path(), "x.json")]).0, EXIT_USAGE);
    let (code, _, err) = cli(&["generate", "--gen", "churn", "--n", "3", "--d", "5", "--out", &p(dir.path(), "x.json")]);
    assert_eq!(code, EXIT_USAGE);
    assert!(err.starts_with("error: "));
    std::fs::write(dir.path().join("bad.json"), "{\"n\": 2,\n \"D\": oops}").unwrap();
    let (code, _, err) = cli(&["oracle", "--scenario", &p(dir.path(), "bad.json"), "--query", "roots"]);
    assert_eq!(code, EXIT_USAGE);
    assert!(err.contains("line 2"), "{err}");
}
