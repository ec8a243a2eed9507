use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use blockfree::corpus;
use blockfree::io::{parse_cfg, parse_epda, parse_parser, write_cfg, write_epda, write_parser, Names};
use blockfree::pipeline::{run_pipeline, solve, Options};
use blockfree::Error;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn cli(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_blockfree")).args(args).output().unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn running_fixture_matches_builtin() {
    let text = std::fs::read_to_string(fixture("running.epda")).unwrap();
    assert_eq!(parse_epda(&text, Names::Strict).unwrap(), corpus::running_example());
}

#[test]
fn fixtures_parse_or_fail_as_documented() {
    for name in ["running.epda", "empty.epda", "anbn.epda", "nondet.epda"] {
        let text = std::fs::read_to_string(fixture(name)).unwrap();
        let a = parse_epda(&text, Names::Strict).unwrap();
        assert_eq!(parse_epda(&write_epda(&a), Names::Strict).unwrap(), a, "{}", name);
    }
    let text = std::fs::read_to_string(fixture("broken.epda")).unwrap();
    let err = parse_epda(&text, Names::Strict).unwrap_err();
    assert!(matches!(err, Error::Parse { line: 4, .. }), "{:?}", err);
}

#[test]
fn intermediates_roundtrip() {
    let run = run_pipeline(&corpus::running_example(), Options::default());
    for s in &run.stages {
        if let Some(a) = run.epda(s.step) {
            assert_eq!(&parse_epda(&write_epda(a), Names::Lenient).unwrap(), a, "step {}", s.step);
        }
        if let Some(g) = run.cfg(s.step) {
            assert_eq!(&parse_cfg(&write_cfg(g), Names::Lenient).unwrap(), g, "step {}", s.step);
        }
        if let Some(p) = run.parser(s.step) {
            assert_eq!(&parse_parser(&write_parser(p), Names::Lenient).unwrap(), p, "step {}", s.step);
        }
    }
}

#[test]
fn reserved_names_need_lenient_mode() {
    let m = solve(&corpus::anbn()).unwrap();
    let text = write_epda(&m);
    assert!(parse_epda(&text, Names::Strict).is_err());
    assert_eq!(parse_epda(&text, Names::Lenient).unwrap(), m);
}

#[test]
fn run_writes_output_and_intermediates() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out.epda");
    let inter = dir.path().join("steps");
    let o = cli(&[
        "run",
        "--input",
        path(&fixture("running.epda")),
        "--output",
        out.to_str().unwrap(),
        "--emit-intermediates",
        inter.to_str().unwrap(),
        "--verify",
        "--maxlen",
        "9",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let written = parse_epda(&std::fs::read_to_string(&out).unwrap(), Names::Lenient).unwrap();
    assert_eq!(written, solve(&corpus::running_example()).unwrap());
    assert_eq!(std::fs::read_dir(&inter).unwrap().count(), 13);
}

#[test]
fn json_reports_parse() {
    let o = cli(&["--report", "json", "run", "--input", path(&fixture("anbn.epda")), "--verify"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["ok"], true);
    assert_eq!(v["stages"].as_array().unwrap().len(), 13);
    assert_eq!(v["verify"]["items"].as_array().unwrap().len(), 5);

    let o = cli(&["--report", "json", "check", "--input", path(&fixture("running.epda")), "--lifelock"]);
    assert_eq!(o.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v[0]["name"], "lifelock-free");
    assert_eq!(v[0]["passed"], false);
}

#[test]
fn exit_codes() {
    let run = |f: &str| cli(&["run", "--input", path(&fixture(f))]).status.code();
    assert_eq!(run("anbn.epda"), Some(0));
    assert_eq!(run("empty.epda"), Some(1));
    assert_eq!(run("broken.epda"), Some(2));
    assert_eq!(run("nondet.epda"), Some(3));
    assert_eq!(run("missing.epda"), Some(2));
}

#[test]
fn check_passes_on_the_solution() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out.epda");
    let o = cli(&["run", "--input", path(&fixture("running.epda")), "--output", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let o = cli(&[
        "check",
        "--input",
        out.to_str().unwrap(),
        "--against",
        path(&fixture("running.epda")),
        "--maxlen",
        "9",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stdout));
    assert_eq!(cli(&["check", "--input", path(&fixture("running.epda"))]).status.code(), Some(1));
}

#[test]
fn lang_equiv_reach_dot_step() {
    let o = cli(&["lang", "--input", path(&fixture("running.epda")), "--maxlen", "5"]);
    assert_eq!(String::from_utf8_lossy(&o.stdout).lines().collect::<Vec<_>>(), ["b", "a a b b d"]);

    let anbn = fixture("anbn.epda");
    assert_eq!(cli(&["equiv", path(&anbn), path(&anbn), "--maxlen", "6"]).status.code(), Some(0));
    let o = cli(&["equiv", path(&anbn), path(&fixture("running.epda")), "--maxlen", "4"]);
    assert_eq!(o.status.code(), Some(1));

    let o = cli(&["reach", "--input", path(&fixture("running.epda")), "--k", "1"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&o.stdout).lines().any(|l| l.starts_with("p4") && l.contains('-')));

    let o = cli(&["dot", "--input", path(&anbn)]);
    assert!(String::from_utf8_lossy(&o.stdout).starts_with("digraph"));
    let o = cli(&["dot", "--input", path(&anbn), "--step", "6"]);
    assert!(String::from_utf8_lossy(&o.stdout).contains("~q0"));

    let o = cli(&["step", "4", "--input", path(&anbn)]);
    assert!(String::from_utf8_lossy(&o.stdout).starts_with("cfg"));
}

#[test]
fn readme_format_examples_parse() {
    let readme = std::fs::read_to_string(PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../README.md")).unwrap();
    let blocks: Vec<&str> = readme.split("```").skip(1).step_by(2).map(|b| b.trim_start_matches('\n')).collect();
    let mut seen = 0;
    for b in blocks {
        match b.lines().next() {
            Some("epda") => {
                parse_epda(b, Names::Strict).unwrap();
            }
            Some("cfg") => {
                parse_cfg(b, Names::Strict).unwrap();
            }
            Some("parser") => {
                parse_parser(b, Names::Strict).unwrap();
            }
            _ => continue,
        }
        seen += 1;
    }
    assert_eq!(seen, 3);
}
