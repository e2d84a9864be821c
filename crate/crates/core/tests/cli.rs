use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use cfscope::Distribution;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cfscope"))
        .args(args)
        .output()
        .expect("run cfscope")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn fixture(name: &str) -> String {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("../../fixtures")
        .join(format!("{name}.json"))
        .to_str()
        .unwrap()
        .to_string()
}

fn path_str(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// `key=value` field from a report line.
fn field<'a>(line: &'a str, key: &str) -> &'a str {
    line.split_whitespace()
        .find_map(|w| w.strip_prefix(key)?.strip_prefix('='))
        .unwrap_or_else(|| panic!("no {key} in `{line}`"))
}

#[test]
fn fixture_files_match_builtin_tables() {
    for name in cfscope::fixtures::NAMES {
        let file = Distribution::read_json(fixture(name)).unwrap();
        let builtin: Distribution = cfscope::fixtures::by_name(name).unwrap();
        assert_eq!(file.space(), builtin.space(), "{name}");
        for (a, b) in file.probs().iter().zip(builtin.probs()) {
            assert!((a - b).abs() < 1e-15, "{name}");
        }
    }
}

#[test]
fn gen_writes_a_valid_table() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("d.json");
    let r = run(&[
        "gen",
        "--family",
        "product",
        "--attrs",
        "3",
        "--seed",
        "7",
        "--out",
        path_str(&out),
    ]);
    assert!(r.status.success());
    let d = Distribution::read_json(&out).unwrap();
    assert_eq!(d.probs().len(), 8);
    assert!((d.probs().iter().sum::<f64>() - 1.0).abs() < 1e-12);
    assert_eq!(stdout(&r).lines().count(), 3);
    assert!(stdout(&r).lines().all(|l| l.starts_with("Decomposable")));
}

#[test]
fn gen_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    for p in [&a, &b] {
        assert!(run(&[
            "gen",
            "--family",
            "dirichlet",
            "--attrs",
            "4",
            "--seed",
            "11",
            "--out",
            path_str(p)
        ])
        .status
        .success());
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
}

#[test]
fn gen_xor_noise_is_holistic() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("d.json");
    let r = run(&[
        "gen",
        "--family",
        "xor-noise",
        "--attrs",
        "3",
        "--seed",
        "1",
        "--out",
        path_str(&out),
    ]);
    assert!(r.status.success());
    let text = stdout(&r);
    let strict = text.lines().find(|l| l.contains("variant=strict")).unwrap();
    assert!(strict.starts_with("Holistic"), "{strict}");
}

#[test]
fn gen_rejects_oversized_spaces() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("d.json");
    let r = run(&[
        "gen",
        "--family",
        "dirichlet",
        "--attrs",
        "21",
        "--seed",
        "0",
        "--out",
        path_str(&out),
    ]);
    assert_eq!(r.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&r.stderr).contains("exceeds the limit"));
    assert!(!out.exists());
}

#[test]
fn classify_examples() {
    let r = run(&[
        "classify",
        "--dist",
        &fixture("nb1"),
        "--hypothesis",
        "h",
        "--variant",
        "symmetric",
    ]);
    assert!(r.status.success());
    assert_eq!(
        stdout(&r).trim(),
        "WeaklyDecomposable ci_gap=0 marginal_gap=0.04 variant=symmetric tol=1e-9"
    );

    let r = run(&["classify", "--dist", &fixture("xor1"), "--hypothesis", "h"]);
    assert!(r.status.success());
    assert!(stdout(&r).starts_with("Holistic ci_gap=0.25 "), "{}", stdout(&r));

    let r = run(&[
        "classify",
        "--dist",
        &fixture("dstrict1"),
        "--hypothesis",
        "h",
        "--variant",
        "h-false",
    ]);
    assert!(stdout(&r).starts_with("Holistic ci_gap=0.08 "), "{}", stdout(&r));
    let r = run(&[
        "classify",
        "--dist",
        &fixture("dstrict1"),
        "--hypothesis",
        "h",
        "--variant",
        "strict",
    ]);
    assert!(stdout(&r).starts_with("Decomposable "), "{}", stdout(&r));
}

#[test]
fn classify_input_errors() {
    let r = run(&["classify", "--dist", &fixture("nb1"), "--hypothesis", "zzz"]);
    assert_eq!(r.status.code(), Some(1));
    let r = run(&["classify", "--dist", "/no/such/file.json", "--hypothesis", "h"]);
    assert_eq!(r.status.code(), Some(1));
    let r = run(&[
        "classify",
        "--dist",
        &fixture("nb1"),
        "--hypothesis",
        "h",
        "--variant",
        "sideways",
    ]);
    assert_eq!(r.status.code(), Some(1));
    let r = run(&["classify", "--dist", &fixture("nb1"), "--hypothesis", "h", "--tol", "0"]);
    assert_eq!(r.status.code(), Some(1));
    assert!(r.stdout.is_empty());
}

#[test]
fn classify_degenerate_hypothesis_is_a_computation_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("certain.json");
    fs::write(
        &path,
        r#"{"attributes": ["h", "a", "b"], "probabilities": [0, 0, 0, 0, 0.1, 0.2, 0.3, 0.4]}"#,
    )
    .unwrap();
    let r = run(&[
        "classify",
        "--dist",
        path_str(&path),
        "--hypothesis",
        "h",
        "--variant",
        "h-false",
    ]);
    assert_eq!(r.status.code(), Some(2));
    let r = run(&[
        "classify",
        "--dist",
        path_str(&path),
        "--hypothesis",
        "h",
        "--variant",
        "strict",
    ]);
    assert!(r.status.success());
}

#[test]
fn cf_examples() {
    let r = run(&[
        "cf",
        "--dist",
        &fixture("nb1"),
        "--hypothesis",
        "h",
        "--evidence",
        "a=true,b=true",
    ]);
    assert!(r.status.success());
    let text = stdout(&r);
    let gaps = text.lines().find(|l| l.starts_with("gaps")).unwrap();
    assert_eq!(field(gaps, "m1_gap"), "0.047619047619");

    let r = run(&[
        "cf",
        "--dist",
        &fixture("m1x1"),
        "--hypothesis",
        "h",
        "--evidence",
        "a=true,b=true",
    ]);
    let text = stdout(&r);
    let gaps = text.lines().find(|l| l.starts_with("gaps")).unwrap();
    assert_eq!(field(gaps, "m1_gap"), "0");

    let r = run(&[
        "cf",
        "--dist",
        &fixture("xor1"),
        "--hypothesis",
        "h",
        "--evidence",
        "a=true,b=false",
    ]);
    let text = stdout(&r);
    let mut lines = text.lines();
    assert_eq!(field(lines.next().unwrap(), "cf"), "1");
    assert_eq!(field(lines.next().unwrap(), "cf"), "0");
    assert_eq!(field(lines.next().unwrap(), "cf_gap"), "1");
}

#[test]
fn cf_errors() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("zero.json");
    fs::write(
        &path,
        r#"{"attributes": ["h", "a", "b"], "probabilities": [0.2, 0.2, 0.2, 0, 0.2, 0.1, 0.1, 0]}"#,
    )
    .unwrap();
    let r = run(&[
        "cf",
        "--dist",
        path_str(&path),
        "--hypothesis",
        "h",
        "--evidence",
        "a=true,b=true",
    ]);
    assert_eq!(r.status.code(), Some(2));
    let nb1 = fixture("nb1");
    for bad in ["h=true", "a=maybe", "a", "a=true,a=false", "c=true"] {
        let r = run(&["cf", "--dist", &nb1, "--hypothesis", "h", "--evidence", bad]);
        assert_eq!(r.status.code(), Some(1), "{bad}");
    }
}

fn audit(dir: &Path, extra: &[&str]) -> Output {
    let mut args = vec!["audit", "--out-dir", path_str(dir)];
    args.extend_from_slice(extra);
    run(&args)
}

#[test]
fn audit_product_is_consistent() {
    let dir = tempfile::tempdir().unwrap();
    let r = audit(dir.path(), &["--families", "product", "--count", "100", "--attrs", "3"]);
    assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
    assert!(r.stdout.is_empty());
    let summary = fs::read_to_string(dir.path().join("audit_summary.csv")).unwrap();
    assert_eq!(
        summary.lines().next().unwrap(),
        "lemma,variant,tolerance,class,consistent_count,inconsistent_count"
    );
    for lemma in ["lemma1", "lemma2", "lemma3"] {
        let row = format!("{lemma},strict,1e-6,Decomposable,100,0");
        assert!(summary.lines().any(|l| l == row), "missing {row}");
    }
    let rows = fs::read_to_string(dir.path().join("audit_rows.csv")).unwrap();
    assert_eq!(rows.lines().count(), 101);
}

#[test]
fn audit_is_deterministic() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let flags = [
        "--families",
        "dirichlet,xor-noise",
        "--count",
        "200",
        "--attrs",
        "3",
        "--seed",
        "42",
    ];
    assert!(audit(a.path(), &flags).status.success());
    let mut one_thread = vec!["--threads", "1"];
    one_thread.extend_from_slice(&flags);
    assert!(audit(b.path(), &one_thread).status.success());
    for file in ["audit_rows.csv", "audit_summary.csv"] {
        assert_eq!(
            fs::read(a.path().join(file)).unwrap(),
            fs::read(b.path().join(file)).unwrap()
        );
    }
}

#[test]
fn audit_config_errors() {
    let dir = tempfile::tempdir().unwrap();
    for flags in [
        &["--families", "unknownfam"][..],
        &["--attrs", "13"],
        &["--families", "xor-noise", "--attrs", "2"],
        &["--tols", "1e-6,abc"],
        &["--tols=-1"],
    ] {
        let r = audit(dir.path(), flags);
        assert_eq!(r.status.code(), Some(1), "{flags:?}");
    }
    let blocked: PathBuf = dir.path().join("file");
    fs::write(&blocked, "").unwrap();
    let r = audit(&blocked.join("sub"), &["--count", "2"]);
    assert_eq!(r.status.code(), Some(1));
}

#[test]
fn audit_creates_its_output_directory() {
    let dir = tempfile::tempdir().unwrap();
    let nested = dir.path().join("a/b");
    assert!(audit(&nested, &["--count", "2"]).status.success());
    assert!(nested.join("audit_rows.csv").exists());
}

fn decompose(name: &str, extra: &[&str]) -> serde_json::Value {
    let f = fixture(name);
    let mut args = vec!["decompose", "--dist", &f, "--hypothesis", "h"];
    args.extend_from_slice(extra);
    let r = run(&args);
    assert!(r.status.success(), "{}", String::from_utf8_lossy(&r.stderr));
    serde_json::from_slice(&r.stdout).unwrap()
}

#[test]
fn decompose_examples() {
    let j = decompose("xor1", &["--tol", "1e-9", "--max-group-size", "2"]);
    assert_eq!(j["partition"], serde_json::json!([["a", "b"]]));
    assert_eq!(j["max_error"], 0.0);
    assert_eq!(j["merges"].as_array().unwrap().len(), 1);

    let j = decompose("nb1", &[]);
    assert_eq!(j["partition"], serde_json::json!([["a"], ["b"]]));
    assert!(j["max_error"].as_f64().unwrap() < 1e-12);
    assert!(j["merges"].as_array().unwrap().is_empty());

    let j = decompose("xor1", &["--max-group-size", "1"]);
    assert_eq!(j["partition"], serde_json::json!([["a"], ["b"]]));
    assert!((j["max_error"].as_f64().unwrap() - 0.5).abs() < 1e-12);
}

#[test]
fn decompose_writes_the_printed_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    let r = run(&[
        "decompose",
        "--dist",
        &fixture("xor1"),
        "--hypothesis",
        "h",
        "--out",
        path_str(&out),
    ]);
    assert!(r.status.success());
    assert_eq!(fs::read(&out).unwrap(), r.stdout);
}

#[test]
fn usage_errors_exit_3() {
    assert_eq!(run(&[]).status.code(), Some(3));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(3));
    assert_eq!(run(&["classify", "--dist", "x.json"]).status.code(), Some(3));
    assert_eq!(
        run(&["gen", "--family", "product", "--attrs", "many", "--seed", "1", "--out", "d"])
            .status
            .code(),
        Some(3)
    );
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}
