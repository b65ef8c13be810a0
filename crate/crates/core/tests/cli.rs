use std::path::PathBuf;
use std::process::{Command, Output};

fn bin(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_metriclass")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name).display().to_string()
}

#[test]
fn evaluate_prints_fraction_and_decimal() {
    let o = bin(&["evaluate", "--measure", "f-measure", "--table", "tp=2,fp=3,fn=3,tn=7"]);
    assert!(o.status.success(), "{o:?}");
    assert!(stdout(&o).contains("2/5 (0.400)"), "{}", stdout(&o));
}

#[test]
fn classify_reports_collision() {
    let o = bin(&["classify", "--measure", "prec@4", "--domain", "binary:L=4,R=4"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert!(text.contains("ordinal/pseudometric"), "{text}");
    assert!(text.contains("= 1/4"), "{text}");
}

#[test]
fn classify_json_parses() {
    let o = bin(&["classify", "--measure", "rbp?p=1/2", "--domain", "binary:L=3,R=3", "--format", "json"]);
    assert!(o.status.success());
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["category"], "interval/metric");
    assert_eq!(v["injective"], true);
}

#[test]
fn exit_codes() {
    assert_eq!(bin(&["classify", "--measure", "nonsense", "--domain", "binary:L=2"]).status.code(), Some(1));
    assert_eq!(bin(&["frobnicate"]).status.code(), Some(1));
    // a well-formed request the library refuses
    let o = bin(&["classify", "--measure", "rnorm", "--domain", "binary:L=2,R=2"]);
    assert_eq!(o.status.code(), Some(2), "{o:?}");
    assert!(String::from_utf8_lossy(&o.stderr).starts_with("error:"));
    assert_eq!(bin(&["--help"]).status.code(), Some(0));
}

#[test]
fn hasse_writes_dot_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("prec.dot");
    let o = bin(&["hasse", "--measure", "prec@4", "--domain", "binary:L=4,R=4", "--out", path.to_str().unwrap()]);
    assert!(o.status.success(), "{o:?}");
    let dot = std::fs::read_to_string(&path).unwrap();
    assert!(dot.starts_with("digraph"));
    assert_eq!(dot.matches("->").count(), 4);
}

#[test]
fn table_formats() {
    for format in ["markdown", "text", "csv", "json"] {
        let o = bin(&["table", "--suite", "paper", "--format", format]);
        assert!(o.status.success(), "{format}: {o:?}");
        let text = stdout(&o);
        assert!(text.contains("Rnorm"), "{format}");
        let flag = if format == "csv" { "disagree" } else { "contested" };
        assert!(text.contains(flag), "{format}");
    }
}

#[test]
fn ingest_eval_json_marks_mean_impermissible() {
    let o = bin(&[
        "ingest-eval", "--qrels", &fixture("qrels.txt"), "--run", &fixture("run.txt"),
        "--measure", "ap", "--depth", "4", "--aggregate", "mean", "--format", "json",
    ]);
    assert!(o.status.success(), "{o:?}");
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["topics"].as_array().unwrap().len(), 3);
    assert_eq!(v["aggregate"]["permissible"], false);
    assert!(v["aggregate"]["display"].as_str().unwrap().starts_with("5/9"));
}

#[test]
fn quiet_warnings_suppresses_the_note() {
    let o = bin(&[
        "ingest-eval", "--qrels", &fixture("qrels.txt"), "--run", &fixture("run.txt"),
        "--measure", "ap", "--depth", "4", "--aggregate", "mean", "--quiet-warnings",
    ]);
    assert!(o.status.success());
    assert!(!stdout(&o).contains(metriclass::measures::PERMISSIBILITY_WARNING));
}

#[test]
fn missing_file_is_an_error() {
    let o = bin(&["ingest-eval", "--qrels", "/nonexistent/q", "--run", "/nonexistent/r", "--measure", "ap", "--depth", "4"]);
    assert_ne!(o.status.code(), Some(0));
}
