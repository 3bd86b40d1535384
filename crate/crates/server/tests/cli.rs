use std::path::PathBuf;
use std::process::{Command, Output};

fn dataset() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures/dataset")
}

fn tabqa(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tabqa")).args(args).env("RUST_LOG", "warn").output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

const RUNNING_EXAMPLE: &str = "in what movie was barton also the producer?";

#[test]
fn train_then_ask() {
    let dir = tempfile::tempdir().unwrap();
    let model = dir.path().join("model.bin");
    let corpus = dir.path().join("corpus.tsv");
    let root = dataset();
    let o = tabqa(&[
        "train",
        "--dataset",
        root.to_str().unwrap(),
        "--out",
        model.to_str().unwrap(),
        "--corpus",
        corpus.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(stdout(&o).contains("0 violations"));
    assert!(model.is_file());
    let rows = std::fs::read_to_string(&corpus).unwrap();
    assert_eq!(rows.lines().next(), Some("terms\tcolumns\tcorrect"));
    assert!(rows.lines().count() > 1);

    let table = root.join("csv/actor.csv");
    let o = tabqa(&[
        "--model",
        model.to_str().unwrap(),
        "ask",
        "--table",
        table.to_str().unwrap(),
        "--question",
        RUNNING_EXAMPLE,
        "--abduction",
        "ml",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let out = stdout(&o);
    assert!(out.starts_with("Answer: Pink Sky\n"), "{out}");
    assert!(out.contains("We think you meant: In what [title] was barton also the producer."));
    assert!(out.contains("machine-learnt abductive match"));

    let o = tabqa(&[
        "--model",
        model.to_str().unwrap(),
        "ask",
        "--table",
        table.to_str().unwrap(),
        "--question",
        RUNNING_EXAMPLE,
        "--abduction",
        "ml",
        "--json",
    ]);
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["answer"], serde_json::json!(["Pink Sky"]));
    assert_eq!(v["interpretation"]["doubt"], true);
}

#[test]
fn ask_without_a_model_in_ml_mode_fails() {
    let table = dataset().join("csv/actor.csv");
    let o = tabqa(&["ask", "--table", table.to_str().unwrap(), "--question", RUNNING_EXAMPLE, "--abduction", "ml"]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("model required"));
}

#[test]
fn ask_with_a_missing_table_fails() {
    let o = tabqa(&["ask", "--table", "/nonexistent/t.csv", "--question", "who?"]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("failed to load table"));
}

#[test]
fn eval_prints_a_summary_and_writes_outcomes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("outcomes.tsv");
    let root = dataset();
    let o = tabqa(&[
        "eval",
        "--dataset",
        root.to_str().unwrap(),
        "--split",
        "train",
        "--limit",
        "4",
        "--abduction",
        "off",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let s = stdout(&o);
    assert!(s.contains("examples         4"), "{s}");
    assert_eq!(std::fs::read_to_string(&out).unwrap().lines().count(), 5);

    let o = tabqa(&["eval", "--dataset", root.to_str().unwrap(), "--split", "dev"]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("unknown split"));
}

#[test]
fn unknown_abduction_mode_is_rejected() {
    let o = tabqa(&["ask", "--table", "t.csv", "--question", "q", "--abduction", "psychic"]);
    assert!(!o.status.success());
    assert!(String::from_utf8_lossy(&o.stderr).contains("unknown abduction mode"));
}
