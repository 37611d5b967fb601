use std::path::Path;
use std::process::{Command, Output};

use ordagg::chain::{discrete_representative, sample_table, Chain};
use ordagg::document::TableDocument;
use ordagg::functions::{Mean, Mode, TwoBranch};
use ordagg::scale::{rat, IntervalSpec};

fn ordagg(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ordagg")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

#[test]
fn orbit_listings() {
    let o = ordagg(&["orbits", "2", "closed"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 12);
    assert_eq!(text.lines().last(), Some("count: 11"));
    assert!(stdout(&ordagg(&["orbits", "2", "closed", "--strong"])).ends_with("count: 9\n"));
    assert!(stdout(&ordagg(&["orbits", "1", "open"])).ends_with("count: 1\n"));
    let json: serde_json::Value = serde_json::from_str(&stdout(&ordagg(&["orbits", "2", "closed", "--format", "json"]))).unwrap();
    assert_eq!(json["count"], 11);
}

#[test]
fn set_function_listings() {
    for (n, count) in [("1", 1), ("2", 4), ("3", 18)] {
        let o = ordagg(&["enumerate-cn", n]);
        assert_eq!(o.status.code(), Some(0));
        assert!(stdout(&o).ends_with(&format!("count: {count}\n")), "{n}");
    }
    let o = ordagg(&["enumerate-cn", "6"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(!o.stderr.is_empty());
}

#[test]
fn represent_tables() {
    let o = ordagg(&["represent", "min", "3", "closed"]);
    assert_eq!(o.status.code(), Some(0));
    let doc = TableDocument::parse(&stdout(&o)).unwrap();
    assert_eq!(doc.table.entries(), &[0, 0, 0, 0, 1, 1, 0, 1, 2]);
    let doc = TableDocument::parse(&stdout(&ordagg(&["represent", "const-bottom", "3", "closed"]))).unwrap();
    assert!(doc.table.entries().iter().all(|&t| t == 0));
    let doc = TableDocument::parse(&stdout(&ordagg(&["represent", "median3", "3", "open"]))).unwrap();
    assert_eq!(doc.table.len(), 27);
    assert_eq!(doc.table.get(&[2, 0, 1]), 1);
    assert_eq!(ordagg(&["represent", "const-top", "3", "open"]).status.code(), Some(2));
}

#[test]
fn represented_tables_classify_as_order_invariant() {
    let dir = tempfile::tempdir().unwrap();
    for spec in ["min", "max", "median3", "os2:3", "proj2:3", "[{1},{2,3}]", "mode:3"] {
        let o = ordagg(&["represent", spec, "3", "open"]);
        assert_eq!(o.status.code(), Some(0), "{spec}");
        let file = write(dir.path(), "t.txt", &stdout(&o));
        let o = ordagg(&["classify", &file, "--family", "oi"]);
        assert_eq!(o.status.code(), Some(0), "{spec}: {}", stdout(&o));
        assert!(stdout(&o).contains("order-invariant: yes"));
    }
}

#[test]
fn classify_mode_table() {
    let dir = tempfile::tempdir().unwrap();
    let t = discrete_representative(&Mode(3), Chain::new(3).unwrap(), IntervalSpec::OPEN).unwrap();
    let file = write(dir.path(), "mode.txt", &TableDocument::new(t).with_interval(IntervalSpec::OPEN).to_text());
    let o = ordagg(&["classify", &file, "--family", "oi"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    assert!(text.contains("order-invariant: yes"));
    assert!(text.contains("nondecreasing: no"));
}

#[test]
fn classify_two_branch_table() {
    let dir = tempfile::tempdir().unwrap();
    let grid = vec![rat(0, 1), rat(1, 2), rat(1, 1)];
    let (t, _) = sample_table(&TwoBranch, &[grid.clone(), grid]).unwrap();
    let file = write(dir.path(), "ex.txt", &TableDocument::new(t).with_interval(IntervalSpec::CLOSED).to_text());
    let o = ordagg(&["classify", &file, "--family", "cm1"]);
    assert_eq!(o.status.code(), Some(0), "{}", stdout(&o));
    assert!(stdout(&o).contains("cm-single: yes"));
    assert!(stdout(&o).contains("cm-single g-classes -> 2"));
}

#[test]
fn classify_mean_table_and_verify() {
    let dir = tempfile::tempdir().unwrap();
    let grid: Vec<_> = [1, 3, 5, 8].iter().map(|&p| rat(p, 10)).collect();
    let (t, _) = sample_table(&Mean(2), &[grid.clone(), grid]).unwrap();
    let labels: Vec<String> = ["1", "3", "5", "8"].iter().map(|s| s.to_string()).collect();
    let mut doc = TableDocument::new(t).with_interval(IntervalSpec::OPEN);
    doc.input_labels = Some(vec![labels.clone(), labels]);
    let file = write(dir.path(), "mean.txt", &doc.to_text());
    let o = ordagg(&["classify", &file, "--family", "cm1", "--focus", "1,2/0,3"]);
    assert_eq!(o.status.code(), Some(1));
    let text = stdout(&o);
    assert!(text.contains("cm-single: no"));
    assert!(text.contains("(3,5)") && text.contains("(1,8)"), "{text}");
    let report = write(dir.path(), "report.txt", &text);
    assert_eq!(ordagg(&["verify-witness", &report]).status.code(), Some(0));
}

#[test]
fn falsify_and_verify() {
    let dir = tempfile::tempdir().unwrap();
    let o = ordagg(&["falsify", "mean", "--mode", "cm1", "--trials", "1000", "--seed", "7"]);
    assert_eq!(o.status.code(), Some(1));
    let report = write(dir.path(), "mean.txt", &stdout(&o));
    let v = ordagg(&["verify-witness", &report]);
    assert_eq!(v.status.code(), Some(0), "{}", stdout(&v));

    let o = ordagg(&["falsify", "mean", "--mode", "cm1", "--format", "json"]);
    assert_eq!(o.status.code(), Some(1));
    let report = write(dir.path(), "mean.json", &stdout(&o));
    assert_eq!(ordagg(&["verify-witness", &report]).status.code(), Some(0));

    let o = ordagg(&["falsify", "median3", "--mode", "inv", "--trials", "1000", "--seed", "7"]);
    assert_eq!(o.status.code(), Some(0));
    let report = write(dir.path(), "median.txt", &stdout(&o));
    assert_eq!(ordagg(&["verify-witness", &report]).status.code(), Some(1));

    assert_eq!(ordagg(&["falsify", "max", "--mode", "cmi"]).status.code(), Some(1));
    assert_eq!(ordagg(&["falsify", "squash-max", "--mode", "cm1", "--interval", "open"]).status.code(), Some(0));
}

#[test]
fn tampered_witness_is_not_confirmed() {
    let dir = tempfile::tempdir().unwrap();
    let text = stdout(&ordagg(&["falsify", "mean", "--mode", "cm1"]));
    let report = ordagg::document::ReportDocument::parse(&text).unwrap();
    let mut forged = report.clone();
    forged.subject = ordagg::document::Subject::Function("max".into());
    let file = write(dir.path(), "forged.txt", &forged.to_text());
    assert_eq!(ordagg(&["verify-witness", &file]).status.code(), Some(1));
}

#[test]
fn input_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.txt", "arity: 2\ninput_sizes: 2 2\noutput_size: 2\n0 0 -> 0\n0 1 -> 9\n");
    let o = ordagg(&["classify", &bad]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 5"), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(ordagg(&["classify", "/nonexistent/table.txt"]).status.code(), Some(2));
    assert_eq!(ordagg(&["falsify", "no-such-function"]).status.code(), Some(2));
    assert_eq!(ordagg(&["orbits", "2", "half-open"]).status.code(), Some(2));
}

#[test]
fn output_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let t = discrete_representative(&Mode(3), Chain::new(3).unwrap(), IntervalSpec::OPEN).unwrap();
    let file = write(dir.path(), "mode.txt", &TableDocument::new(t).with_interval(IntervalSpec::OPEN).to_text());
    for args in [
        vec!["classify", file.as_str()],
        vec!["classify", file.as_str(), "--format", "json"],
        vec!["falsify", "mean", "--mode", "cmi"],
        vec!["orbits", "3", "left-closed", "--strong"],
    ] {
        let a = ordagg(&args);
        let b = ordagg(&args);
        assert_eq!(a.stdout, b.stdout, "{args:?}");
        assert_eq!(a.status.code(), b.status.code());
    }
}
