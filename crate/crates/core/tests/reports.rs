use turanlab::extremal::Theorem;
use turanlab::report::{emit_csv, emit_json, run_sweep, SweepConfig, CSV_HEADER};

fn small() -> SweepConfig {
    SweepConfig {
        n_values: vec![12, 16],
        k_values: vec![1],
        theorems: vec![Theorem::Markov],
        ..SweepConfig::default()
    }
}

#[test]
fn reemission_is_byte_identical() {
    let report = run_sweep(&small()).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    emit_csv(&report, &a).unwrap();
    emit_csv(&report, &b).unwrap();
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    emit_csv(&report, &a).unwrap();
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let text = std::fs::read_to_string(&a).unwrap();
    assert_eq!(text.lines().next(), Some(CSV_HEADER));
    assert_eq!(text.lines().count(), 3);
}

#[test]
fn reruns_agree_apart_from_wall_time() {
    let first = run_sweep(&small()).unwrap();
    let second = run_sweep(&SweepConfig { jobs: 2, ..small() }).unwrap();
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    emit_json(&first, &a).unwrap();
    emit_json(&second, &b).unwrap();
    let strip = |p: &std::path::Path| {
        let mut v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap();
        v["metadata"]["wall_time_seconds"] = serde_json::Value::Null;
        v
    };
    assert_eq!(strip(&a), strip(&b));
}

#[test]
fn one_row_report_is_two_lines() {
    let cfg = SweepConfig { n_values: vec![12], ..small() };
    let report = run_sweep(&cfg).unwrap();
    assert_eq!(report.rows.len(), 1);
    assert!(report.rows[0].pass);
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("one.csv");
    emit_csv(&report, &path).unwrap();
    assert_eq!(std::fs::read_to_string(&path).unwrap().lines().count(), 2);
}
