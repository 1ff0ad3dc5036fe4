use std::path::Path;
use std::process::{Command, Output};

use turanlab::extremal::{solve_endpoint, Denominator, RatioProblem};
use turanlab::poly::Weight;
use turanlab::real::{PrecisionContext, Real};

fn turanlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_turanlab"))
        .args(args)
        .env_remove("TURANLAB_BITS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).expect("utf-8 output")
}

fn records(path: &Path) -> Vec<csv::StringRecord> {
    csv::Reader::from_path(path)
        .expect("csv opens")
        .records()
        .collect::<Result<_, _>>()
        .expect("csv parses")
}

#[test]
fn usage_errors_exit_3() {
    for args in [
        &["frobnicate"][..],
        &["ratio", "12", "1"],
        &["--bits", "8", "muntz", "3", "1"],
        &["verify-lemmas", "--lemma", "9.9"],
        &["--seed", "0xZZ", "muntz", "3", "1"],
    ] {
        assert_eq!(turanlab(args).status.code(), Some(3), "{args:?}");
    }
}

#[test]
fn help_exits_0() {
    let o = turanlab(&["--help"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("verify-lemmas"));
}

#[test]
fn muntz_json_fields() {
    let o = turanlab(&["muntz", "0", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    for key in ["nu", "kappa", "coeffs", "alternation_points", "zeros", "residual", "t2_integral"] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    // T_{0,2}(x) = 8x^2 - 8x + 1, ∫ T^2 = 7/15
    let c: Vec<f64> = v["coeffs"].as_array().unwrap().iter().map(|c| c.as_str().unwrap().parse().unwrap()).collect();
    assert!((c[0] - 1.0).abs() < 1e-12 && (c[1] + 8.0).abs() < 1e-12 && (c[2] - 8.0).abs() < 1e-12);
    let t2: f64 = v["t2_integral"].as_str().unwrap().parse().unwrap();
    assert!((t2 - 7.0 / 15.0).abs() < 1e-12);
}

#[test]
fn ratio_matches_library() {
    let o = turanlab(&["ratio", "--n", "30", "--k", "2", "--denominator", "endpoint", "--weight", "circle"]);
    assert_eq!(o.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    let ctx = PrecisionContext::default();
    let p = RatioProblem::new(30, 2, Denominator::Endpoint, Weight::Circle).unwrap();
    let cert = solve_endpoint(&p, &ctx).unwrap();
    let upper = Real::parse_with_bits(v["value_upper"].as_str().unwrap(), 256).unwrap();
    assert_eq!(upper, cert.value_upper);
}

#[test]
fn verify_lemmas_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = turanlab(&["--out", out, "--seed", "7", "verify-lemmas", "--lemma", "3.2", "--trials", "10"]);
    assert_eq!(o.status.code(), Some(0));
    let text = std::fs::read_to_string(dir.path().join("lemmas.json")).unwrap();
    assert_eq!(text, stdout(&o));
    let v: serde_json::Value = serde_json::from_str(&text).unwrap();
    assert_eq!(v[0]["lemma_id"], "3.2");
    assert_eq!(v[0]["pass"], true);
}

#[test]
fn sweep_closed_form_and_skip() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = turanlab(&["--out", out, "sweep", "--n", "12", "--k", "1,9", "--theorems", "2.1"]);
    assert_eq!(o.status.code(), Some(0));
    let rows = records(&dir.path().join("sweep.csv"));
    assert_eq!(rows.len(), 2);
    assert_eq!(&rows[0][0], "12");
    assert_eq!(&rows[0][9], "true");
    let lower: f64 = rows[0][5].parse().unwrap();
    let upper: f64 = rows[0][6].parse().unwrap();
    assert!((lower - 13.0).abs() < 1e-6 && (upper - 13.0).abs() < 1e-6);
    assert_eq!(&rows[1][1], "9");
    assert_eq!(&rows[1][9], "false");
    let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(dir.path().join("sweep.json")).unwrap()).unwrap();
    assert_eq!(json["rows"][1]["status"], "skipped");
}

#[test]
fn default_sweep_18_rows() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = turanlab(&["--out", out, "sweep"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let path = dir.path().join("sweep.csv");
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text, stdout(&o));
    assert_eq!(text.lines().count(), 19);
    assert!(!text.contains('\r'));
    let rows = records(&path);
    assert_eq!(rows.len(), 18);
    for row in &rows {
        assert_eq!(&row[9], "true", "{row:?}");
        let lower: f64 = row[5].parse().unwrap();
        let theorem_lower: f64 = row[4].parse().unwrap();
        assert!(lower >= theorem_lower);
    }
}
