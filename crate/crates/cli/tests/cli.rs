use std::process::{Command, Output};

use serde_json::Value;

fn pud(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pud")).args(args).env_remove("PUD_OUT_DIR").output().expect("spawn pud")
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn csv_rows(bytes: &[u8]) -> Vec<csv::StringRecord> {
    csv::Reader::from_reader(bytes).records().map(|r| r.unwrap()).collect()
}

#[test]
fn analyze_bufferless() {
    let v = json(&pud(&["analyze", "--model", "mg11", "--lambda", "1", "--service", "exp:mu=1"]));
    assert_eq!(v["p_missed"], 0.5);
    assert_eq!(v["total_pud"], 2.5);
    assert_eq!(v["missed_joint"][0], 0.493827160494);
}

#[test]
fn analyze_finite_buffer() {
    let v = json(&pud(&["analyze", "--model", "mm1k", "--lambda", "0.5", "--mu", "1", "--k", "2"]));
    assert!((v["p_missed"].as_f64().unwrap() - 1.0 / 7.0).abs() < 1e-9);
    assert!(v["mean_pumd"].is_null());
}

#[test]
fn analyze_csv_format() {
    let out = pud(&["analyze", "--model", "mg1", "--lambda", "0.5", "--mu", "1", "--format", "csv"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("field,value\n"));
    assert!(text.contains("p_correct,0.666666666667\n"));
}

#[test]
fn exit_codes() {
    let unstable = pud(&["analyze", "--model", "mg1", "--lambda", "1.5", "--service", "exp:mu=1"]);
    assert_eq!(unstable.status.code(), Some(2));
    let zero = pud(&["simulate", "--model", "mg1", "--lambda", "0.5", "--mu", "1", "--packets", "0"]);
    assert_eq!(zero.status.code(), Some(1));
    let bad_model = pud(&["analyze", "--model", "mg2", "--lambda", "1", "--mu", "1"]);
    assert_eq!(bad_model.status.code(), Some(1));
    let bad_service = pud(&["analyze", "--model", "mg1", "--lambda", "0.5", "--service", "exp:mu=-1"]);
    assert_eq!(bad_service.status.code(), Some(1));
    let both = pud(&["analyze", "--model", "mg1", "--lambda", "0.5", "--mu", "1", "--service", "exp:mu=1"]);
    assert_eq!(both.status.code(), Some(1));
    assert_eq!(pud(&["frobnicate"]).status.code(), Some(1));
    assert_eq!(pud(&["--help"]).status.code(), Some(0));
}

#[test]
fn simulate_is_reproducible() {
    let args = ["simulate", "--model", "mg1", "--lambda", "0.5", "--mu", "1", "--packets", "200000", "--seed", "7"];
    let a = pud(&args);
    let b = pud(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let v: Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["summary"]["seed"], 7);
    assert!((v["summary"]["p_correct"].as_f64().unwrap() - 2.0 / 3.0).abs() < 0.005);
    assert!(v["summary"]["stderr"]["p_correct"].as_f64().unwrap() > 0.0);
}

#[test]
fn compare_rows_and_verdicts() {
    let out = pud(&["compare", "--model", "mg11", "--lambda", "1", "--mu", "1", "--packets", "300000"]);
    assert!(out.status.success());
    let rows = csv_rows(&out.stdout);
    let status = |m: &str| rows.iter().find(|r| &r[0] == m).unwrap()[7].to_string();
    for m in ["p_correct", "p_missed", "cond_p_correct", "mean_pucd", "mean_puid", "mean_pumd", "total_pud"] {
        assert_eq!(status(m), "pass", "{m}");
    }
}

#[test]
fn compare_degenerate_and_gap_rows() {
    let out = pud(&["compare", "--model", "mg11", "--lambda", "1e-6", "--mu", "1", "--packets", "100000"]);
    assert_eq!(out.status.code(), Some(0));
    let rows = csv_rows(&out.stdout);
    let row = |m: &str| rows.iter().find(|r| &r[0] == m).unwrap().clone();
    assert_eq!(&row("mean_pumd")[7], "not-applicable");

    let out = pud(&["compare", "--model", "mm1k", "--lambda", "1", "--mu", "1", "--k", "3", "--packets", "100000"]);
    let rows = csv_rows(&out.stdout);
    let pumd = rows.iter().find(|r| &r[0] == "mean_pumd").unwrap();
    assert_eq!(&pumd[1], "");
    assert!(!pumd[2].is_empty());
}

#[test]
fn compare_reports_failure_without_failing() {
    // A tolerance nobody can meet still exits 0; the failure is in the table.
    let out = pud(&[
        "compare",
        "--model",
        "mg1",
        "--lambda",
        "0.5",
        "--mu",
        "1",
        "--packets",
        "10000",
        "--batches",
        "10",
        "--penalty-tol",
        "0",
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(csv_rows(&out.stdout).iter().any(|r| &r[7] == "fail"));
}

#[test]
fn sweep_writes_warning_rows() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.csv");
    let out = pud(&[
        "sweep",
        "--model",
        "mg1",
        "--lambda",
        "0.5",
        "--mu",
        "1",
        "--vary",
        "lambda",
        "--from",
        "0.5",
        "--to",
        "1.5",
        "--steps",
        "3",
        "--packets",
        "10000",
        "--batches",
        "10",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let rows = csv_rows(&std::fs::read(&path).unwrap());
    assert_eq!(rows.len(), 6);
    let notes: Vec<&str> = rows.iter().map(|r| r.get(20).unwrap()).collect();
    assert_eq!(notes.iter().filter(|n| n.starts_with("skipped: unstable")).count(), 4);
    assert_eq!(&rows[0][12], "analytic");
    assert_eq!(&rows[1][12], "sim");
}

#[test]
fn sweep_explicit_values_and_json() {
    let out = pud(&[
        "sweep",
        "--model",
        "mm1k",
        "--lambda",
        "1",
        "--mu",
        "1",
        "--k",
        "2",
        "--vary",
        "k",
        "--values",
        "1,2,5",
        "--analytic-only",
        "--format",
        "json",
    ]);
    let v = json(&out);
    let rows = v.as_array().unwrap();
    assert_eq!(rows.len(), 3);
    assert_eq!(rows[2]["K"], 5);
    assert!(rows[0]["E_sigma_M"].is_number());
    assert!(rows[1]["E_sigma_M"].is_null());
}

#[test]
fn sweep_needs_a_grid() {
    let out = pud(&["sweep", "--model", "mg1", "--lambda", "0.5", "--mu", "1", "--vary", "lambda"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn unwritable_output_exits_one() {
    let out =
        pud(&["figure", "--id", "num3", "--packets", "1000", "--batches", "10", "--out", "/nonexistent/dir/x.csv"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn figure_presets_are_byte_identical_and_use_out_dir() {
    let dir = tempfile::tempdir().unwrap();
    let run = |id: &str| {
        let out = Command::new(env!("CARGO_BIN_EXE_pud"))
            .args(["figure", "--id", id, "--packets", "20000", "--batches", "10"])
            .env("PUD_OUT_DIR", dir.path())
            .output()
            .unwrap();
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        std::fs::read(dir.path().join(format!("{id}.csv"))).unwrap()
    };
    for id in ["num1", "num2", "num3"] {
        let a = run(id);
        let b = run(id);
        assert_eq!(a, b, "{id}");
    }
    let rows = csv_rows(&run("num1"));
    let pc: Vec<f64> = rows.iter().filter(|r| &r[12] == "analytic").map(|r| r[5].parse().unwrap()).collect();
    assert_eq!(pc.len(), 19);
    assert!(pc.windows(2).all(|w| w[1] < w[0]));
}

#[test]
fn figure_rejects_unknown_id() {
    assert_eq!(pud(&["figure", "--id", "num9"]).status.code(), Some(1));
}
