use std::path::{Path, PathBuf};

use serde_json::Value;
use tempfile::TempDir;

use framescale::report::{FrameData, ReportDocument};
use framescale::TOL_TIGHT;

const ROOT3_HALF: &str = "0.86602540378443864676372317075293618347140262690519";

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let code = framescale::cli::run(
        std::iter::once("framescale").chain(args.iter().copied()),
        &mut out,
        &mut err,
    );
    (
        code,
        String::from_utf8(out).unwrap(),
        String::from_utf8(err).unwrap(),
    )
}

fn write(dir: &TempDir, name: &str, body: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, body).unwrap();
    p
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn mercedes(dir: &TempDir) -> PathBuf {
    write(
        dir,
        "mercedes.json",
        &format!(
            r#"{{"n": 2, "vectors": [[0, 1], ["-{ROOT3_HALF}", "-1/2"], ["{ROOT3_HALF}", "-1/2"]], "labels": ["a", "b", "c"]}}"#
        ),
    )
}

#[test]
fn analyze_mercedes_benz() {
    let dir = TempDir::new().unwrap();
    let p = mercedes(&dir);
    let (code, out, _) = run(&["analyze", s(&p)]);
    assert_eq!(code, 0);
    let doc = ReportDocument::from_json(&out, TOL_TIGHT).unwrap();
    assert_eq!(doc.schema, 1);
    assert!(doc.summary.scalable && doc.summary.strict);
    let w = doc.verdict.weights().unwrap();
    for u in &w.u {
        assert!((u - 1.0 / 3.0).abs() < 1e-9);
    }
    assert!((w.tight_constant - 0.5).abs() < 1e-9);
    assert_eq!(doc.frame.labels.as_ref().unwrap().len(), 3);
    assert_eq!(doc.input_digest.len(), 64);
}

#[test]
fn analyze_exact_mode_reports_rational_weights() {
    let dir = TempDir::new().unwrap();
    let p = write(
        &dir,
        "onb_plus.json",
        r#"{"n": 2, "vectors": [[1, 0], [0, 1], ["3/5", "4/5"]]}"#,
    );
    let (code, out, _) = run(&["analyze", s(&p), "--mode", "exact"]);
    assert_eq!(code, 0);
    let doc = ReportDocument::from_json(&out, TOL_TIGHT).unwrap();
    assert!(doc.summary.scalable && !doc.summary.strict);
    let exact = doc.verdict.exact.unwrap();
    assert_eq!(exact.weights.unwrap(), vec!["1/2", "1/2", "0"]);
}

#[test]
fn report_is_byte_deterministic() {
    let dir = TempDir::new().unwrap();
    let p = mercedes(&dir);
    let a = run(&["analyze", s(&p)]).1;
    let b = run(&["analyze", s(&p)]).1;
    assert_eq!(a, b);
    assert!(!a.contains("timings"));
    let (code, timed, _) = run(&["analyze", s(&p), "--timings"]);
    assert_eq!(code, 0);
    let doc = ReportDocument::from_json(&timed, TOL_TIGHT).unwrap();
    assert!(doc.timings.is_some());
    assert_eq!(doc.canonical().to_json().unwrap(), a.trim_end());
}

#[test]
fn certify_quadrant_frame() {
    let dir = TempDir::new().unwrap();
    let p = write(
        &dir,
        "quadrant.json",
        r#"{"n": 2, "vectors": [[0.7071067811865476, 0.7071067811865476], [0.8944271909999159, 0.4472135954999579], [0.4472135954999579, 0.8944271909999159]]}"#,
    );
    let (code, out, _) = run(&["certify", s(&p)]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["scalable"], false);
    assert_eq!(v["certificate"]["kind"], "separator");
    assert!(v["certificate"]["margin"].as_f64().unwrap() > 0.0);
}

#[test]
fn scale_to_parseval_zeroes_the_diagonal() {
    let dir = TempDir::new().unwrap();
    let p = write(
        &dir,
        "onb_plus.json",
        r#"{"n": 2, "vectors": [[1, 0], [0, 1], [0.7071067811865476, 0.7071067811865476]]}"#,
    );
    let (code, out, _) = run(&["scale", "--parseval", s(&p)]);
    assert_eq!(code, 0);
    let data: FrameData = serde_json::from_str(&out).unwrap();
    assert_eq!(data.vectors[2], vec![0.0, 0.0]);
    let f = data.to_frame().unwrap();
    let op = f.frame_operator();
    assert!((op - nalgebra::DMatrix::identity(2, 2)).norm() <= 1e-9);
}

#[test]
fn scale_refuses_non_scalable_frames() {
    let dir = TempDir::new().unwrap();
    let p = write(&dir, "q.csv", "1,0.5\n0.5,1\n");
    let (code, _, err) = run(&["scale", s(&p)]);
    assert_eq!(code, 1);
    assert!(err.contains("not scalable"));
}

#[test]
fn fmap_emits_images() {
    let dir = TempDir::new().unwrap();
    let p = mercedes(&dir);
    let (code, out, _) = run(&["fmap", s(&p)]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["d"], 2);
    let c = &v["columns"];
    assert_eq!(c[0][0].as_f64().unwrap(), -1.0);
    assert!((c[1][1].as_f64().unwrap() - 3f64.sqrt() / 4.0).abs() < 1e-15);
}

#[test]
fn subsets_queries() {
    let dir = TempDir::new().unwrap();
    let p = mercedes(&dir);
    let (code, out, _) = run(&["subsets", s(&p), "--m", "2"]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["outcome"]["status"], "not_scalable");
    let (code, out, _) = run(&["subsets", s(&p), "--m", "3", "--strict"]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["outcome"]["status"], "scalable");
}

#[test]
fn subsets_over_budget_exit_five() {
    let dir = TempDir::new().unwrap();
    let vectors: Vec<String> = (0..5)
        .map(|k| {
            let t = std::f64::consts::TAU * k as f64 / 5.0;
            format!("[{}, {}]", t.cos(), t.sin())
        })
        .collect();
    let p = write(
        &dir,
        "harmonic.json",
        &format!(r#"{{"n": 2, "vectors": [{}]}}"#, vectors.join(", ")),
    );
    let (code, out, _) = run(&["subsets", s(&p), "--m", "3", "--strict", "--budget", "1"]);
    assert_eq!(code, 5);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["outcome"]["status"], "unknown");
}

#[test]
fn witness_subcommand() {
    let dir = TempDir::new().unwrap();
    let r = 1.0 / 3f64.sqrt();
    let p = write(
        &dir,
        "e3.json",
        &format!(r#"{{"n": 3, "vectors": [[1, 0, 0], [0, 1, 0], [0, 0, 1], [{r}, {r}, {r}]]}}"#),
    );
    let (code, out, _) = run(&["witness", s(&p), "--eps", "0.01", "--seed", "3"]);
    assert_eq!(code, 0);
    let v: Value = serde_json::from_str(&out).unwrap();
    assert!(v["distance"].as_f64().unwrap() <= 0.01);
    assert!(v["margin"].as_f64().unwrap() > 0.0);
    assert_eq!(v["column"], 0);

    let mb = mercedes(&dir);
    let (code, _, err) = run(&["witness", s(&mb)]);
    assert_eq!(code, 4);
    assert!(err.contains("hypothesis"));
}

#[test]
fn random_frames_are_seeded() {
    let dir = TempDir::new().unwrap();
    let (code, a, _) = run(&["random", "2", "3", "--seed", "42"]);
    assert_eq!(code, 0);
    let (_, b, _) = run(&["random", "2", "3", "--seed", "42"]);
    assert_eq!(a, b);
    let out = dir.path().join("r.json");
    let (code, stdout, _) = run(&["random", "3", "10", "--seed", "1", "--out", s(&out)]);
    assert_eq!((code, stdout.as_str()), (0, ""));
    let data: FrameData = serde_json::from_slice(&std::fs::read(&out).unwrap()).unwrap();
    assert_eq!(data.to_frame().unwrap().rank(), 3);
    assert_eq!(run(&["random", "2", "1"]).0, 3);
}

#[test]
fn error_exit_codes() {
    let dir = TempDir::new().unwrap();
    let bad = write(&dir, "bad.json", r#"{"n": 2, "vectors": [[1, 0], [1]]}"#);
    let (code, _, err) = run(&["analyze", s(&bad)]);
    assert_eq!(code, 2);
    assert!(err.contains("vectors[1]"));
    let flat = write(&dir, "flat.csv", "1,1\n2,2\n");
    assert_eq!(run(&["analyze", s(&flat)]).0, 3);
    assert_eq!(run(&["analyze", "/nonexistent/frame.json"]).0, 2);
    assert_eq!(run(&["bogus"]).0, 2);
}

#[test]
fn out_flag_writes_file() {
    let dir = TempDir::new().unwrap();
    let p = mercedes(&dir);
    let out = dir.path().join("report.json");
    let (code, stdout, _) = run(&["analyze", s(&p), "--out", s(&out)]);
    assert_eq!((code, stdout.as_str()), (0, ""));
    let text = std::fs::read_to_string(&out).unwrap();
    assert!(ReportDocument::from_json(&text, TOL_TIGHT).is_ok());
}
