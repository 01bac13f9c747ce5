//! End-to-end runs of the command-line interface.

use std::fs;

use hcmc::boundary::{BoundaryCurve, HeightTag, Orientation, Segment};
use hcmc::cli::run;
use hcmc::geometry::IdealPoint;
use hcmc::io::CsvTable;

fn hcmc(args: &[&str]) -> (i32, String) {
    let mut out = Vec::new();
    let argv = std::iter::once("hcmc").chain(args.iter().copied());
    let code = run(argv, &mut out);
    (code, String::from_utf8(out).unwrap())
}

#[test]
fn flat_cap_profile_is_zero() {
    let (code, out) = hcmc(&["profile", "--family", "cap", "--H", "0", "--s-max", "5", "--n", "10"]);
    assert_eq!(code, 0);
    let t = CsvTable::parse(&out).unwrap();
    assert_eq!(t.header, vec!["s", "phi", "dphi"]);
    assert!(t.comment.contains("H=0") && t.comment.contains(hcmc::VERSION));
    assert_eq!(t.rows.len(), 11);
    assert!(t.rows.iter().all(|r| r[1] == 0.0));
}

#[test]
fn vertical_edges_print_inf() {
    let (code, out) = hcmc(&["profile", "--family", "und", "--H", "0.25", "--r", "1", "--s-max", "2", "--n", "4"]);
    assert_eq!(code, 0);
    let t = CsvTable::parse(&out).unwrap();
    assert_eq!(t.rows[0][0], 0.0);
    assert_eq!(t.rows[0][2], f64::INFINITY);
    assert!(out.lines().nth(2).unwrap().ends_with(",inf"));
}

#[test]
fn outputs_are_deterministic() {
    let args = ["profile", "--family", "hyper", "--H", "0.3", "--C", "-2", "--s-max", "6", "--n", "40"];
    let first = hcmc(&args);
    assert_eq!(first.0, 0, "{}", first.1);
    assert_eq!(first, hcmc(&args));
    let mesh = ["mesh", "--surface", "hyper:C=2", "--H", "0.25", "--reflect", "--n-level", "6", "--n-s", "5"];
    let (code, a) = hcmc(&mesh);
    assert_eq!(code, 0);
    assert!(a.lines().any(|l| l.starts_with("v ")) && a.lines().any(|l| l.starts_with("f ")));
    assert_eq!(a, hcmc(&mesh).1);
}

#[test]
fn classify_rectangle_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("rect.json");
    let q = IdealPoint::new;
    let rect = BoundaryCurve::single(vec![
        Segment::arc(HeightTag::PlusLH, q(0.0), q(2.0), Orientation::Ccw),
        Segment::weyl(q(2.0), HeightTag::MinusLH, HeightTag::PlusLH),
        Segment::arc(HeightTag::MinusLH, q(2.0), q(0.0), Orientation::Cw),
        Segment::weyl(q(0.0), HeightTag::MinusLH, HeightTag::PlusLH),
    ]);
    fs::write(&path, serde_json::to_string(&rect).unwrap()).unwrap();
    let (code, out) = hcmc(&["classify", "--curve", path.to_str().unwrap(), "--H", "0.25"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["admissible"], true);
    assert_eq!(v["curve_type"], "III");

    fs::write(&path, r#"[[{"kind":"weyl","q":1.0,"interval":["-lH","+lH"]}]]"#).unwrap();
    let (code, _) = hcmc(&["classify", "--curve", path.to_str().unwrap(), "--H", "0.25"]);
    assert_eq!(code, 3);
    fs::write(&path, "not json").unwrap();
    assert_eq!(hcmc(&["classify", "--curve", path.to_str().unwrap(), "--H", "0.25"]).0, 2);
}

#[test]
fn boundary_and_probe_documents() {
    let (code, out) = hcmc(&["boundary", "--surface", "hyper:C=1", "--H", "0.25"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["verdict"]["curve_type"], "IV");

    let (code, out) = hcmc(&["probe", "--surface", "und:r=1", "--H", "0.25", "--q", "1.0", "--m", "0.2"]);
    assert_eq!(code, 0);
    let v: serde_json::Value = serde_json::from_str(&out).unwrap();
    let lo = v["interval"][0].as_f64().unwrap();
    assert!((lo - 0.5773502691896258).abs() < 1e-2);
    assert_eq!(v["probe"], "Above");
}

#[test]
fn solve_constant_data_has_constant_trace() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    fs::write(&cfg, r#"{"H": 0.25, "phi": {"constant": 0.5}}"#).unwrap();
    let out_dir = dir.path().join("out");
    let (code, out) = hcmc(&["solve", "--config", cfg.to_str().unwrap(), "--out-dir", out_dir.to_str().unwrap()]);
    assert_eq!(code, 0, "{out}");
    let trace = CsvTable::parse(&fs::read_to_string(out_dir.join("trace.csv")).unwrap()).unwrap();
    assert_eq!(trace.rows.len(), 256);
    assert!(trace.rows.iter().all(|r| (r[1] - 0.5).abs() <= 1e-9));
    let grid = CsvTable::parse(&fs::read_to_string(out_dir.join("grid.csv")).unwrap()).unwrap();
    assert_eq!(grid.header, vec!["rho", "theta", "u"]);
    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(out_dir.join("report.json")).unwrap()).unwrap();
    assert_eq!(report["converged"], true);
}

#[test]
fn exit_codes() {
    assert_eq!(hcmc(&["--help"]).0, 0);
    assert_eq!(hcmc(&["frobnicate"]).0, 2);
    assert_eq!(hcmc(&["profile", "--family", "cap", "--H", "abc"]).0, 2);
    assert_eq!(hcmc(&["profile", "--family", "und", "--H", "0.2"]).0, 2);
    assert_eq!(hcmc(&["profile", "--family", "cap", "--H", "0.7"]).0, 3);
    assert_eq!(hcmc(&["profile", "--family", "cap", "--H", "0.5"]).0, 3);
    assert_eq!(hcmc(&["mesh", "--surface", "hyper:C=0.5", "--H", "0.2", "--reflect"]).0, 3);

    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("hard.json");
    fs::write(&cfg, r#"{"H": 0.25, "R_max": 6, "n_rho": 48, "n_theta": 32, "max_iters": 1, "phi": {"fourier": {"cos": [0.3]}}}"#)
        .unwrap();
    assert_eq!(hcmc(&["solve", "--config", cfg.to_str().unwrap()]).0, 4);
    fs::write(&cfg, r#"{"H": 0.5, "phi": {"constant": 0}}"#).unwrap();
    assert_eq!(hcmc(&["solve", "--config", cfg.to_str().unwrap()]).0, 3);
    assert_eq!(hcmc(&["solve", "--config", "/nonexistent/run.json"]).0, 2);
}

#[test]
fn verify_passes() {
    let (code, out) = hcmc(&["verify"]);
    assert_eq!(code, 0, "{out}");
    assert!(out.lines().all(|l| l.starts_with("PASS")));
}
