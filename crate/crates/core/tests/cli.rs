//! End-to-end runs of the `glosol` binary.

use glosol::bifurcation::Diagram;
use glosol::checks::Verdict;
use glosol::integrate::TrajectoryRecord;
use glosol::series::ExpansionTable;
use glosol::spectrum::SpectralSummary;
use glosol::zset::Intersection;
use serde::de::DeserializeOwned;
use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn glosol(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_glosol")).args(args).output().expect("binary runs")
}

fn stdout_json(o: &Output) -> serde_json::Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stdout)))
}

/// Parses a JSON output file, then checks that re-serializing gives the same value.
fn round_trip<T: DeserializeOwned + serde::Serialize>(path: &Path) -> T {
    let text = fs::read_to_string(path).unwrap();
    let v: T = serde_json::from_str(&text).unwrap();
    let again: serde_json::Value = serde_json::to_value(&v).unwrap();
    assert_eq!(again, serde_json::from_str::<serde_json::Value>(&text).unwrap(), "{}", path.display());
    v
}

fn csv_rows(path: &Path) -> Vec<Vec<String>> {
    fs::read_to_string(path).unwrap().lines().skip(1).map(|l| l.split(',').map(String::from).collect()).collect()
}

fn verdict_kind(args: &[&str]) -> String {
    let o = glosol(args);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    stdout_json(&o)["summary"]["kind"].as_str().unwrap().to_string()
}

#[test]
fn verdicts_for_the_standard_examples() {
    assert_eq!(verdict_kind(&["verdict", "--phi", "gaussian", "--c", "1e-4"]), "unique_positive");
    assert_eq!(verdict_kind(&["verdict", "--phi", "gaussian", "--c", "-1"]), "no_solutions");
    assert_eq!(verdict_kind(&["verdict", "--phi", "hermite_gaussian", "--c", "2"]), "no_solutions");
    assert_eq!(verdict_kind(&["verdict", "--phi", "constant", "--P", "9"]), "inconclusive");
}

#[test]
fn verdict_file_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("v");
    let o = glosol(&["verdict", "--phi", "gaussian", "--c", "0.05", "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    let v: Verdict = round_trip(&out.join("verdict.json"));
    assert!(!v.witnesses.is_empty());
}

#[test]
fn bad_input_exits_with_code_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    fs::write(&cfg, r#"{"phi": {"kind": "gaussian", "param": 0.1}, "no_such_key": 1}"#).unwrap();
    let cases: Vec<Vec<&str>> = vec![
        vec!["verdict"],
        vec!["frobnicate", "--phi", "gaussian"],
        vec!["sweep", "--phi", "gaussian", "--c-min", "1", "--c-max", "0"],
        vec!["verdict", "--config", cfg.to_str().unwrap()],
        vec!["verdict", "--phi", "gaussian", "--c", "0.1", "--jobs", "0"],
    ];
    for args in cases {
        let o = glosol(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    }
}

#[test]
fn config_file_sets_the_forcing() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    fs::write(&cfg, r#"{"phi": {"kind": "hermite_gaussian", "param": 2.0}}"#).unwrap();
    assert_eq!(verdict_kind(&["verdict", "--config", cfg.to_str().unwrap()]), "no_solutions");
    // Flags win over the file.
    assert_eq!(verdict_kind(&["verdict", "--config", cfg.to_str().unwrap(), "--c", "-1"]), "exists_at_least_one");
}

#[test]
fn zset_outputs_and_determinism() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let out = dir.path().join(name);
        let o = glosol(&["zset", "--phi", "gaussian", "--c", "0.05", "--samples", "80", "--out", out.to_str().unwrap()]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        out
    };
    let (a, b) = (run("a"), run("b"));
    let xs: Vec<Intersection> = round_trip(&a.join("intersections.json"));
    assert_eq!(xs.iter().filter(|x| x.refined && x.f > 0.0).count(), 1);
    for f in ["zcurve_fwd.csv", "zcurve_bwd.csv", "intersections.json"] {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap(), "{f}");
    }
    let fwd = csv_rows(&a.join("zcurve_fwd.csv"));
    assert_eq!(fwd[0][0], "-inf");
}

#[test]
fn zero_table_gives_the_separatrix() {
    let dir = tempfile::tempdir().unwrap();
    let table = dir.path().join("zero.csv");
    let mut s = String::from("x,phi,dphi\n");
    for i in 0..=200 {
        s.push_str(&format!("{},0,0\n", -10.0 + 0.1 * i as f64));
    }
    fs::write(&table, s).unwrap();
    let out = dir.path().join("z");
    let o = glosol(&[
        "zset", "--phi", "tabulated", table.to_str().unwrap(), "--d-min", "-30", "--samples", "40", "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    for row in csv_rows(&out.join("zcurve_fwd.csv")).iter().skip(1) {
        let (f, fp): (f64, f64) = (row[2].parse().unwrap(), row[3].parse().unwrap());
        assert!((3.0 * fp * fp - 2.0 * f.powi(3)).abs() <= 1e-7 * f.powi(3).max(1e-12), "{row:?}");
    }
}

#[test]
fn hermite_far_past_the_fold_has_no_intersections() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("z");
    let o = glosol(&["zset", "--phi", "hermite_gaussian", "--c", "0.9", "--samples", "80", "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    assert_eq!(stdout_json(&o)["summary"]["intersections"], 0);
}

#[test]
fn series_region_exports() {
    let dir = tempfile::tempdir().unwrap();
    let run = |c: &str, name: &str| {
        let out = dir.path().join(name);
        let o = glosol(&["series", "--phi", "gaussian", "--c", c, "--out", out.to_str().unwrap()]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        out
    };
    let zero = run("0", "zero");
    assert!(csv_rows(&zero.join("convergence_region.csv")).iter().all(|r| r[3] == "true"));
    assert!(csv_rows(&zero.join("m_curve.csv")).iter().all(|r| r[1].parse::<f64>().unwrap() == 0.0));
    let _: ExpansionTable = round_trip(&zero.join("series_coeffs.json"));

    let out = dir.path().join("hg");
    let o = glosol(&["series", "--phi", "hermite_gaussian", "--c", "0.12", "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    let flags: Vec<String> = csv_rows(&out.join("convergence_region.csv")).into_iter().map(|r| r[3].clone()).collect();
    assert!(flags.iter().any(|f| f == "true") && flags.iter().any(|f| f == "false"));
}

#[test]
fn spectrum_and_integrate_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s");
    let o = glosol(&["spectrum", "--phi", "gaussian", "--c", "0", "--f0", "0", "--fp0", "0", "--n", "300", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let s: SpectralSummary = round_trip(&out.join("spectrum.json"));
    assert_eq!(s.n_positive, 0);

    let out = dir.path().join("i");
    let o = glosol(&["integrate", "--phi", "constant", "--P", "1", "--f0", "1", "--fp0", "0", "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    let t: TrajectoryRecord = round_trip(&out.join("trajectory.json"));
    assert!(t.samples.iter().all(|p| (p.f - 1.0).abs() < 1e-9));
}

#[test]
fn sweep_diagram_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("w");
    let o = glosol(&[
        "sweep", "--phi", "gaussian", "--c-min", "0.01", "--c-max", "0.1", "--seeds", "3", "--grid-c", "3", "--grid-f0",
        "3", "--out", out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let d: Diagram = round_trip(&out.join("diagram.json"));
    assert_eq!(d.branches.len(), 1);
    assert_eq!(csv_rows(&out.join("exist_len.csv")).len(), 9);
}
