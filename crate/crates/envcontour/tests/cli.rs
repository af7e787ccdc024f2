use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use envcontour::cli::CrossingReport;
use envcontour_core::process::SeaStateModel;

const YEAR: f64 = 8766.0;

fn run(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_envcontour")).current_dir(dir).args(args).output().unwrap()
}

fn ok(dir: &Path, args: &[&str]) -> String {
    let out = run(dir, args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn read(dir: &Path, name: &str) -> Vec<u8> {
    fs::read(dir.join(name)).unwrap_or_else(|e| panic!("{name}: {e}"))
}

fn reference(dir: &Path) {
    ok(dir, &["synth", "-o", "ref.csv", "--duration", "3y", "--model-out", "ref.json"]);
}

const SMALL_CONTOUR: [&str; 10] =
    ["--t-s", "1y", "--n-dirs", "24", "--n-paths", "300", "--seed", "9", "--model", "ref.json"];

#[test]
fn empty_input_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("empty.csv"), "").unwrap();
    let out = run(dir.path(), &["calibrate", "empty.csv", "model.json"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("insufficient data"), "{}", stderr(&out));
    let header_only = run(dir.path(), &["calibrate", "missing.csv", "model.json"]);
    assert_eq!(header_only.status.code(), Some(2));
}

#[test]
fn one_bad_row_is_skipped_and_counted() {
    let dir = tempfile::tempdir().unwrap();
    reference(dir.path());
    let mut text = fs::read_to_string(dir.path().join("ref.csv")).unwrap();
    let cut = text.match_indices('\n').nth(100).unwrap().0;
    text.insert_str(cut + 1, "123.5,not-a-number,5.0\n");
    fs::write(dir.path().join("bad.csv"), text).unwrap();
    let out = run(dir.path(), &["calibrate", "bad.csv", "model.json"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let err = stderr(&out);
    assert!(err.contains("warnings: 1"), "{err}");
    assert!(err.contains("line 102, column hs_m"), "{err}");
}

#[test]
fn constant_heights_are_a_computational_failure() {
    let dir = tempfile::tempdir().unwrap();
    let mut csv = String::from("t_hours,hs_m,tz_s\n");
    for i in 0..3 * 8766 {
        csv.push_str(&format!("{i},2,{}\n", 5.0 + (i % 7) as f64 * 0.1));
    }
    fs::write(dir.path().join("flat.csv"), csv).unwrap();
    let out = run(dir.path(), &["calibrate", "flat.csv", "model.json"]);
    assert_eq!(out.status.code(), Some(1), "{}", stderr(&out));
}

#[test]
fn bad_flags_are_input_errors() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run(dir.path(), &["contour", "--model"]).status.code(), Some(2));
    assert_eq!(run(dir.path(), &["ou-study", "-o", "x.csv", "--dt", "3w"]).status.code(), Some(2));
    assert_eq!(run(dir.path(), &["ou-study", "-o", "x.csv", "--theta", "-1"]).status.code(), Some(2));
    assert_eq!(run(dir.path(), &["contour", "--model", "nope.json", "-o", "out"]).status.code(), Some(2));
    assert_eq!(run(dir.path(), &["frobnicate"]).status.code(), Some(2));
    assert_eq!(run(dir.path(), &["--help"]).status.code(), Some(0));
}

#[test]
fn synthetic_sixty_years_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    ok(dir.path(), &["synth", "-o", "syn.csv", "--seed", "5", "--model-out", "truth.json"]);
    let summary = ok(dir.path(), &["calibrate", "syn.csv", "fit.json"]);
    assert!(summary.contains("loc (m)                0.37"), "{summary}");
    let truth: SeaStateModel = serde_json::from_slice(&read(dir.path(), "truth.json")).unwrap();
    let fit: SeaStateModel = serde_json::from_slice(&read(dir.path(), "fit.json")).unwrap();
    assert!(((fit.c2 - truth.c2) / truth.c2).abs() < 0.2, "c2 {} vs {}", fit.c2, truth.c2);
    assert!((fit.k_ratio - truth.k_ratio).abs() < 0.05 * truth.k_ratio);
    assert!((fit.k_norm.annual_mean() - 1.0).abs() < 1e-9);
}

#[test]
fn contour_outputs_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    reference(d);
    let mut a = vec!["contour", "-o", "a", "--svg"];
    a.extend(SMALL_CONTOUR);
    let summary = ok(d, &a);
    assert!(summary.contains("trend mode    frozen-end"), "{summary}");
    let mut b = vec!["contour", "-o", "b", "--threads", "1", "--svg"];
    b.extend(SMALL_CONTOUR);
    ok(d, &b);
    for f in ["grid.csv", "polygon.csv", "estimates.csv", "diagnostics.json", "contour.svg"] {
        assert_eq!(read(d, &format!("a/{f}")), read(d, &format!("b/{f}")), "{f}");
    }
    let grid = String::from_utf8(read(d, "a/grid.csv")).unwrap();
    assert_eq!(grid.lines().count(), 25);
    let est = String::from_utf8(read(d, "a/estimates.csv")).unwrap();
    assert!(est.lines().nth(1).unwrap().ends_with(",300,0"));

    // Replaying the echo reproduces every output byte for byte.
    let before: Vec<Vec<u8>> = ["grid.csv", "polygon.csv", "estimates.csv", "diagnostics.json"]
        .iter()
        .map(|f| read(d, &format!("a/{f}")))
        .collect();
    for f in ["grid.csv", "polygon.csv", "estimates.csv", "diagnostics.json"] {
        fs::remove_file(d.join("a").join(f)).unwrap();
    }
    ok(d, &["replay", "a/config.json"]);
    let after: Vec<Vec<u8>> = ["grid.csv", "polygon.csv", "estimates.csv", "diagnostics.json"]
        .iter()
        .map(|f| read(d, &format!("a/{f}")))
        .collect();
    assert_eq!(before, after);
}

#[test]
fn time_suffixes_resolve_to_hours() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    reference(d);
    let base = ["--model", "ref.json", "--n-dirs", "8", "--n-paths", "100", "--dt", "6h"];
    let mut y = vec!["contour", "-o", "y", "--t-s", "0.5y"];
    y.extend(base);
    ok(d, &y);
    let mut h = vec!["contour", "-o", "h", "--t-s", "4383h"];
    h.extend(base);
    ok(d, &h);
    let mut days = vec!["contour", "-o", "days", "--t-s", "182.625d"];
    days.extend(base);
    ok(d, &days);
    let cfg: serde_json::Value = serde_json::from_slice(&read(d, "y/config.json")).unwrap();
    assert_eq!(cfg["command"]["target"]["t_s"], 4383.0);
    assert_eq!(cfg["command"]["dt_hours"], 6.0);
    assert_eq!(read(d, "y/grid.csv"), read(d, "h/grid.csv"));
    assert_eq!(read(d, "y/grid.csv"), read(d, "days/grid.csv"));

    let mut custom = vec!["contour", "-o", "c", "--t-s", "0.5y", "--year-hours", "8760"];
    custom.extend(base);
    ok(d, &custom);
    let cfg: serde_json::Value = serde_json::from_slice(&read(d, "c/config.json")).unwrap();
    assert_eq!(cfg["command"]["target"]["t_s"], 4380.0);
}

#[test]
fn contour_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    reference(d);
    // Only the path count is reduced; target, directions and step are defaults.
    let out = run(d, &["contour", "--model", "ref.json", "-o", "def", "--n-paths", "100", "--seed", "1"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let cfg: serde_json::Value = serde_json::from_slice(&read(d, "def/config.json")).unwrap();
    let target = &cfg["command"]["target"];
    assert_eq!(target["kind"], "quantile");
    assert_eq!(target["t_s"], 50.0 * YEAR);
    assert_eq!(target["q_s"], (-1.0f64).exp());
    assert_eq!(cfg["command"]["estimator"]["n_dirs"], 180);
    assert_eq!(cfg["command"]["trend_mode"], "frozen-end");
}

#[test]
fn return_period_contour() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    reference(d);
    let out = ok(
        d,
        &[
            "contour",
            "--model",
            "ref.json",
            "-o",
            "rp",
            "--t-r",
            "30d",
            "--n-dirs",
            "8",
            "--n-paths",
            "200",
            "--trend-mode",
            "true",
        ],
    );
    assert!(out.contains("return period"), "{out}");
    let est = String::from_utf8(read(d, "rp/estimates.csv")).unwrap();
    assert_eq!(est.lines().count(), 9);
}

#[test]
fn three_cases_report_gaps() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    reference(d);
    let summary = ok(
        d,
        &[
            "contour",
            "--model",
            "ref.json",
            "-o",
            "three",
            "--three-cases",
            "--t-s",
            "20y",
            "--n-dirs",
            "12",
            "--n-paths",
            "200",
            "--svg",
        ],
    );
    assert!(summary.contains("end - start"), "{summary}");
    for mode in ["frozen-end", "true", "frozen-start"] {
        for f in ["grid.csv", "polygon.csv", "estimates.csv"] {
            assert!(d.join("three").join(mode).join(f).exists(), "{mode}/{f}");
        }
    }
    let gaps = String::from_utf8(read(d, "three/gaps.csv")).unwrap();
    assert!(gaps.starts_with("angle_rad,end_minus_true,end_minus_true_se,"));
    assert_eq!(gaps.lines().count(), 13);
    let diag: serde_json::Value = serde_json::from_slice(&read(d, "three/diagnostics.json")).unwrap();
    // Twenty years of a 4 mm/year trend separate the frozen cases at u = (0, 1).
    let up = &diag["upward_gaps"];
    assert!(up[2]["gap"].as_f64().unwrap() > 0.0);
    assert!(up[0]["gap"].as_f64().unwrap() >= 0.0 && up[1]["gap"].as_f64().unwrap() >= 0.0);
    let svg = String::from_utf8(read(d, "three/contour.svg")).unwrap();
    assert_eq!(svg.matches("<polygon").count(), 3);
    assert!(
        run(d, &["contour", "--model", "ref.json", "-o", "x", "--three-cases", "--t-r", "1y"]).status.code() == Some(2)
    );
}

fn ou_row(csv: &str) -> Vec<f64> {
    csv.lines().nth(1).unwrap().split(',').map(|v| v.parse().unwrap()).collect()
}

#[test]
fn ou_study_radii_and_crossing() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    ok(
        d,
        &["ou-study", "-o", "fast.csv", "--theta", "0.025", "--t-r-min", "200y", "--t-r-max", "200y", "--points", "1"],
    );
    let fast = ou_row(&String::from_utf8(read(d, "fast.csv")).unwrap());
    assert!((fast[2] - 4.75).abs() < 0.02 && (fast[3] - 4.645).abs() < 0.005, "{fast:?}");
    assert!((fast[4] - 1.023).abs() < 0.003);
    ok(
        d,
        &["ou-study", "-o", "slow.csv", "--theta", "0.01", "--t-r-min", "200y", "--t-r-max", "200y", "--points", "1"],
    );
    let slow = ou_row(&String::from_utf8(read(d, "slow.csv")).unwrap());
    assert!((slow[2] - 4.54).abs() < 0.02 && (slow[4] - 0.977).abs() < 0.003, "{slow:?}");

    let summary = ok(d, &["ou-study", "-o", "range.csv"]);
    assert!(summary.contains("crossing (approx)"));
    let csv = String::from_utf8(read(d, "range.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("t_r_hours,t_r_years,radius_ou,radius_iid,ratio"));
    assert_eq!(csv.lines().count(), 62);
    let report: CrossingReport = serde_json::from_slice(&read(d, "range.crossing.json")).unwrap();
    let approx_years = report.t_r_approx_hours / YEAR;
    assert!((110.0..150.0).contains(&approx_years), "{approx_years}");
    let exact = report.t_r_exact_hours.unwrap() / YEAR;
    // The radius curves swap order at the crossing.
    let rows: Vec<Vec<f64>> = csv.lines().skip(1).map(|l| l.split(',').map(|v| v.parse().unwrap()).collect()).collect();
    for r in &rows {
        if r[1] < 0.9 * exact {
            assert!(r[2] < r[3], "{r:?}");
        } else if r[1] > 1.1 * exact {
            assert!(r[2] > r[3], "{r:?}");
        }
    }
}

#[test]
fn simulate_writes_a_series() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    reference(d);
    ok(d, &["simulate", "--model", "ref.json", "-o", "path.csv", "--duration", "30d", "--dt", "6h", "--t0", "-1y"]);
    let csv = String::from_utf8(read(d, "path.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("t_hours,hs_m,tz_s"));
    assert_eq!(csv.lines().count(), 121);
    assert!(csv.lines().nth(1).unwrap().starts_with("-8766,"));
    ok(d, &["simulate", "--model", "ref.json", "-o", "again.csv", "--duration", "30d", "--dt", "6h", "--t0", "-1y"]);
    assert_eq!(read(d, "path.csv"), read(d, "again.csv"));
}
