use std::path::Path;
use std::process::{Command, Output};

use point_resonances::cli::{AsymptoticsOutput, ResonanceOutput};
use point_resonances::experiments::ExperimentReport;
use point_resonances::sampler::SampleSet;

const TWO_POINTS: &str = "[[0,0,0],[1,0,0]]";

fn ptres(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ptres"))
        .args(args)
        .env_remove("PTRES_WORKERS")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

#[test]
fn single_point_resonance() {
    let o = ptres(&["resonances", "--points", "[[0,0,0]]", "--alpha", "1,0", "--radius", "20"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 1);
    let cols: Vec<f64> = rows[0].split(',').take(2).map(|x| x.parse().unwrap()).collect();
    assert!(cols[0].abs() < 1e-8);
    assert!((cols[1] + 4.0 * std::f64::consts::PI).abs() < 1e-8);
}

#[test]
fn missing_radius_is_a_usage_error() {
    let o = ptres(&["resonances", "--points", TWO_POINTS]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("--radius"));
}

#[test]
fn two_point_csv_matches_golden() {
    let o = ptres(&["resonances", "--points", TWO_POINTS, "--alpha", "1,0", "--radius", "30"]);
    assert_eq!(o.status.code(), Some(0));
    let golden = std::fs::read_to_string(Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/data/two_point_r30.csv"))
        .unwrap();
    assert_eq!(stdout(&o), golden);
}

#[test]
fn resonance_json_with_counting_report() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("roots.csv");
    let o = ptres(&[
        "resonances",
        "--points",
        TWO_POINTS,
        "--radius",
        "40",
        "--output",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let report: ResonanceOutput =
        serde_json::from_str(&std::fs::read_to_string(dir.path().join("roots.counting.json")).unwrap()).unwrap();
    assert_eq!(report.counting.radii.len(), 20);
    assert_eq!(*report.counting.counts.last().unwrap(), report.resonances.total_multiplicity());

    let o = ptres(&["resonances", "--points", TWO_POINTS, "--radius", "40", "--format", "json"]);
    let again: ResonanceOutput = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(again.resonances, report.resonances);
}

#[test]
fn asymptotics_two_points() {
    let o = ptres(&["asymptotics", "--points", TWO_POINTS]);
    assert_eq!(o.status.code(), Some(0));
    let a: AsymptoticsOutput = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(a.v, 2.0);
    assert_eq!(a.diam, 1.0);
    assert!((a.ad - 2.0 / std::f64::consts::PI).abs() < 1e-12);
    assert_eq!(a.k, vec![1.0, 1.0]);
    assert!(a.weyl);
    assert!(a.note.is_none());
}

#[test]
fn asymptotics_single_point_has_note() {
    let o = ptres(&["asymptotics", "--points", "[[1,2,3]]"]);
    assert_eq!(o.status.code(), Some(0));
    let a: AsymptoticsOutput = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(a.v, 0.0);
    assert!(a.k.is_empty());
    assert!(a.note.is_some());
}

#[test]
fn oversized_expansion_exits_two_with_hint() {
    let pts: Vec<[f64; 3]> = (0..9).map(|i| [i as f64, 0.1 * (i * i) as f64, 0.0]).collect();
    let pts = serde_json::to_string(&pts).unwrap();
    let o = ptres(&["asymptotics", "--points", &pts]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("--n-max 9"));
    let o = ptres(&["asymptotics", "--points", &pts, "--n-max", "9"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
}

#[test]
fn duplicate_points_exit_one() {
    let o = ptres(&["asymptotics", "--points", "[[0,0,0],[0,0,0]]"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn sample_is_reproducible() {
    let args = ["sample", "--kind", "uniform_ball", "--m", "5", "--r", "2", "--seed", "4", "--stream-id", "3"];
    let a = ptres(&args);
    let b = ptres(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let s: SampleSet = serde_json::from_str(&stdout(&a)).unwrap();
    assert_eq!(s.points.len(), 5);
    assert_eq!(s.stream_id, 3);
    assert_eq!(ptres(&["sample", "--m", "5"]).status.code(), Some(1));
}

#[test]
fn moments_experiment_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    let o = ptres(&[
        "experiment",
        "moments",
        "--pairs",
        "50000",
        "--seed",
        "7",
        "--output",
        out.to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = std::fs::read_to_string(&out).unwrap();
    let r = ExperimentReport::from_json(&text).unwrap();
    assert_eq!(r.to_json(), text);
    assert!(stderr(&o).contains("PASS pair_mean"));
}

#[test]
fn experiment_requires_seed_and_known_kind() {
    assert_eq!(ptres(&["experiment", "weyl", "--m", "3"]).status.code(), Some(1));
    assert_eq!(ptres(&["experiment", "nonsense", "--seed", "1"]).status.code(), Some(1));
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(&cfg, r#"{"command":"experiment","kind":"weyl","m":3,"trials":4,"seed":1}"#).unwrap();
    let o = ptres(&["--config", cfg.to_str().unwrap(), "experiment"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let r = ExperimentReport::from_json(&stdout(&o)).unwrap();
    assert_eq!((r.params.m, r.params.trials), (Some(3), Some(4)));

    let o = ptres(&["--config", cfg.to_str().unwrap(), "experiment", "--trials", "6"]);
    let r = ExperimentReport::from_json(&stdout(&o)).unwrap();
    assert_eq!(r.trials.len(), 6);

    let o = ptres(&["--config", cfg.to_str().unwrap(), "sample"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn worker_env_does_not_change_reports() {
    let args = ["experiment", "vgrowth", "--m", "20", "--trials", "30", "--seed", "5"];
    let one = Command::new(env!("CARGO_BIN_EXE_ptres")).args(args).env("PTRES_WORKERS", "1").output().unwrap();
    let three = Command::new(env!("CARGO_BIN_EXE_ptres")).args(args).env("PTRES_WORKERS", "3").output().unwrap();
    assert_eq!(one.status.code(), Some(0));
    assert_eq!(one.stdout, three.stdout);
    let bad = Command::new(env!("CARGO_BIN_EXE_ptres")).args(args).env("PTRES_WORKERS", "x").output().unwrap();
    assert_eq!(bad.status.code(), Some(1));
}
