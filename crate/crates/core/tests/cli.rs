//! End-to-end tests of the `mdist` binary: exit codes, report contents,
//! and byte-stable output for fixed seeds.

use std::path::Path;
use std::process::{Command, Output};

use metric_distortion::bounds::Space;
use metric_distortion::instance::{GeneralInstance, Instance, LineInstance};
use metric_distortion::search::random_instance;
use metric_distortion::ALPHA_STAR;

fn mdist(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mdist"))
        .args(args)
        .env_remove("MDIST_TAU")
        .output()
        .expect("binary runs")
}

fn write_instance(dir: &Path, name: &str, instance: &Instance) -> String {
    let path = dir.join(name);
    std::fs::write(&path, serde_json::to_string(instance).unwrap()).unwrap();
    path.to_str().unwrap().to_owned()
}

fn stdout_json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

#[test]
fn validate_accepts_a_line_instance_and_rejects_a_broken_matrix() {
    let dir = tempfile::tempdir().unwrap();
    let good = write_instance(
        dir.path(),
        "good.json",
        &Instance::Line(LineInstance::new(vec![0.0, 1.0], vec![0.25, 0.75]).unwrap()),
    );
    let out = mdist(&["validate", "--input", &good]);
    assert_eq!(out.status.code(), Some(0), "{out:?}");

    // Asymmetric joint matrix: d(0,1) != d(1,0).
    let mut dist = vec![
        vec![0.0, 1.0, 1.0, 2.0],
        vec![1.0, 0.0, 1.0, 1.0],
        vec![1.0, 1.0, 0.0, 1.0],
        vec![2.0, 1.0, 1.0, 0.0],
    ];
    dist[0][1] = 0.5;
    let bad = write_instance(
        dir.path(),
        "bad.json",
        &Instance::General(GeneralInstance::new(2, 2, dist).unwrap()),
    );
    let out = mdist(&["validate", "--input", &bad]);
    assert_eq!(out.status.code(), Some(1), "{out:?}");
    assert!(String::from_utf8_lossy(&out.stdout).contains("symmetr"));
}

#[test]
fn unreadable_input_exits_with_code_2() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("garbage.json");
    std::fs::write(&path, "{not json").unwrap();
    let out = mdist(&["validate", "--input", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2), "{out:?}");
    assert!(String::from_utf8_lossy(&out.stderr).contains("error"));
}

#[test]
fn eval_reports_a_ratio_within_the_proven_bound() {
    let dir = tempfile::tempdir().unwrap();
    let inst = random_instance(Space::General, 5, 4, 42).unwrap();
    let path = write_instance(dir.path(), "inst.json", &inst);
    let out = mdist(&[
        "eval",
        "--input",
        &path,
        "--mechanism",
        "minisum-tas-distance",
        "--objective",
        "sc",
    ]);
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let doc = stdout_json(&out);
    let ratio = doc["ratio"].as_f64().unwrap();
    let bound = doc["proven_bound"].as_f64().unwrap();
    assert!(ratio >= 1.0 && ratio <= bound + 1e-9);
    assert_eq!(doc["violation"], serde_json::json!(false));
}

#[test]
fn eval_rejects_a_line_only_mechanism_on_a_general_instance() {
    let dir = tempfile::tempdir().unwrap();
    let inst = random_instance(Space::General, 3, 3, 7).unwrap();
    let path = write_instance(dir.path(), "inst.json", &inst);
    let out = mdist(&[
        "eval",
        "--input",
        &path,
        "--mechanism",
        "max-tas-leftmost",
        "--objective",
        "mc",
    ]);
    assert_eq!(out.status.code(), Some(2), "{out:?}");
}

#[test]
fn construct_verifies_and_reports_the_predicted_ratio() {
    let alpha = format!("{ALPHA_STAR}");
    let out = mdist(&[
        "construct",
        "--id",
        "mc-general-i1",
        "--alpha",
        &alpha,
    ]);
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let doc = stdout_json(&out);
    assert_eq!(doc["pass"], serde_json::json!(true));
    let predicted = doc["predicted_ratio"].as_f64().unwrap();
    assert!((predicted - (1.0 + std::f64::consts::SQRT_2)).abs() < 1e-6);
    let realized = doc["realized_ratio"].as_f64().unwrap();
    assert!((predicted - realized).abs() < 1e-9);
}

#[test]
fn construct_rejects_out_of_range_parameters() {
    let out = mdist(&["construct", "--id", "sc-all-three", "--alpha", "2.5"]);
    assert_eq!(out.status.code(), Some(2), "{out:?}");
}

#[test]
fn sweep_is_clean_and_byte_stable_for_a_fixed_seed() {
    let args = [
        "sweep",
        "--space",
        "line",
        "--count",
        "300",
        "--seed",
        "99",
        "--format",
        "csv",
    ];
    let a = mdist(&args);
    let b = mdist(&args);
    assert_eq!(a.status.code(), Some(0), "{a:?}");
    assert_eq!(a.stdout, b.stdout, "same seed must give identical bytes");
    let text = String::from_utf8(a.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "mechanism,alpha,objective,space,max_ratio,proven_bound,violation"
    );
    let rows: Vec<&str> = lines.filter(|l| !l.is_empty()).collect();
    assert!(!rows.is_empty());
    assert!(rows.iter().all(|r| r.ends_with(",false")));
}

#[test]
fn search_writes_a_sound_report_to_a_file() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("report.json");
    let out = mdist(&[
        "--output",
        report.to_str().unwrap(),
        "search",
        "--mechanism",
        "minimax-tas-distance",
        "--objective",
        "mc",
        "--space",
        "line",
        "--restarts",
        "10",
        "--steps",
        "50",
        "--seed",
        "3",
    ]);
    assert_eq!(out.status.code(), Some(0), "{out:?}");
    let doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(doc["violation"], serde_json::json!(false));
    assert_eq!(doc["omniscient_ratio"], serde_json::json!(1.0));
    let best = doc["result"]["best_ratio"].as_f64().unwrap();
    let bound = doc["proven_bound"].as_f64().unwrap();
    assert!(best >= 1.0 && best <= bound + 1e-9);
}
