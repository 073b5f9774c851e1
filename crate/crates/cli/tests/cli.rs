//! End-to-end checks of the command-line interface.

use std::path::Path;
use std::process::Command;

fn drtest() -> Command {
    Command::new(env!("CARGO_BIN_EXE_drtest"))
}

fn run_ok(args: &[&str]) -> Vec<u8> {
    let out = drtest().args(args).output().expect("spawn drtest");
    assert!(
        out.status.success(),
        "drtest {args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out.stdout
}

#[test]
fn simulate_round_trips_through_edrt() {
    let dir = tempfile::tempdir().unwrap();
    let train = dir.path().join("train.csv");
    let test = dir.path().join("test.csv");
    run_ok(&[
        "simulate",
        "--setting",
        "B",
        "--n-train",
        "4000",
        "--seed",
        "3",
        "--out",
        train.to_str().unwrap(),
    ]);
    run_ok(&[
        "simulate",
        "--setting",
        "B",
        "--n-train",
        "10",
        "--n-test",
        "400",
        "--theta",
        "0.3",
        "--seed",
        "4",
        "--out",
        test.to_str().unwrap(),
    ]);
    let out = run_ok(&[
        "edrt",
        "--input",
        train.to_str().unwrap(),
        "--test",
        test.to_str().unwrap(),
        "--k-max",
        "16",
        "--seed",
        "5",
    ]);
    let doc: serde_json::Value = serde_json::from_slice(&out).unwrap();
    assert_eq!(doc["test"], "EDRT");
    assert!(doc["report"]["statistic"].is_number());
    assert!(doc["report"]["reject"].is_boolean());
    assert!(doc["tree"].is_object());
}

#[test]
fn bedrt_emits_replicates_on_request() {
    let out = run_ok(&[
        "bedrt",
        "--setting",
        "B",
        "--n-train",
        "3000",
        "--n-test",
        "300",
        "--theta",
        "0.1",
        "--k-max",
        "8",
        "--bootstrap-reps",
        "25",
        "--emit-replicates",
        "--seed",
        "6",
    ]);
    let doc: serde_json::Value = serde_json::from_slice(&out).unwrap();
    assert_eq!(doc["replicates"].as_array().unwrap().len(), 25);
    assert!(doc["tau"].is_number());
}

#[test]
fn mmd_test_runs_from_setting() {
    let out = run_ok(&[
        "mmd-test",
        "--setting",
        "A",
        "--n",
        "400",
        "--theta",
        "0.3",
        "--bootstrap-reps",
        "50",
        "--seed",
        "7",
    ]);
    let doc: serde_json::Value = serde_json::from_slice(&out).unwrap();
    assert_eq!(doc["test"], "MMD");
    assert!(doc["report"]["bandwidth"].as_f64().unwrap() > 0.0);
}

#[test]
fn power_curve_outputs_are_byte_identical_for_same_seed() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let args = |path: &Path| {
        vec![
            "power-curve".to_string(),
            "--setting".into(),
            "C".into(),
            "--n-train-grid".into(),
            "1000".into(),
            "--theta-grid".into(),
            "0,0.2".into(),
            "--reps".into(),
            "5".into(),
            "--tests".into(),
            "EDRT,BEDRT,MMD".into(),
            "--bootstrap-reps".into(),
            "20".into(),
            "--mmd-bootstrap-reps".into(),
            "20".into(),
            "--k-max".into(),
            "8".into(),
            "--seed".into(),
            "99".into(),
            "--out".into(),
            path.to_str().unwrap().into(),
        ]
    };
    let st = drtest().args(args(&a)).status().unwrap();
    assert!(st.success());
    let st = drtest().args(args(&b)).status().unwrap();
    assert!(st.success());
    let ca = std::fs::read(&a).unwrap();
    let cb = std::fs::read(&b).unwrap();
    assert!(!ca.is_empty());
    assert_eq!(ca, cb, "same seed must give byte-identical reports");

    // json format is deterministic too
    let aj = dir.path().join("a.json");
    let bj = dir.path().join("b.json");
    let mut argsj = args(&aj);
    argsj.extend(["--format".to_string(), "json".to_string()]);
    let st = drtest().args(&argsj).status().unwrap();
    assert!(st.success());
    let mut argsj2 = args(&bj);
    argsj2.extend(["--format".to_string(), "json".to_string()]);
    let st = drtest().args(&argsj2).status().unwrap();
    assert!(st.success());
    assert_eq!(std::fs::read(&aj).unwrap(), std::fs::read(&bj).unwrap());
}

#[test]
fn slope_command_reads_back_curve_csv() {
    let dir = tempfile::tempdir().unwrap();
    let curve = dir.path().join("curve.csv");
    // synthetic curve: theta = 3 / n exactly, all rates mid-band
    let mut text = String::from("n_train,theta,test,reject_rate,reps,failures,mean_sigma2_hat,mean_k_star\n");
    for n in [1000u32, 2000, 5000, 10000] {
        text.push_str(&format!("{n},{},BEDRT,0.5,10,0,1.0,2.0\n", 3.0 / n as f64));
    }
    std::fs::write(&curve, text).unwrap();
    let out = run_ok(&[
        "slope",
        "--input",
        curve.to_str().unwrap(),
        "--test",
        "BEDRT",
        "--band",
        "0.3,0.7",
    ]);
    let doc: serde_json::Value = serde_json::from_slice(&out).unwrap();
    let slope = doc["slope"].as_f64().unwrap();
    assert!((slope - 1.0).abs() < 1e-9, "slope {slope}");
}

#[test]
fn slope_errors_when_band_is_empty() {
    let dir = tempfile::tempdir().unwrap();
    let curve = dir.path().join("curve.csv");
    std::fs::write(
        &curve,
        "n_train,theta,test,reject_rate,reps,failures,mean_sigma2_hat,mean_k_star\n\
         1000,0.1,BEDRT,1.0,10,0,1.0,2.0\n",
    )
    .unwrap();
    let out = drtest()
        .args(["slope", "--input", curve.to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("band"));
}

#[test]
fn fit_partition_reports_nested_sizes() {
    let out = run_ok(&[
        "fit-partition",
        "--setting",
        "A",
        "--n-train",
        "4000",
        "--k-max",
        "8",
        "--seed",
        "8",
    ]);
    let doc: serde_json::Value = serde_json::from_slice(&out).unwrap();
    let k_star = doc["k_star"].as_u64().unwrap();
    let k_final = doc["k_final"].as_u64().unwrap();
    assert!(1 <= k_star && k_star <= k_final && k_final <= 8);
    assert_eq!(
        doc["per_k_signal"].as_array().unwrap().len(),
        k_final as usize
    );
}

#[test]
fn robustness_emits_one_row_per_pi() {
    let out = run_ok(&[
        "robustness",
        "--pi-grid",
        "0.5,0.7",
        "--n-train",
        "4000",
        "--reps",
        "3",
        "--k-max",
        "8",
        "--seed",
        "9",
    ]);
    let text = String::from_utf8(out).unwrap();
    let data_rows: Vec<&str> = text
        .lines()
        .filter(|l| !l.starts_with('#') && !l.starts_with("pi,"))
        .collect();
    assert_eq!(data_rows.len(), 2);
}

#[test]
fn preprocess_flag_handles_raw_coordinates() {
    let dir = tempfile::tempdir().unwrap();
    let train = dir.path().join("raw.csv");
    // raw coordinates far outside the unit square
    let mut text = String::from("x0,x1,source\n");
    let mut state = 1u64;
    let mut next = || {
        state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        (state >> 33) as f64 / (1u64 << 31) as f64
    };
    for i in 0..400 {
        let (cx, label) = if i % 3 == 0 { (900.0, 1) } else { (100.0, 0) };
        text.push_str(&format!(
            "{},{},{}\n",
            cx + 80.0 * (next() - 0.5),
            cx + 80.0 * (next() - 0.5),
            label
        ));
    }
    std::fs::write(&train, text).unwrap();
    let out = run_ok(&[
        "fit-partition",
        "--input",
        train.to_str().unwrap(),
        "--preprocess",
        "--k-max",
        "4",
        "--seed",
        "10",
    ]);
    let doc: serde_json::Value = serde_json::from_slice(&out).unwrap();
    assert!(doc["k_star"].as_u64().unwrap() >= 1);
}
