use std::path::PathBuf;

use fourier_edges::harness::*;
use fourier_edges::sampling::{Pattern, TestFunction};

fn scratch(name: &str) -> PathBuf {
    let d = std::env::temp_dir().join(format!("fedge-test-{}-{name}", std::process::id()));
    std::fs::create_dir_all(&d).unwrap();
    d
}

fn small() -> ExperimentConfig {
    ExperimentConfig { m: Some(24), j: 16, ..ExperimentConfig::default() }
}

#[test]
fn identical_config_gives_identical_csv() {
    let dir = scratch("det");
    let cfg = ExperimentConfig { noise_std: 0.01, seed: 9, ..small() };
    let mut bytes = vec![];
    for k in 0..2 {
        let o = Runner::new().run(&cfg).unwrap();
        let p = dir.join(format!("d{k}.csv"));
        write_table(&p, &cfg, &["x", "g_estimate", "g_truth", "posterior_std"], &detection_rows(&o.detection, Method::Sbl)).unwrap();
        bytes.push(std::fs::read(&p).unwrap());
    }
    assert_eq!(bytes[0], bytes[1]);
    let text = String::from_utf8(bytes[0].clone()).unwrap();
    let first = text.lines().next().unwrap();
    assert!(first.starts_with("# config_hash=") && first.contains("seed=9") && first.contains("fourier-edges="));
    assert_eq!(text.lines().nth(1).unwrap(), "x,g_estimate,g_truth,posterior_std");
    assert_eq!(text.lines().count(), 2 + 33);
}

#[test]
fn l1_rows_leave_std_blank() {
    let o = Runner::new().run(&small()).unwrap();
    let rows = detection_rows(&o.detection, Method::L1);
    assert!(rows.iter().all(|r| r[3].is_empty()));
    assert!(detection_rows(&o.detection, Method::Sbl).iter().all(|r| !r[3].is_empty()));
}

#[test]
fn table_has_one_row_per_cell_and_method() {
    let rows = run_table1(&ExperimentConfig { j: 16, m: Some(32), ..ExperimentConfig::default() }, 2);
    assert_eq!(rows.len(), 18);
    for r in &rows {
        assert_eq!(r.trials, 2);
        assert!(r.min <= r.mean && r.mean <= r.max);
    }
}

#[test]
fn resolution_rows_follow_grid_sizes() {
    let base = ExperimentConfig { function: TestFunction::F3, noise_std: 0.02, m: Some(24), ..ExperimentConfig::default() };
    let rows = sweep_resolution(&base, &[8, 16, 16], 1);
    assert_eq!(rows.len(), 3);
    assert_eq!(rows[1].rel_error, rows[2].rel_error);
}

#[test]
fn noisy_comparison_requires_noise() {
    let scen = [(TestFunction::F1, Pattern::Jittered)];
    assert!(run_noisy_comparison(&small(), &scen, 1).is_err());
    let rows = run_noisy_comparison(&ExperimentConfig { noise_std: 0.01, ..small() }, &scen, 2).unwrap();
    assert_eq!(rows.len(), 2);
}

#[test]
fn zero_noise_matches_the_clean_path() {
    let cfg = small();
    let a = Runner::new().run(&cfg).unwrap();
    let b = Runner::new().run(&ExperimentConfig { noise_std: 0.0, seed: cfg.seed, ..cfg.clone() }).unwrap();
    assert_eq!(a.detection.sbl_error, b.detection.sbl_error);
    assert_eq!(a.data.values, b.data.values);
}

#[test]
fn reconstruction_runs_when_enabled() {
    let mut cfg = small();
    cfg.recon.enabled = true;
    let o = Runner::new().run(&cfg).unwrap();
    let r = o.reconstruction.unwrap();
    assert_eq!(r.x.len(), 33);
    assert!(r.sbl_error.unwrap() < 0.5);
}

#[test]
fn csv_and_json_writers() {
    let dir = scratch("w");
    let cfg = small();
    write_csv(&dir.join("t.csv"), &cfg, &sweep_threshold(&[0.0, 1.0], &[2.0, 0.5], &[0.1, 1.5])).unwrap();
    let text = std::fs::read_to_string(dir.join("t.csv")).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[1], "threshold,count_l1,count_sbl");
    assert_eq!(lines[2], "0.1,1,2");
    assert_eq!(lines[3], "1.5,0,1");
    write_json(&dir.join("c.json"), &cfg).unwrap();
    let back: ExperimentConfig = serde_json::from_str(&std::fs::read_to_string(dir.join("c.json")).unwrap()).unwrap();
    assert_eq!(back, cfg);
}
