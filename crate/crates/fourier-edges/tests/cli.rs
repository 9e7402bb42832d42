use std::process::Command;

fn fedge(args: &[&str]) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_fedge")).args(args).output().unwrap();
    (out.status.code().unwrap(), String::from_utf8_lossy(&out.stderr).into_owned())
}

fn dir(name: &str) -> String {
    std::env::temp_dir().join(format!("fedge-cli-{}-{name}", std::process::id())).display().to_string()
}

#[test]
fn modes_writes_csv_with_header() {
    let d = dir("modes");
    let (code, _) = fedge(&["modes", "--pattern", "quad", "--M", "8", "--J", "8", "--out", &d]);
    assert_eq!(code, 0);
    let text = std::fs::read_to_string(format!("{d}/modes.csv")).unwrap();
    assert!(text.starts_with("# config_hash="));
    assert_eq!(text.lines().count(), 2 + 17);
}

#[test]
fn contract_errors_exit_one() {
    let d = dir("bad");
    assert_eq!(fedge(&["detect", "--J", "0", "--out", &d]).0, 1);
    assert_eq!(fedge(&["detect", "--mu", "-1", "--out", &d]).0, 1);
    let cfg = format!("{d}.json");
    std::fs::write(&cfg, "{not json").unwrap();
    assert_eq!(fedge(&["modes", "--config", &cfg, "--out", &d]).0, 1);
}

#[test]
fn non_convergence_exits_two() {
    let d = dir("nc");
    let (code, err) = fedge(&["detect", "--M", "16", "--J", "16", "--method", "sbl", "--sbl-max-iter", "1", "--out", &d]);
    assert_eq!(code, 2, "{err}");
    assert!(std::path::Path::new(&format!("{d}/detect_sbl.csv")).exists());
}

#[test]
fn config_file_is_merged_under_flags() {
    let d = dir("cfg");
    std::fs::create_dir_all(&d).unwrap();
    let cfg = format!("{d}/c.json");
    std::fs::write(&cfg, r#"{"J": 12, "M": 12, "sbl": {"tol": 1e-5}}"#).unwrap();
    let (code, _) = fedge(&["detect", "--config", &cfg, "--J", "10", "--method", "l1", "--out", &d]);
    assert_eq!(code, 0);
    let text = std::fs::read_to_string(format!("{d}/detect_l1.csv")).unwrap();
    assert_eq!(text.lines().count(), 2 + 21);
}
