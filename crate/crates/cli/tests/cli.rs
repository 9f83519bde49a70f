use std::path::Path;
use std::process::{Command, Output};

fn boostcolony(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_boostcolony"))
        .args(args)
        .arg("--out")
        .arg(out)
        .env("RUST_LOG", "info")
        .output()
        .unwrap()
}

#[test]
fn iso_check_writes_reports_and_lists_paths() {
    let dir = tempfile::tempdir().unwrap();
    let o = boostcolony(&["iso-check", "--seed", "5"], dir.path());
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let stdout = String::from_utf8(o.stdout).unwrap();
    let lines: Vec<&str> = stdout.lines().collect();
    assert!(lines.iter().all(|l| Path::new(l).exists()), "{stdout}");
    for name in ["iso_check_5.csv", "iso_check_5.json", "resolved_config.json"] {
        assert!(dir.path().join(name).exists(), "missing {name}");
    }
    let resolved: serde_json::Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("resolved_config.json")).unwrap()).unwrap();
    assert_eq!(resolved["seed"], 5);
}

#[test]
fn unknown_config_key_exits_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.json");
    std::fs::write(&cfg, r#"{"colony": {"evaporaton": 0.2}}"#).unwrap();
    let o = boostcolony(&["traces", "--config", cfg.to_str().unwrap()], &dir.path().join("out"));
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("evaporaton"));
    assert!(o.stdout.is_empty());
}

#[test]
fn flags_override_the_file() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    std::fs::write(&cfg, r#"{"seed": 3, "noise": {"replicates": 4}}"#).unwrap();
    let o = boostcolony(
        &["noise", "--config", cfg.to_str().unwrap(), "--seed", "9", "--noise-levels", "0,0.2", "--format", "csv"],
        dir.path(),
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let table = std::fs::read_to_string(dir.path().join("table2_9.csv")).unwrap();
    assert_eq!(table.lines().count(), 3);
    assert!(!dir.path().join("noise_robustness_9.json").exists());
}

#[test]
fn bad_range_is_a_config_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = boostcolony(&["weak-learnability", "--gammas", "0.7"], dir.path());
    assert_eq!(o.status.code(), Some(1));
}
