use std::path::Path;
use std::process::{Command, Output};

use hvw_core::workbench::tables::{SCAN_COLUMNS, TRANSPORT_COLUMNS};

fn hvw(args: &[&str], env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_hvw"));
    for (k, _) in std::env::vars().filter(|(k, _)| k.starts_with("HVW_")) {
        cmd.env_remove(k);
    }
    cmd.args(args).envs(env.iter().copied()).output().expect("hvw runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn report(path: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn verify_passes_and_is_deterministic() {
    let a = hvw(&["verify", "calculus", "semiflat", "--format", "csv", "--seed", "3"], &[]);
    let b = hvw(&["verify", "calculus", "semiflat", "--format", "csv", "--seed", "3", "--parallel"], &[]);
    assert_eq!(a.status.code(), Some(0), "{}", stderr(&a));
    assert_eq!(stdout(&a), stdout(&b));
    assert!(stdout(&a).starts_with("name,anchor,residual,tolerance,passed,count,min,max,mean,error\n"));
    let c = hvw(&["verify", "calculus", "--format", "csv", "--seed", "4"], &[]);
    assert_ne!(stdout(&a).lines().nth(1), stdout(&c).lines().nth(1));
}

#[test]
fn failing_check_exits_one_and_names_record() {
    let o = hvw(&["verify", "calculus", "--tol", "1e-30"], &[]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("check failed: calculus/"), "{}", stderr(&o));
}

#[test]
fn usage_errors_exit_two() {
    assert_eq!(hvw(&["verify", "nonsense"], &[]).status.code(), Some(2));
    assert_eq!(hvw(&["verify", "calculus", "--seed", "0"], &[]).status.code(), Some(2));
    assert_eq!(hvw(&["verify", "calculus", "--format", "xml"], &[]).status.code(), Some(2));
    assert_eq!(hvw(&["frobnicate"], &[]).status.code(), Some(2));
    assert_eq!(hvw(&["verify", "calculus", "--config", "/nonexistent/hvw.json"], &[]).status.code(), Some(2));
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.json");
    std::fs::write(&cfg, r#"{"sede": 3}"#).unwrap();
    assert_eq!(hvw(&["verify", "calculus", "--config", cfg.to_str().unwrap()], &[]).status.code(), Some(2));
}

#[test]
fn precedence_is_flags_then_env_then_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(&cfg, r#"{"seed": 5, "samples": 2}"#).unwrap();
    let out = dir.path().join("r.json");
    let (c, o) = (cfg.to_str().unwrap(), out.to_str().unwrap());

    let r = hvw(&["verify", "calculus", "--config", c, "--out", o], &[]);
    assert_eq!(r.status.code(), Some(0), "{}", stderr(&r));
    let v = report(&out);
    assert_eq!(v["seed"], 5);
    assert_eq!(v["records"][0]["stats"]["count"], 2);
    assert!(stdout(&r).lines().all(|l| l.starts_with("PASS ")));

    hvw(&["verify", "calculus", "--config", c, "--out", o], &[("HVW_SEED", "6")]);
    assert_eq!(report(&out)["seed"], 6);

    hvw(&["verify", "calculus", "--config", c, "--out", o, "--seed", "8"], &[("HVW_SEED", "6")]);
    assert_eq!(report(&out)["seed"], 8);

    hvw(&["verify", "calculus", "--out", o], &[("HVW_CONFIG", c), ("HVW_SAMPLES", "3")]);
    let v = report(&out);
    assert_eq!(v["seed"], 5);
    assert_eq!(v["records"][0]["stats"]["count"], 3);
}

#[test]
fn tolerance_map_overrides_one_record() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(&cfg, r#"{"tolerances": {"calculus/jacobi": 1e-40}}"#).unwrap();
    let o = hvw(&["verify", "calculus", "--config", cfg.to_str().unwrap()], &[]);
    assert_eq!(o.status.code(), Some(1));
    let err = stderr(&o);
    assert!(err.contains("check failed: calculus/jacobi"), "{err}");
    assert_eq!(err.matches("check failed").count(), 1, "{err}");
}

#[test]
fn scan_levi_table() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("scan.json");
    std::fs::write(&cfg, r#"{"scan": {"generic": 2, "critical": 2}}"#).unwrap();
    let o = hvw(&["scan-levi", "--config", cfg.to_str().unwrap(), "--format", "csv"], &[]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], SCAN_COLUMNS.join(","));
    assert_eq!(lines.len(), 5);
    assert!(lines[1].contains(",generic,") && lines[3].contains(",constructed,"));

    std::fs::write(&cfg, r#"{"scan": {"generic": 0, "critical": 0}}"#).unwrap();
    let o = hvw(&["scan-levi", "--config", cfg.to_str().unwrap(), "--format", "csv"], &[]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), format!("{}\n", SCAN_COLUMNS.join(",")));
}

#[test]
fn transport_table() {
    let o = hvw(&["transport", "--format", "csv"], &[]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    let text = stdout(&o);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], TRANSPORT_COLUMNS.join(","));
    assert_eq!(lines.len(), 6);
    let ratio: f64 = lines[4].rsplit(',').next().unwrap().parse().unwrap();
    assert!((3.6..=4.4).contains(&ratio), "{ratio}");

    let json = hvw(&["transport"], &[]);
    let rows: serde_json::Value = serde_json::from_slice(&json.stdout).unwrap();
    assert_eq!(rows.as_array().unwrap().len(), 5);
}

#[test]
fn shipped_default_config_matches_builtin_defaults() {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs/default.json");
    let cfg = hvw_core::workbench::RunConfig::from_file(&path).unwrap();
    assert_eq!(cfg, hvw_core::workbench::RunConfig::default());
}
