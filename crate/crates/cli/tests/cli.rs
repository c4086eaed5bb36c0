use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../configs")
}

fn besov(args: &[&str], config: &Path, out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_besov"))
        .args(args)
        .arg("--config")
        .arg(config)
        .arg("--out")
        .arg(out)
        .output()
        .expect("binary runs")
}

fn edited(name: &str, dir: &Path, edit: impl FnOnce(&mut serde_json::Value)) -> PathBuf {
    let mut v: serde_json::Value = serde_json::from_str(&fs::read_to_string(configs().join(name)).unwrap()).unwrap();
    edit(&mut v);
    let path = dir.join(name);
    fs::write(&path, v.to_string()).unwrap();
    path
}

#[test]
fn reruns_are_byte_identical() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let cfg = configs().join("approx-1d.json");
    for dir in [&a, &b] {
        let out = besov(&["rates-approx", "--seed", "3"], &cfg, dir.path());
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
    }
    for name in ["report.json", "table.csv"] {
        let x = fs::read(a.path().join(name)).unwrap();
        let y = fs::read(b.path().join(name)).unwrap();
        assert!(!x.is_empty());
        assert_eq!(x, y, "{name} differs");
    }
    let report: serde_json::Value = serde_json::from_slice(&fs::read(a.path().join("report.json")).unwrap()).unwrap();
    assert_eq!(report["seed"], 3);
    assert_eq!(report["passed"], true);
    assert!(fs::read_dir(a.path()).unwrap().all(|e| !e.unwrap().file_name().to_string_lossy().ends_with(".tmp")));
}

#[test]
fn field_dump_is_written_on_request() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = edited("approx-1d.json", dir.path(), |v| v["dump_field"] = true.into());
    let out = besov(&["rates-approx"], &cfg, dir.path());
    assert!(out.status.success());
    assert!(!fs::read_to_string(dir.path().join("field.dump")).unwrap().is_empty());
}

#[test]
fn recovery_below_the_smoothness_threshold_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = edited("recovery-1d-linf.json", dir.path(), |v| v["alpha"] = 0.4.into());
    let out = besov(&["rates-recovery"], &cfg, dir.path());
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("recovery condition"), "{err}");
    assert!(!dir.path().join("report.json").exists());
}

#[test]
fn malformed_fields_are_reported_with_their_path() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = edited("approx-1d.json", dir.path(), |v| v["quadrature"]["points"] = "many".into());
    let out = besov(&["rates-approx"], &cfg, dir.path());
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("`quadrature.points`"), "{err}");

    let cfg = edited("approx-1d.json", dir.path(), |v| v["levels"] = serde_json::json!([3, 40]));
    let err = String::from_utf8_lossy(&besov(&["rates-approx"], &cfg, dir.path()).stderr).into_owned();
    assert!(err.contains("`levels`"), "{err}");
}

#[test]
fn missing_config_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let out = besov(&["selftest"], &dir.path().join("absent.json"), dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("absent.json"));
}

#[test]
fn staircase_domain_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = besov(&["verify-domain"], &configs().join("verify-staircase.json"), dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
    let report: serde_json::Value = serde_json::from_slice(&fs::read(dir.path().join("report.json")).unwrap()).unwrap();
    for key in ["k0", "gamma0", "c0"] {
        assert!(report["probe"][key].is_number(), "{key}: {}", report["probe"]);
    }
    assert!(fs::read_to_string(dir.path().join("table.csv")).unwrap().lines().count() > 1);
}

#[test]
fn selftest_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = besov(&["selftest"], &configs().join("selftest.json"), dir.path());
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stdout));
    let report: serde_json::Value = serde_json::from_slice(&fs::read(dir.path().join("report.json")).unwrap()).unwrap();
    assert_eq!(report["passed"], true);
}
