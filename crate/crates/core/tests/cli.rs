use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_barron-gauge"))
}

fn config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs").join(name)
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn summary(path: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn barron_of_triangular_document_is_three() {
    let o = run(&["barron", "--config", config("triangular.json").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o).trim(), "3.0");
}

#[test]
fn spectral_prints_a_finite_bound() {
    let o = run(&["spectral", "--config", config("triangular.json").to_str().unwrap(), "--set", "delta=0.5"]);
    assert_eq!(o.status.code(), Some(0));
    let v: f64 = stdout(&o).trim().parse().unwrap();
    assert!(v.is_finite() && v > 0.0);
}

#[test]
fn invalid_delta_exits_one() {
    let o = run(&["embed", "--set", "delta=1.5"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("delta"));
}

#[test]
fn unknown_key_exits_one() {
    let o = run(&["tight", "--set", "frobnication=3"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn wrong_schema_version_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("c.json");
    std::fs::write(&path, r#"{"schema_version": 2}"#).unwrap();
    let o = run(&["tight", "--config", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn bad_thread_count_exits_one() {
    let o = bin().env("BARRON_GAUGE_THREADS", "zero").args(["tight"]).output().unwrap();
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn tight_with_rmax_writes_csv_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["tight", "--set", "Rmax=1e6", "--out", dir.path().to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let s = summary(&dir.path().join("tight.json"));
    let slope = s["constants"]["slope"].as_f64().unwrap();
    assert!((slope - std::f64::consts::FRAC_2_PI).abs() < 0.03, "slope {slope}");
    assert_eq!(s["status"], "pass");
    let csv = std::fs::read_to_string(dir.path().join("tight.csv")).unwrap();
    assert_eq!(csv.lines().count(), 6);
    assert!(csv.starts_with("R,ln_R,S,residual"));
}

#[test]
fn help_mentions_every_subcommand() {
    let o = run(&["--help"]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    for sub in ["decay", "moment", "spectral", "barron", "embed", "tight", "mc-rate", "remark2", "fit"] {
        assert!(text.contains(sub));
    }
}

#[test]
fn same_seed_gives_identical_bytes() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for dir in [&a, &b] {
        let o = bin()
            .env("BARRON_GAUGE_THREADS", if dir.path() == a.path() { "1" } else { "3" })
            .args(["mc-rate", "--seed", "11", "--set", "total_atoms=2000", "--set", "grid_points=500"])
            .args(["--set", "m_list=[8,32,128]", "--set", "resamples=4", "--out"])
            .arg(dir.path())
            .output()
            .unwrap();
        assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    }
    for file in ["mc-rate.csv", "mc-rate.json"] {
        let x = std::fs::read(a.path().join(file)).unwrap();
        let y = std::fs::read(b.path().join(file)).unwrap();
        assert_eq!(x, y, "{file} differs");
    }
}

#[test]
fn fit_config_runs() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&[
        "fit",
        "--config",
        config("fit.json").to_str().unwrap(),
        "--out",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(0));
    let s = summary(&dir.path().join("fit.json"));
    assert_eq!(s["flags"]["objective_monotone"], true);
}
