use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn wsnsim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wsnsim"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn small_config(dir: &Path, extra: &str) -> String {
    let path = dir.join("scenario.toml");
    fs::write(&path, format!("n = 30\nmax_rounds = 400\n{extra}")).unwrap();
    path.to_str().unwrap().to_owned()
}

#[test]
fn run_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path(), "protocol = \"TSEP\"\n[tiers]\nm = 0.1\nb = 0.3\nalpha = 1.0\n");
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    for out in [&a, &b] {
        let o = wsnsim(&["run", "--config", &cfg, "--seed", "7", "--out", out.to_str().unwrap()]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let csv_a = fs::read(a.join("rounds.csv")).unwrap();
    assert_eq!(csv_a, fs::read(b.join("rounds.csv")).unwrap());
    assert_eq!(fs::read(a.join("summary.json")).unwrap(), fs::read(b.join("summary.json")).unwrap());

    let text = String::from_utf8(csv_a).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "round,alive,dead,ch_count,packets_round,packets_cum,residual_energy"
    );
    assert_eq!(lines.count(), 400);
}

#[test]
fn compare_writes_table_and_csvs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path(), "");
    let out = dir.path().join("cmp");
    let o = wsnsim(&[
        "compare", "--config", &cfg, "--protocols", "LEACH,TEEN", "--seeds", "1,2", "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(out.join("LEACH.csv").exists() && out.join("TEEN.csv").exists());
    let table = fs::read_to_string(out.join("comparison.csv")).unwrap();
    assert_eq!(table.lines().count(), 3);
    assert!(table.lines().nth(1).unwrap().starts_with("LEACH,2,"));
}

#[test]
fn compare_without_protocols_is_usage_error() {
    let o = wsnsim(&["compare", "--seeds", "1"]);
    assert_eq!(o.status.code(), Some(1));
    let o = wsnsim(&["compare", "--protocols", "", "--seeds", "1"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("protocol"));
}

#[test]
fn bad_config_exits_one_with_diagnostic() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = small_config(dir.path(), "[tiers]\nm = 0.8\nb = 0.3\n");
    let o = wsnsim(&["run", "--config", &cfg]);
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8_lossy(&o.stderr);
    assert_eq!(err.trim().lines().count(), 1, "{err}");
    assert!(err.contains("m + b"));

    let o = wsnsim(&["run", "--config", dir.path().join("missing.toml").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let o = wsnsim(&["preset", "paper-case-9"]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn unwritable_output_is_runtime_error() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    fs::write(&blocker, "x").unwrap();
    let cfg = small_config(dir.path(), "");
    let o = wsnsim(&["run", "--config", &cfg, "--out", blocker.join("sub").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn preset_writes_plots_from_csvs() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("preset");
    let o = wsnsim(&["preset", "paper-case-1", "--seeds", "1", "--out", out.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    for p in ["LEACH", "SEP", "ESEP", "TEEN", "TSEP"] {
        assert!(out.join(format!("{p}.csv")).exists());
    }
    for svg in ["alive.svg", "dead.svg", "packets.svg"] {
        let text = fs::read_to_string(out.join(svg)).unwrap();
        assert!(text.starts_with("<svg"));
        assert_eq!(text.matches("<polyline").count(), 5);
    }
    assert!(String::from_utf8_lossy(&o.stdout).contains("TSEP"));
}
