use std::path::Path;
use std::process::Command;

fn sim() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_d2d-sim"));
    cmd.env_remove("D2D_SIM_SEED");
    cmd
}

const SMALL: &str = r#"
[cell]
num_cellular = 6
num_d2d = 3
seed = 42

[sweep]
param = "num_d2d"
values = [2, 4]
realizations = 12
"#;

fn write_config(dir: &Path) -> std::path::PathBuf {
    let path = dir.join("run.toml");
    std::fs::write(&path, SMALL).unwrap();
    path
}

fn run_to(config: &Path, out: &Path, jobs: &str) -> Vec<u8> {
    let status = sim().arg("--config").arg(config).arg("--out").arg(out).args(["--jobs", jobs]).status().unwrap();
    assert!(status.success());
    std::fs::read(out).unwrap()
}

#[test]
fn dry_run_prints_config_and_writes_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path());
    let out = dir.path().join("never.csv");
    let output =
        sim().arg("--config").arg(&config).arg("--out").arg(&out).args(["--seed", "7", "--dry-run"]).output().unwrap();
    assert!(output.status.success());
    let text = String::from_utf8(output.stdout).unwrap();
    assert!(text.contains("seed = 7"), "{text}");
    assert!(text.contains("num_d2d = 3"), "{text}");
    assert!(!out.exists());
}

#[test]
fn csv_is_byte_identical_across_runs_and_jobs() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path());
    let a = run_to(&config, &dir.path().join("a.csv"), "1");
    let b = run_to(&config, &dir.path().join("b.csv"), "1");
    let c = run_to(&config, &dir.path().join("c.csv"), "4");
    assert_eq!(a, b);
    assert_eq!(a, c);

    let text = String::from_utf8(a).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert!(lines[0].starts_with("sweep_param,param_value,algorithm,realizations,sum_rate_bps"));
    // Two sweep points times three algorithms.
    assert_eq!(lines.len(), 1 + 6);
}

#[test]
fn seed_flag_changes_output() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path());
    let base = run_to(&config, &dir.path().join("a.csv"), "2");
    let out = dir.path().join("b.csv");
    let status = sim().arg("--config").arg(&config).arg("--out").arg(&out).args(["--seed", "43"]).status().unwrap();
    assert!(status.success());
    assert_ne!(base, std::fs::read(out).unwrap());
}

#[test]
fn env_seed_applies_only_without_config_seed() {
    let output = sim().args(["--dry-run"]).env("D2D_SIM_SEED", "99").output().unwrap();
    assert!(String::from_utf8(output.stdout).unwrap().contains("seed = 99"));

    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path());
    let output = sim().arg("--config").arg(&config).arg("--dry-run").env("D2D_SIM_SEED", "99").output().unwrap();
    assert!(String::from_utf8(output.stdout).unwrap().contains("seed = 42"));
}

#[test]
fn algorithm_filter_and_json_output() {
    let dir = tempfile::tempdir().unwrap();
    let config = write_config(dir.path());
    let out = dir.path().join("r.json");
    let status = sim()
        .arg("--config")
        .arg(&config)
        .arg("--out")
        .arg(&out)
        .args(["-a", "greedy", "--format", "json", "-n", "3"])
        .status()
        .unwrap();
    assert!(status.success());
    let text = std::fs::read_to_string(out).unwrap();
    assert!(text.contains("\"greedy\""));
    assert!(!text.contains("\"ca\""));
}

#[test]
fn bad_inputs_fail_with_a_message() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "[cell]\nmax_d2d_distance_ratio = 1.5\n").unwrap();
    let output = sim().arg("--config").arg(&bad).arg("--dry-run").output().unwrap();
    assert!(!output.status.success());
    assert!(String::from_utf8_lossy(&output.stderr).contains("max_d2d_distance_ratio"));

    std::fs::write(&bad, "[cell]\nbogus = 1\n").unwrap();
    let output = sim().arg("--config").arg(&bad).arg("--dry-run").output().unwrap();
    assert!(!output.status.success());
    assert!(String::from_utf8_lossy(&output.stderr).contains("bogus"));

    let config = write_config(dir.path());
    let output =
        sim().arg("--config").arg(&config).arg("--out").arg(dir.path().join("missing/dir/out.csv")).output().unwrap();
    assert!(!output.status.success());
    assert!(!output.stderr.is_empty());

    let output = sim().arg("--config").arg(dir.path().join("nope.toml")).output().unwrap();
    assert!(!output.status.success());
}
