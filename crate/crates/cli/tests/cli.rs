//! End-to-end tests driving the compiled binary.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn drec(args: &[&str], envs: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_drec"));
    cmd.args(args);
    for (k, v) in envs {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn write_config(dir: &Path, name: &str, text: &str) -> String {
    let path = dir.join(name);
    fs::write(&path, text).unwrap();
    path.to_str().unwrap().to_string()
}

fn read(dir: &Path, name: &str) -> Vec<u8> {
    fs::read(dir.join(name)).unwrap()
}

#[test]
fn sweep_reruns_are_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let config = write_config(
        tmp.path(),
        "z2.json",
        r#"{"p": 30, "lambda": [0.6, 1.2], "replicates": 4, "seed": 9}"#,
    );
    let out_a = tmp.path().join("a");
    let out_b = tmp.path().join("b");
    for out in [&out_a, &out_b] {
        let res = drec(
            &["sync-z2", "--config", &config, "--out", out.to_str().unwrap()],
            &[("DR_LOG", "quiet")],
        );
        assert!(res.status.success(), "stderr: {}", String::from_utf8_lossy(&res.stderr));
        assert!(res.stderr.is_empty(), "quiet run logged: {:?}", res.stderr);
    }
    for name in ["summary.csv", "trajectories.csv", "rate.csv"] {
        assert_eq!(read(&out_a, name), read(&out_b, name), "{name} differs");
    }
}

#[test]
fn summary_rows_match_grid_and_format_flag() {
    let tmp = tempfile::tempdir().unwrap();
    let config = write_config(
        tmp.path(),
        "mra.json",
        r#"{"p": 12, "d": 4, "delta_sq": [8, 16, 32], "replicates": 2, "seed": 1}"#,
    );
    let out = tmp.path().join("out");
    let res = drec(
        &["mra", "--config", &config, "--out", out.to_str().unwrap(), "--format", "json"],
        &[],
    );
    assert!(res.status.success());
    let summary: serde_json::Value =
        serde_json::from_slice(&read(&out, "summary.json")).unwrap();
    assert_eq!(summary.as_array().unwrap().len(), 3);
    // Trajectories and rates stay CSV regardless of --format.
    assert!(out.join("trajectories.csv").exists());
    assert!(out.join("rate.csv").exists());
    assert!(!out.join("summary.csv").exists());
}

#[test]
fn unknown_keys_are_rejected_with_exit_2() {
    let tmp = tempfile::tempdir().unwrap();
    let config = write_config(
        tmp.path(),
        "bad.json",
        r#"{"p": 30, "lambda": 1, "frobnicate": true}"#,
    );
    let res = drec(&["sync-z2", "--config", &config], &[]);
    assert_eq!(res.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&res.stderr);
    assert!(stderr.contains("unknown config keys: frobnicate"), "stderr: {stderr}");
}

#[test]
fn missing_keys_are_named() {
    let tmp = tempfile::tempdir().unwrap();
    let config = write_config(tmp.path(), "gmm.json", r#"{"p": 10, "delta": 2}"#);
    let res = drec(&["gmm", "--config", &config], &[]);
    assert_eq!(res.status.code(), Some(2));
    let stderr = String::from_utf8_lossy(&res.stderr);
    assert!(stderr.contains("missing config keys: k, d"), "stderr: {stderr}");
}

#[test]
fn range_violations_name_the_constraint() {
    let tmp = tempfile::tempdir().unwrap();
    let config = write_config(
        tmp.path(),
        "sign.json",
        r#"{"n": 50, "p": 20, "s": 30, "snr": 3}"#,
    );
    let res = drec(&["sign", "--config", &config], &[]);
    assert_eq!(res.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&res.stderr).contains("s must be ≤ p"));
}

#[test]
fn seed_and_replicate_overrides_apply() {
    let tmp = tempfile::tempdir().unwrap();
    let config = write_config(
        tmp.path(),
        "zk.json",
        r#"{"p": 20, "k": 3, "lambda": 0.9, "replicates": 1, "seed": 0}"#,
    );
    let out1 = tmp.path().join("s1");
    let out2 = tmp.path().join("s2");
    let out3 = tmp.path().join("s1-again");
    for (out, seed) in [(&out1, "1"), (&out2, "2"), (&out3, "1")] {
        let res = drec(
            &[
                "sync-zk",
                "--config",
                &config,
                "--out",
                out.to_str().unwrap(),
                "--seed",
                seed,
                "--replicates",
                "3",
            ],
            &[],
        );
        assert!(res.status.success());
    }
    assert_ne!(read(&out1, "trajectories.csv"), read(&out2, "trajectories.csv"));
    assert_eq!(read(&out1, "trajectories.csv"), read(&out3, "trajectories.csv"));
    let summary = String::from_utf8(read(&out1, "summary.csv")).unwrap();
    assert_eq!(summary.lines().count(), 2);
    let trajectories = String::from_utf8(read(&out1, "trajectories.csv")).unwrap();
    assert!(trajectories.lines().skip(1).any(|l| l.split(',').nth(1) == Some("2")));
}

#[test]
fn invalid_replicate_override_is_rejected() {
    let tmp = tempfile::tempdir().unwrap();
    let config = write_config(tmp.path(), "z2.json", r#"{"p": 10, "lambda": 1}"#);
    let res = drec(&["sync-z2", "--config", &config, "--replicates", "0"], &[]);
    assert_eq!(res.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&res.stderr).contains("replicates must be ≥ 1"));
}

#[test]
fn missing_config_file_is_a_usage_error() {
    let res = drec(&["gmm", "--config", "/nonexistent/nope.json"], &[]);
    assert_eq!(res.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&res.stderr).contains("cannot read"));
}

#[test]
fn selftest_subcommand_passes() {
    let res = drec(&["selftest"], &[]);
    assert!(res.status.success());
    assert!(String::from_utf8_lossy(&res.stdout).contains("selftest: ok"));
}

#[test]
fn info_logging_reports_progress_and_files() {
    let tmp = tempfile::tempdir().unwrap();
    let config = write_config(tmp.path(), "z2.json", r#"{"p": 10, "lambda": 1}"#);
    let out = tmp.path().join("out");
    let res = drec(
        &["sync-z2", "--config", &config, "--out", out.to_str().unwrap()],
        &[("DR_LOG", "info")],
    );
    assert!(res.status.success());
    let stderr = String::from_utf8_lossy(&res.stderr);
    assert!(stderr.contains("1 grid point(s) x 1 replicate(s)"));
    assert!(stderr.contains("wrote"));
}
