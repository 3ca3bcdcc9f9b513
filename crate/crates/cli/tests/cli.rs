use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn mvcs(args: &[&str], cwd: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mvcs"))
        .args(args)
        .current_dir(cwd)
        .env_remove("MVCS_THREADS")
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    assert!(
        out.status.success(),
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

fn synth(dir: &Path) {
    let out = mvcs(
        &[
            "synth",
            "--n",
            "90",
            "--dims",
            "3,4,2",
            "--seed",
            "4",
            "--out-dir",
            "data",
        ],
        dir,
    );
    stdout_json(&out);
}

#[test]
fn score_reports_every_component() {
    let tmp = tempfile::tempdir().unwrap();
    synth(tmp.path());
    let v = stdout_json(&mvcs(
        &["score", "data/manifest.json", "--tau", "1.0", "--k", "10"],
        tmp.path(),
    ));
    for key in [
        "per_view_scores",
        "s_pv",
        "s_joint",
        "s_nbr",
        "s_raw",
        "s_final",
        "weights",
        "config_echo",
    ] {
        assert!(v.get(key).is_some(), "missing {key}");
    }
    assert_eq!(v["config_echo"]["k"], 10);
    assert_eq!(v["view_names"].as_array().unwrap().len(), 3);
}

#[test]
fn missing_manifest_is_a_data_error() {
    let tmp = tempfile::tempdir().unwrap();
    let out = mvcs(&["detect", "missing.json"], tmp.path());
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(
        err.contains("missing file") && err.contains("missing.json"),
        "{err}"
    );
}

#[test]
fn usage_errors_exit_two_and_name_the_flag() {
    let tmp = tempfile::tempdir().unwrap();
    synth(tmp.path());
    for (args, flag) in [
        (vec!["score", "data/manifest.json", "--bogus"], "--bogus"),
        (
            vec![
                "corrupt",
                "data/manifest.json",
                "--views",
                "0",
                "--mode",
                "per",
                "--out-dir",
                "x",
            ],
            "--views",
        ),
        (
            vec![
                "corrupt",
                "data/manifest.json",
                "--views",
                "1",
                "--mode",
                "blur",
                "--out-dir",
                "x",
            ],
            "--mode",
        ),
        (vec!["score", "data/manifest.json", "--k", "many"], "--k"),
    ] {
        let out = mvcs(&args, tmp.path());
        assert_eq!(out.status.code(), Some(2), "{args:?}");
        assert!(
            String::from_utf8_lossy(&out.stderr).contains(flag),
            "{args:?}"
        );
        assert!(out.stdout.is_empty());
    }
}

#[test]
fn invalid_config_is_a_data_error() {
    let tmp = tempfile::tempdir().unwrap();
    synth(tmp.path());
    let out = mvcs(&["score", "data/manifest.json", "--k", "500"], tmp.path());
    assert_eq!(out.status.code(), Some(1));
    let out = mvcs(&["detect", "data/manifest.json", "--tau=-1"], tmp.path());
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn corrupt_writes_a_loadable_dataset() {
    let tmp = tempfile::tempdir().unwrap();
    synth(tmp.path());
    let v = stdout_json(&mvcs(
        &[
            "corrupt",
            "data/manifest.json",
            "--views",
            "1,3",
            "--mode",
            "per",
            "--seed",
            "7",
            "--out-dir",
            "out",
        ],
        tmp.path(),
    ));
    assert_eq!(
        v["provenance"]["targets"],
        serde_json::json!(["view_1", "view_3"])
    );
    let ds = mvcs::load_dataset(tmp.path().join("out/manifest.json")).unwrap();
    let clean = mvcs::load_dataset(tmp.path().join("data/manifest.json")).unwrap();
    assert_eq!(ds.view(1), clean.view(1));
    assert_ne!(ds.view(0), clean.view(0));
    let out = mvcs(
        &[
            "corrupt",
            "data/manifest.json",
            "--views",
            "4",
            "--mode",
            "con",
            "--out-dir",
            "o2",
        ],
        tmp.path(),
    );
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn out_flag_writes_the_same_bytes_as_stdout() {
    let tmp = tempfile::tempdir().unwrap();
    synth(tmp.path());
    let printed = mvcs(&["hopkins", "data/manifest.json", "--m", "20"], tmp.path());
    let written = mvcs(
        &[
            "hopkins",
            "data/manifest.json",
            "--m",
            "20",
            "--out",
            "h.json",
        ],
        tmp.path(),
    );
    assert!(written.status.success() && written.stdout.is_empty());
    assert_eq!(
        std::fs::read(tmp.path().join("h.json")).unwrap(),
        printed.stdout
    );
}

#[test]
fn help_documents_every_config_default() {
    let tmp = tempfile::tempdir().unwrap();
    for sub in ["score", "detect", "profile"] {
        let out = mvcs(&[sub, "--help"], tmp.path());
        assert!(out.status.success());
        let text = String::from_utf8_lossy(&out.stdout);
        for (flag, default) in [
            ("--tau", "[default: 1]"),
            ("--k", "[default: 10]"),
            ("--alpha", "[default: 0.2]"),
            ("--beta", "[default: 0.2]"),
            ("--gamma", "[default: 0.6]"),
            ("--eta", "[default: 0.5]"),
            ("--grid-points", "[default: 1024]"),
            ("--tol", "[default: 0.001]"),
            ("--seed", "[default: 0]"),
        ] {
            let line = text
                .lines()
                .find(|l| l.trim_start().starts_with(flag))
                .unwrap_or_else(|| panic!("{sub}: no {flag}"));
            assert!(line.contains(default), "{sub}: {line}");
        }
    }
}

#[test]
fn thread_cap_does_not_change_output() {
    let tmp = tempfile::tempdir().unwrap();
    synth(tmp.path());
    let default = mvcs(&["detect", "data/manifest.json"], tmp.path());
    let single = Command::new(env!("CARGO_BIN_EXE_mvcs"))
        .args(["detect", "data/manifest.json"])
        .current_dir(tmp.path())
        .env("MVCS_THREADS", "1")
        .output()
        .unwrap();
    assert_eq!(default.stdout, single.stdout);
    let bad = Command::new(env!("CARGO_BIN_EXE_mvcs"))
        .args(["detect", "data/manifest.json"])
        .current_dir(tmp.path())
        .env("MVCS_THREADS", "0")
        .output()
        .unwrap();
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn profile_without_labels_skips_conflict_noise() {
    let tmp = tempfile::tempdir().unwrap();
    synth(tmp.path());
    let manifest = tmp.path().join("data/manifest.json");
    let mut m: Value = serde_json::from_str(&std::fs::read_to_string(&manifest).unwrap()).unwrap();
    m.as_object_mut().unwrap().remove("labels");
    std::fs::write(&manifest, serde_json::to_string(&m).unwrap()).unwrap();
    let v = stdout_json(&mvcs(&["profile", "data/manifest.json"], tmp.path()));
    assert_eq!(v["con_skipped"], true);
    assert!(v["views"]
        .as_array()
        .unwrap()
        .iter()
        .all(|r| r["con"].is_null()));
}
