//! Black-box tests of the `oamsim` binary: subcommands, exit codes, and
//! on-disk artifacts.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn oamsim(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_oamsim"))
        .args(args)
        .current_dir(dir)
        .env_remove("OAMSIM_OUT")
        .output()
        .expect("binary runs")
}

fn golden_path(name: &str) -> String {
    format!("{}/../../configs/{name}.json", env!("CARGO_MANIFEST_DIR"))
}

#[test]
fn version_prints_the_toolkit_version() {
    let tmp = tempfile::tempdir().unwrap();
    let out = oamsim(&["version"], tmp.path());
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.trim(), format!("oamsim {}", env!("CARGO_PKG_VERSION")));
}

#[test]
fn list_scenarios_names_all_eight() {
    let tmp = tempfile::tempdir().unwrap();
    let out = oamsim(&["list-scenarios"], tmp.path());
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    for name in [
        "qubit-tomography",
        "hybrid-fringes",
        "hybrid-tomography",
        "hybrid-witness",
        "oam-fringes",
        "oam-chsh",
        "efficiency-budget",
        "mode-capacity",
    ] {
        assert!(text.contains(name), "missing {name} in:\n{text}");
    }
}

#[test]
fn validate_accepts_golden_configs() {
    let tmp = tempfile::tempdir().unwrap();
    let out = oamsim(&["validate", &golden_path("oam_chsh")], tmp.path());
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn validate_rejects_bad_configs_with_exit_one() {
    let tmp = tempfile::tempdir().unwrap();
    let bad = tmp.path().join("bad.json");
    std::fs::write(
        &bad,
        r#"{"scenario": "oam-chsh", "seed": 1, "mode": "sampled", "pair_rate": -3.0}"#,
    )
    .unwrap();
    let out = oamsim(&["validate", bad.to_str().unwrap()], tmp.path());
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("pair_rate"), "stderr: {err}");
    assert!(err.contains("duration_s"), "stderr: {err}");

    let typo = tmp.path().join("typo.json");
    std::fs::write(
        &typo,
        r#"{"scenario": "mode-capacity", "beem": {}, "seed": 1, "mode": "analytic"}"#,
    )
    .unwrap();
    let out = oamsim(&["validate", typo.to_str().unwrap()], tmp.path());
    assert_eq!(out.status.code(), Some(1), "unknown keys must be rejected");
}

#[test]
fn missing_config_file_is_a_runtime_error() {
    let tmp = tempfile::tempdir().unwrap();
    let out = oamsim(&["run", "no_such_file.json"], tmp.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn run_writes_json_report_into_out_dir() {
    let tmp = tempfile::tempdir().unwrap();
    let out_dir = tmp.path().join("results");
    let out = oamsim(
        &[
            "run",
            &golden_path("mode_capacity"),
            "--out",
            out_dir.to_str().unwrap(),
        ],
        tmp.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("report.json")).unwrap())
            .unwrap();
    assert_eq!(report["scenario"], "mode-capacity");
    assert_eq!(report["metrics"][0]["name"], "mode_count");
    assert_eq!(report["metrics"][0]["raw"]["value"], 49.0);
}

#[test]
fn run_emits_csv_files_on_request() {
    let tmp = tempfile::tempdir().unwrap();
    let out = oamsim(
        &[
            "run",
            &golden_path("efficiency_budget"),
            "--format",
            "csv",
            "--out",
            tmp.path().to_str().unwrap(),
        ],
        tmp.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    let metrics = std::fs::read_to_string(tmp.path().join("metrics.csv")).unwrap();
    assert!(metrics.starts_with("metric,raw_value,raw_sigma,net_value,net_sigma\n"));
    assert!(metrics.contains("signal_chain_efficiency"));
    assert!(metrics.contains("spectral_acceptance,0.2,0,0.2,0"));
}

#[test]
fn seed_and_mode_flags_override_the_config() {
    let tmp = tempfile::tempdir().unwrap();
    let dir_a = tmp.path().join("a");
    let dir_b = tmp.path().join("b");
    let dir_c = tmp.path().join("c");
    for (dir, seed) in [(&dir_a, "1"), (&dir_b, "1"), (&dir_c, "2")] {
        let out = oamsim(
            &[
                "run",
                &golden_path("oam_chsh"),
                "--seed",
                seed,
                "--out",
                dir.to_str().unwrap(),
            ],
            tmp.path(),
        );
        assert_eq!(out.status.code(), Some(0));
    }
    let read = |dir: &PathBuf| std::fs::read_to_string(dir.join("report.json")).unwrap();
    let strip = |text: &str| -> String {
        text.lines()
            .filter(|l| !l.contains("timestamp_unix"))
            .collect::<Vec<_>>()
            .join("\n")
    };
    assert_eq!(
        strip(&read(&dir_a)),
        strip(&read(&dir_b)),
        "same seed, same bytes"
    );
    assert_ne!(
        strip(&read(&dir_a)),
        strip(&read(&dir_c)),
        "different seed, different draws"
    );

    let analytic_dir = tmp.path().join("analytic");
    let out = oamsim(
        &[
            "run",
            &golden_path("oam_chsh"),
            "--mode",
            "analytic",
            "--out",
            analytic_dir.to_str().unwrap(),
        ],
        tmp.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    let report: serde_json::Value = serde_json::from_str(&read(&analytic_dir)).unwrap();
    assert_eq!(report["mode"], "analytic");
    assert_eq!(report["metrics"][0]["raw"]["sigma"], 0.0);
}
