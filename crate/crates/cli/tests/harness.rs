//! Scenario-harness integration tests over the shipped golden configs.

use approx::assert_abs_diff_eq;
use oamsim_cli::config::{ExperimentConfig, Mode, NoiseConfig, Scenario, StateSpec};
use oamsim_cli::report::{emit_csv, emit_json, parse_json};
use oamsim_cli::scenario::run_scenario;
use oamsim_cli::CliError;

fn golden(name: &str) -> ExperimentConfig {
    let path = format!("{}/../../configs/{name}.json", env!("CARGO_MANIFEST_DIR"));
    let text = std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("read {path}: {e}"));
    ExperimentConfig::from_json(&text).unwrap_or_else(|e| panic!("parse {path}: {e}"))
}

const GOLDEN: [&str; 8] = [
    "qubit_tomography",
    "hybrid_fringes",
    "hybrid_tomography",
    "hybrid_witness",
    "oam_fringes",
    "oam_chsh",
    "efficiency_budget",
    "mode_capacity",
];

#[test]
fn every_scenario_has_a_valid_golden_config_that_runs() {
    let mut seen = Vec::new();
    for name in GOLDEN {
        let mut cfg = golden(name);
        cfg.validate().unwrap_or_else(|e| panic!("{name}: {e}"));
        // Keep the matrix of runs fast; sampled statistics are exercised in
        // the acceptance suite.
        if cfg.scenario == Scenario::HybridTomography {
            cfg.mode = Mode::Analytic;
        }
        let report = run_scenario(&cfg).unwrap_or_else(|e| panic!("{name}: {e}"));
        assert!(!report.metrics.is_empty(), "{name}: no metrics");
        assert_eq!(report.scenario, cfg.scenario);
        assert_eq!(report.seed, cfg.seed);
        // Every reported density matrix satisfies the state invariants.
        for dm in &report.density_matrices {
            dm.to_density()
                .unwrap_or_else(|e| panic!("{name}/{}: {e}", dm.label));
        }
        seen.push(cfg.scenario);
    }
    for scenario in Scenario::all() {
        assert!(seen.contains(&scenario), "no golden config for {scenario}");
    }
}

#[test]
fn json_report_round_trips_exactly() {
    let cfg = golden("hybrid_witness");
    let report = run_scenario(&cfg).unwrap();
    let parsed = parse_json(&emit_json(&report)).unwrap();
    assert_eq!(parsed, report);
}

#[test]
fn reports_are_deterministic_for_a_fixed_seed() {
    for name in ["oam_chsh", "hybrid_fringes", "qubit_tomography"] {
        let cfg = golden(name);
        let a = run_scenario(&cfg).unwrap().strip_timestamp();
        let b = run_scenario(&cfg).unwrap().strip_timestamp();
        assert_eq!(emit_json(&a), emit_json(&b), "{name} not reproducible");
    }
}

#[test]
fn different_seeds_draw_different_counts() {
    let mut cfg = golden("oam_chsh");
    let a = run_scenario(&cfg).unwrap();
    cfg.seed += 1;
    let b = run_scenario(&cfg).unwrap();
    let counts = |r: &oamsim_cli::ResultsReport| -> Vec<Option<u64>> {
        r.records.iter().map(|rec| rec.sampled).collect()
    };
    assert_ne!(counts(&a), counts(&b));
}

#[test]
fn noiseless_analytic_qubit_tomography_reconstructs_exactly() {
    let cfg = ExperimentConfig {
        scenario: Scenario::QubitTomography,
        description: None,
        state: None,
        states: Some(vec![StateSpec::Named("R".into())]),
        noise: NoiseConfig::default(),
        werner_v_overrides: None,
        pair_rate: Some(200.0),
        duration_s: Some(100.0),
        conversion_eta: None,
        angles: None,
        fixed_angles: None,
        chsh: None,
        stages_signal: None,
        stages_idler: None,
        spectral: None,
        beam: None,
        resamples: None,
        seed: 1,
        mode: Mode::Analytic,
    };
    let report = run_scenario(&cfg).unwrap();
    let row = &report.fidelity_table[0];
    assert!(row.raw_fidelity > 0.9999, "raw {}", row.raw_fidelity);
    assert!(row.net_fidelity > 0.9999, "net {}", row.net_fidelity);
    assert_eq!(row.raw_sigma, 0.0);
    assert_eq!(row.net_sigma, 0.0);
}

#[test]
fn analytic_witness_matches_sampled_means_within_three_sigma() {
    // Self-consistency of the sampler: the analytic metric sits inside the
    // spread of the sampled-mode estimates.
    let mut cfg = golden("hybrid_witness");
    cfg.mode = Mode::Analytic;
    let analytic = run_scenario(&cfg).unwrap();
    let w_analytic = analytic.metric("witness").unwrap().net.value;
    assert_abs_diff_eq!(w_analytic, 1.805, epsilon = 1e-9);

    cfg.mode = Mode::Sampled;
    let mut values = Vec::new();
    let mut sigmas = Vec::new();
    for seed in 0..20 {
        cfg.seed = seed;
        let report = run_scenario(&cfg).unwrap();
        let m = report.metric("witness").unwrap().net;
        values.push(m.value);
        sigmas.push(m.sigma);
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let mean_sigma = sigmas.iter().sum::<f64>() / n;
    let sem = mean_sigma / n.sqrt();
    assert!(
        (mean - w_analytic).abs() <= 3.0 * sem,
        "sampled mean {mean} vs analytic {w_analytic} (3·SEM = {})",
        3.0 * sem
    );
}

#[test]
fn validation_collects_every_problem() {
    let text = r#"{
        "scenario": "oam-fringes",
        "noise": {"werner_v": 1.4},
        "seed": 1,
        "mode": "sampled"
    }"#;
    let cfg = ExperimentConfig::from_json(text).unwrap();
    let Err(CliError::Validation(errors)) = cfg.validate() else {
        panic!("expected validation failure");
    };
    // Missing pair_rate, duration_s, angles, fixed_angles, plus the bad noise.
    assert!(errors.len() >= 5, "got {errors:?}");
    assert_eq!(cfg.validate().map_err(|e| e.exit_code()), Err(1));
}

#[test]
fn unknown_config_keys_are_rejected() {
    let text = r#"{
        "scenario": "mode-capacity",
        "beam": {"w0_um": 20.0, "w_max_um": 100.0},
        "sedd": 1,
        "seed": 1,
        "mode": "analytic"
    }"#;
    assert!(matches!(
        ExperimentConfig::from_json(text),
        Err(CliError::Validation(_))
    ));
}

#[test]
fn csv_sections_match_documented_headers() {
    let mut cfg = golden("hybrid_fringes");
    cfg.mode = Mode::Analytic;
    let report = run_scenario(&cfg).unwrap();
    let files = emit_csv(&report);
    let get = |name: &str| -> &str {
        files
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, c)| c.as_str())
            .unwrap_or_else(|| panic!("missing {name}: have {:?}", files.iter().map(|f| &f.0)))
    };
    assert!(get("metrics.csv").starts_with("metric,raw_value,raw_sigma,net_value,net_sigma\n"));
    assert!(
        get("fringe_idler_d.csv").starts_with("theta_rad,expected,sampled,accidental,duration_s\n")
    );
    assert!(get("records.csv")
        .starts_with("side_a,side_b,duration_s,expected,sampled,accidental,net,clamped\n"));

    let mut qt = golden("qubit_tomography");
    qt.mode = Mode::Analytic;
    let report = run_scenario(&qt).unwrap();
    let files = emit_csv(&report);
    let fid = files
        .iter()
        .find(|(n, _)| n == "fidelities.csv")
        .expect("fidelities.csv");
    assert!(fid
        .1
        .starts_with("state,raw_fidelity,raw_sigma,net_fidelity,net_sigma\n"));
    // One row per prepared state, matching the published table shape.
    assert_eq!(fid.1.lines().count(), 1 + 4);
    let counts = files
        .iter()
        .find(|(n, _)| n == "tomography_counts.csv")
        .expect("counts csv");
    assert!(counts.1.starts_with("label,side_a,side_b,raw,net\n"));
}

#[test]
fn conversion_eta_scales_expected_counts() {
    let mut cfg = golden("oam_chsh");
    cfg.mode = Mode::Analytic;
    cfg.noise = NoiseConfig::default();
    let full = run_scenario(&cfg).unwrap();
    cfg.conversion_eta = Some(0.5);
    let half = run_scenario(&cfg).unwrap();
    for (a, b) in full.records.iter().zip(&half.records) {
        assert_abs_diff_eq!(a.expected * 0.5, b.expected, epsilon = 1e-9);
    }
    // The post-selected correlations are unchanged by the loss.
    assert_abs_diff_eq!(
        full.metric("chsh_s_abs").unwrap().net.value,
        half.metric("chsh_s_abs").unwrap().net.value,
        epsilon = 1e-9
    );
}
