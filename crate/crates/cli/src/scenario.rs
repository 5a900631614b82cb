//! Scenario orchestration: prepare → convert → measure → reconstruct → analyze.
//!
//! Every scenario follows the same discipline: all probabilities come from
//! the core physics modules, every Poisson draw uses the record sub-stream
//! `(seed, Record, k)` with `k` assigned in deterministic construction order,
//! and every bootstrap metric owns a dedicated stream block. Two runs of the
//! same config and seed therefore produce identical reports (timestamp
//! aside). Raw metrics are computed from counts that include the accidental
//! background; net metrics from counts with the background estimate
//! subtracted.

use std::time::{SystemTime, UNIX_EPOCH};

use oamsim_core::analysis::{
    chsh_s_from_counts, fit_fringe, poisson_error_at, witness, ChshCounts, FringeFit, FringeScan,
    MetricWithError,
};
use oamsim_core::conversion::{
    efficiency_budget, spectral_acceptance, EfficiencyStage, SpectralWindows,
};
use oamsim_core::linalg::{fidelity, DensityMatrix, Ket};
use oamsim_core::measurement::{
    accidental_coincidences, expected_counts, noisy_coincidence_probability,
    noisy_projection_probability, sample_counts, subtract_background, MeasurementSetting,
    NoiseModel, ProjectorSpec,
};
use oamsim_core::states::{bell_state, BasisLabel, BeamGeometry, BellKind};
use oamsim_core::tomography::{
    hybrid_tomography_settings, qubit_mle_with, standard_qubit_basis, two_qubit_mle_with,
    MleOptions, QubitCounts, TwoQubitCounts,
};

use crate::config::{ExperimentConfig, Mode, Scenario, StateSpec};
use crate::error::CliError;
use crate::report::{
    spec_label, DensityMatrixReport, FidelityRow, FringePoint, FringeSection, MetricEntry,
    MetricValue, RecordReport, ResultsReport, TomographyCountRow,
};

/// Runs one scenario end to end.
pub fn run_scenario(cfg: &ExperimentConfig) -> Result<ResultsReport, CliError> {
    cfg.validate()?;
    let mut run = Run::new(cfg)?;
    match cfg.scenario {
        Scenario::QubitTomography => qubit_tomography(&mut run)?,
        Scenario::HybridFringes => hybrid_fringes(&mut run, false)?,
        Scenario::HybridWitness => hybrid_fringes(&mut run, true)?,
        Scenario::HybridTomography => hybrid_tomography(&mut run)?,
        Scenario::OamFringes => oam_fringes(&mut run)?,
        Scenario::OamChsh => oam_chsh(&mut run)?,
        Scenario::EfficiencyBudget => efficiency_budget_scenario(&mut run)?,
        Scenario::ModeCapacity => mode_capacity_scenario(&mut run)?,
    }
    Ok(run.into_report())
}

/// One observed setting, in both raw and net views.
struct Observation {
    expected: f64,
    sampled: Option<u64>,
    accidental: f64,
    raw: f64,
    net: f64,
}

struct Run {
    cfg: ExperimentConfig,
    noise: NoiseModel,
    mode: Mode,
    seed: u64,
    next_record: u64,
    next_bootstrap_block: u64,
    metrics: Vec<MetricEntry>,
    density_matrices: Vec<DensityMatrixReport>,
    fringes: Vec<FringeSection>,
    fidelity_table: Vec<FidelityRow>,
    tomography_counts: Vec<TomographyCountRow>,
    records: Vec<RecordReport>,
    notes: Vec<String>,
}

impl Run {
    fn new(cfg: &ExperimentConfig) -> Result<Self, CliError> {
        let noise = cfg
            .noise
            .to_model()
            .map_err(|e| CliError::Validation(vec![e]))?;
        Ok(Self {
            cfg: cfg.clone(),
            noise,
            mode: cfg.mode,
            seed: cfg.seed,
            next_record: 0,
            next_bootstrap_block: 0,
            metrics: Vec::new(),
            density_matrices: Vec::new(),
            fringes: Vec::new(),
            fidelity_table: Vec::new(),
            tomography_counts: Vec::new(),
            records: Vec::new(),
            notes: Vec::new(),
        })
    }

    fn rate(&self) -> f64 {
        self.cfg.pair_rate.unwrap_or(0.0) * self.cfg.conversion_eta()
    }

    fn duration(&self) -> f64 {
        self.cfg.duration_s.unwrap_or(0.0)
    }

    fn mle_options(&self) -> MleOptions {
        MleOptions {
            seed: self.seed,
            ..MleOptions::default()
        }
    }

    /// Werner visibility for scan/state `index`, honoring overrides.
    fn werner_for(&self, index: usize) -> f64 {
        self.cfg
            .werner_v_overrides
            .as_ref()
            .and_then(|o| o.get(index).copied())
            .unwrap_or(self.noise.werner_v())
    }

    fn noise_for(&self, index: usize) -> Result<NoiseModel, CliError> {
        self.noise
            .with_werner_v(self.werner_for(index))
            .map_err(|e| CliError::Validation(vec![e.to_string()]))
    }

    /// Simulates one acquisition and logs its record.
    fn observe(
        &mut self,
        side_a: &ProjectorSpec,
        side_b: Option<&ProjectorSpec>,
        probability: f64,
        noise: &NoiseModel,
    ) -> Observation {
        let duration = self.duration();
        let expected_signal = expected_counts(probability, self.rate(), duration);
        let accidental = accidental_coincidences(noise, duration);
        let expected = expected_signal + accidental;
        let (sampled, raw, net, clamped) = match self.mode {
            Mode::Analytic => (None, expected, expected_signal, false),
            Mode::Sampled => {
                let draw = sample_counts(expected, self.seed, self.next_record);
                let (net, clamped) = subtract_background(draw, accidental);
                (Some(draw), draw as f64, net, clamped)
            }
        };
        self.next_record += 1;
        if clamped {
            self.notes.push(format!(
                "background subtraction clamped to zero at record {}",
                self.next_record - 1
            ));
        }
        self.records.push(RecordReport {
            side_a: spec_label(side_a),
            side_b: side_b.map(spec_label),
            duration_s: duration,
            expected,
            sampled,
            accidental,
            net,
            clamped,
        });
        Observation {
            expected,
            sampled,
            accidental,
            raw,
            net,
        }
    }

    /// Bootstrap error bar in sampled mode, exact value in analytic mode.
    fn error_bar<F>(
        &mut self,
        value: f64,
        metric: F,
        counts: &[u64],
    ) -> Result<MetricValue, CliError>
    where
        F: Fn(&[u64]) -> oamsim_core::Result<f64>,
    {
        match self.mode {
            Mode::Analytic => Ok(MetricWithError::exact(value).into()),
            Mode::Sampled => {
                let block = self.next_bootstrap_block;
                self.next_bootstrap_block += 1;
                let got = poisson_error_at(metric, counts, self.cfg.resamples(), self.seed, block)
                    .map_err(|e| CliError::Runtime(e.to_string()))?;
                Ok(MetricValue {
                    value,
                    sigma: got.sigma,
                    resamples: got.resamples,
                })
            }
        }
    }

    fn push_metric(&mut self, name: &str, raw: MetricValue, net: MetricValue) {
        self.metrics.push(MetricEntry {
            name: name.to_string(),
            raw,
            net,
        });
    }

    fn push_exact_metric(&mut self, name: &str, value: f64) {
        let v = MetricValue {
            value,
            sigma: 0.0,
            resamples: 0,
        };
        self.push_metric(name, v, v);
    }

    fn into_report(self) -> ResultsReport {
        let timestamp_unix = SystemTime::now()
            .duration_since(UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        ResultsReport {
            toolkit_version: env!("CARGO_PKG_VERSION").to_string(),
            scenario: self.cfg.scenario,
            seed: self.seed,
            mode: self.mode,
            timestamp_unix,
            config: self.cfg,
            metrics: self.metrics,
            density_matrices: self.density_matrices,
            fringes: self.fringes,
            fidelity_table: self.fidelity_table,
            tomography_counts: self.tomography_counts,
            records: self.records,
            notes: self.notes,
        }
    }
}

fn round_counts(values: &[f64]) -> Vec<u64> {
    values.iter().map(|&v| v.max(0.0).round() as u64).collect()
}

fn runtime(e: impl std::fmt::Display) -> CliError {
    CliError::Runtime(e.to_string())
}

// --- qubit tomography ------------------------------------------------------

fn qubit_tomography(run: &mut Run) -> Result<(), CliError> {
    let states = run.cfg.states.clone().expect("validated");
    let basis = standard_qubit_basis();
    let opts = run.mle_options();

    for (state_index, spec) in states.iter().enumerate() {
        let label = spec.label();
        let ideal = spec.resolve().map_err(|e| CliError::Validation(vec![e]))?;
        let rho = ideal.density();
        let noise = run.noise_for(state_index)?;

        let mut raw = [0.0f64; 4];
        let mut net = [0.0f64; 4];
        let mut accidental = 0.0;
        for (j, projector) in basis.iter().enumerate() {
            let p = noisy_projection_probability(&rho, projector, &noise).map_err(runtime)?;
            let obs = run.observe(projector, None, p, &noise);
            raw[j] = obs.raw;
            net[j] = obs.net;
            accidental = obs.accidental;
            run.tomography_counts.push(TomographyCountRow {
                label: label.clone(),
                side_a: spec_label(projector),
                side_b: None,
                raw: obs.raw,
                net: obs.net,
            });
        }

        let raw_counts: [u64; 4] = round_counts(&raw).try_into().expect("length 4");
        let net_counts: [u64; 4] = round_counts(&net).try_into().expect("length 4");

        let raw_mle = qubit_mle_with(&QubitCounts::standard(raw_counts).map_err(runtime)?, &opts)
            .map_err(runtime)?;
        let net_mle = qubit_mle_with(&QubitCounts::standard(net_counts).map_err(runtime)?, &opts)
            .map_err(runtime)?;
        let raw_fidelity = fidelity(&raw_mle.rho, &ideal).map_err(runtime)?;
        let net_fidelity = fidelity(&net_mle.rho, &ideal).map_err(runtime)?;

        let ideal_for_metric = ideal.clone();
        let raw_metric = move |counts: &[u64]| -> oamsim_core::Result<f64> {
            let counts: [u64; 4] = counts.try_into().expect("length 4");
            let mle = qubit_mle_with(&QubitCounts::standard(counts)?, &opts)?;
            fidelity(&mle.rho, &ideal_for_metric)
        };
        let raw_value = run.error_bar(raw_fidelity, raw_metric, &raw_counts)?;

        let ideal_for_metric = ideal.clone();
        let net_metric = move |counts: &[u64]| -> oamsim_core::Result<f64> {
            let mut subtracted = [0u64; 4];
            for (slot, &c) in subtracted.iter_mut().zip(counts) {
                let (value, _) = subtract_background(c, accidental);
                *slot = value.round() as u64;
            }
            let mle = qubit_mle_with(&QubitCounts::standard(subtracted)?, &opts)?;
            fidelity(&mle.rho, &ideal_for_metric)
        };
        let net_value = run.error_bar(net_fidelity, net_metric, &raw_counts)?;

        run.push_metric(&format!("fidelity_{label}"), raw_value, net_value);
        run.fidelity_table.push(FidelityRow {
            state: label.clone(),
            raw_fidelity: raw_value.value,
            raw_sigma: raw_value.sigma,
            net_fidelity: net_value.value,
            net_sigma: net_value.sigma,
        });
        run.density_matrices.push(DensityMatrixReport::from_density(
            format!("{label}_raw"),
            &raw_mle.rho,
        ));
        run.density_matrices.push(DensityMatrixReport::from_density(
            format!("{label}_net"),
            &net_mle.rho,
        ));
    }
    Ok(())
}

// --- fringe scans -----------------------------------------------------------

struct ScanResult {
    raw_counts: Vec<u64>,
    raw_fit: FringeFit,
    net_fit: FringeFit,
    accidental: f64,
}

fn run_scan(
    run: &mut Run,
    label: &str,
    fixed: &ProjectorSpec,
    rho: &DensityMatrix,
    scan_index: usize,
) -> Result<ScanResult, CliError> {
    let angles = run.cfg.angles.clone().expect("validated");
    let noise = run.noise_for(scan_index)?;
    let mut points = Vec::with_capacity(angles.len());
    let mut raw = Vec::with_capacity(angles.len());
    let mut net = Vec::with_capacity(angles.len());
    let mut accidental = 0.0;
    for &theta in &angles {
        let scanned = ProjectorSpec::Theta(theta);
        let setting = MeasurementSetting::new(*fixed, scanned);
        let p = noisy_coincidence_probability(rho, &setting, &noise).map_err(runtime)?;
        let obs = run.observe(fixed, Some(&scanned), p, &noise);
        points.push(FringePoint {
            theta_rad: theta,
            expected: obs.expected,
            sampled: obs.sampled,
            accidental: obs.accidental,
        });
        raw.push(obs.raw);
        net.push(obs.net);
        accidental = obs.accidental;
    }
    let duration = run.duration();
    let raw_fit =
        fit_fringe(&FringeScan::new(angles.clone(), raw.clone(), duration).map_err(runtime)?)
            .map_err(runtime)?;
    let net_fit =
        fit_fringe(&FringeScan::new(angles, net, duration).map_err(runtime)?).map_err(runtime)?;

    run.fringes.push(FringeSection {
        label: label.to_string(),
        fixed: spec_label(fixed),
        duration_s: duration,
        points,
        raw_fit: raw_fit.into(),
        net_fit: net_fit.into(),
    });
    Ok(ScanResult {
        raw_counts: round_counts(&raw),
        raw_fit,
        net_fit,
        accidental,
    })
}

/// Bootstrap metric: fitted visibility of a fringe scan, optionally after
/// background subtraction.
fn visibility_metric(
    angles: Vec<f64>,
    duration: f64,
    subtract: Option<f64>,
) -> impl Fn(&[u64]) -> oamsim_core::Result<f64> {
    move |counts: &[u64]| {
        let counts: Vec<f64> = match subtract {
            None => counts.iter().map(|&c| c as f64).collect(),
            Some(acc) => counts
                .iter()
                .map(|&c| subtract_background(c, acc).0)
                .collect(),
        };
        let fit = fit_fringe(&FringeScan::new(angles.clone(), counts, duration)?)?;
        Ok(fit.visibility)
    }
}

fn hybrid_fringes(run: &mut Run, with_witness: bool) -> Result<(), CliError> {
    let ideal = resolve_pair_state(run, BellKind::HybridPlus)?;
    let rho = ideal.density();
    let scans = [
        ("idler_d", ProjectorSpec::Basis(BasisLabel::PolD)),
        ("idler_r", ProjectorSpec::Basis(BasisLabel::PolR)),
    ];
    let angles = run.cfg.angles.clone().expect("validated");
    let duration = run.duration();

    let mut outcomes = Vec::new();
    for (index, (label, fixed)) in scans.iter().enumerate() {
        let scan = run_scan(run, label, fixed, &rho, index)?;
        let raw_value = run.error_bar(
            scan.raw_fit.visibility,
            visibility_metric(angles.clone(), duration, None),
            &scan.raw_counts,
        )?;
        let net_value = run.error_bar(
            scan.net_fit.visibility,
            visibility_metric(angles.clone(), duration, Some(scan.accidental)),
            &scan.raw_counts,
        )?;
        run.push_metric(&format!("visibility_{label}"), raw_value, net_value);
        outcomes.push(scan);
    }

    if with_witness {
        let w_raw = witness(
            outcomes[0].raw_fit.visibility,
            outcomes[1].raw_fit.visibility,
        );
        let w_net = witness(
            outcomes[0].net_fit.visibility,
            outcomes[1].net_fit.visibility,
        );
        let joined: Vec<u64> = outcomes[0]
            .raw_counts
            .iter()
            .chain(&outcomes[1].raw_counts)
            .copied()
            .collect();
        let points = angles.len();
        let witness_metric = |subtract: Option<(f64, f64)>| {
            let angles = angles.clone();
            move |counts: &[u64]| -> oamsim_core::Result<f64> {
                let (first, second) = counts.split_at(points);
                let fit = |counts: &[u64], acc: Option<f64>| -> oamsim_core::Result<f64> {
                    let metric = visibility_metric(angles.clone(), duration, acc);
                    metric(counts)
                };
                let (acc_a, acc_b) = match subtract {
                    None => (None, None),
                    Some((a, b)) => (Some(a), Some(b)),
                };
                Ok(witness(fit(first, acc_a)?, fit(second, acc_b)?))
            }
        };
        let raw_value = run.error_bar(w_raw, witness_metric(None), &joined)?;
        let net_value = run.error_bar(
            w_net,
            witness_metric(Some((outcomes[0].accidental, outcomes[1].accidental))),
            &joined,
        )?;
        run.push_metric("witness", raw_value, net_value);
    }
    Ok(())
}

fn oam_fringes(run: &mut Run) -> Result<(), CliError> {
    let ideal = resolve_pair_state(run, BellKind::OamMinus)?;
    let rho = ideal.density();
    let fixed_angles = run.cfg.fixed_angles.clone().expect("validated");
    let angles = run.cfg.angles.clone().expect("validated");
    let duration = run.duration();

    for (index, &fixed_angle) in fixed_angles.iter().enumerate() {
        let label = format!("theta_a_{fixed_angle:.6}");
        let fixed = ProjectorSpec::Theta(fixed_angle);
        let scan = run_scan(run, &label, &fixed, &rho, index)?;
        let raw_value = run.error_bar(
            scan.raw_fit.visibility,
            visibility_metric(angles.clone(), duration, None),
            &scan.raw_counts,
        )?;
        let net_value = run.error_bar(
            scan.net_fit.visibility,
            visibility_metric(angles.clone(), duration, Some(scan.accidental)),
            &scan.raw_counts,
        )?;
        run.push_metric(&format!("visibility_{label}"), raw_value, net_value);
    }
    Ok(())
}

// --- two-qubit tomography ---------------------------------------------------

fn hybrid_tomography(run: &mut Run) -> Result<(), CliError> {
    let ideal = resolve_pair_state(run, BellKind::HybridPlus)?;
    let rho = ideal.density();
    let settings = hybrid_tomography_settings();
    let noise = run.noise_for(0)?;
    let opts = run.mle_options();

    let mut raw = Vec::with_capacity(16);
    let mut net = Vec::with_capacity(16);
    let mut accidental = 0.0;
    for setting in &settings {
        let p = noisy_coincidence_probability(&rho, setting, &noise).map_err(runtime)?;
        let obs = run.observe(&setting.side_a, Some(&setting.side_b), p, &noise);
        raw.push(obs.raw);
        net.push(obs.net);
        accidental = obs.accidental;
        run.tomography_counts.push(TomographyCountRow {
            label: "hybrid".to_string(),
            side_a: spec_label(&setting.side_a),
            side_b: Some(spec_label(&setting.side_b)),
            raw: obs.raw,
            net: obs.net,
        });
    }

    let raw_counts = round_counts(&raw);
    let net_counts = round_counts(&net);
    let raw_mle = two_qubit_mle_with(
        &TwoQubitCounts::hybrid(raw_counts.clone()).map_err(runtime)?,
        &opts,
    )
    .map_err(runtime)?;
    let net_mle = two_qubit_mle_with(&TwoQubitCounts::hybrid(net_counts).map_err(runtime)?, &opts)
        .map_err(runtime)?;
    let raw_fidelity = fidelity(&raw_mle.rho, &ideal).map_err(runtime)?;
    let net_fidelity = fidelity(&net_mle.rho, &ideal).map_err(runtime)?;

    let ideal_for_metric = ideal.clone();
    let raw_metric = move |counts: &[u64]| -> oamsim_core::Result<f64> {
        let mle = two_qubit_mle_with(&TwoQubitCounts::hybrid(counts.to_vec())?, &opts)?;
        fidelity(&mle.rho, &ideal_for_metric)
    };
    let raw_value = run.error_bar(raw_fidelity, raw_metric, &raw_counts)?;

    let ideal_for_metric = ideal.clone();
    let net_metric = move |counts: &[u64]| -> oamsim_core::Result<f64> {
        let subtracted: Vec<u64> = counts
            .iter()
            .map(|&c| subtract_background(c, accidental).0.round() as u64)
            .collect();
        let mle = two_qubit_mle_with(&TwoQubitCounts::hybrid(subtracted)?, &opts)?;
        fidelity(&mle.rho, &ideal_for_metric)
    };
    let net_value = run.error_bar(net_fidelity, net_metric, &raw_counts)?;

    run.push_metric("fidelity", raw_value, net_value);
    run.density_matrices.push(DensityMatrixReport::from_density(
        "hybrid_raw",
        &raw_mle.rho,
    ));
    run.density_matrices.push(DensityMatrixReport::from_density(
        "hybrid_net",
        &net_mle.rho,
    ));
    Ok(())
}

// --- CHSH -------------------------------------------------------------------

/// The 16 CHSH analyzer settings: 4 correlation blocks in
/// `(A,B), (A,B′), (A′,B), (A′,B′)` order, each block shifted
/// `(0,0), (+π/2,+π/2), (+π/2,0), (0,+π/2)`.
fn chsh_settings_grid(chsh: &oamsim_core::analysis::ChshSettings) -> Vec<(f64, f64)> {
    use std::f64::consts::FRAC_PI_2;
    let mut grid = Vec::with_capacity(16);
    for (alpha, beta) in chsh.pairs() {
        for (da, db) in [
            (0.0, 0.0),
            (FRAC_PI_2, FRAC_PI_2),
            (FRAC_PI_2, 0.0),
            (0.0, FRAC_PI_2),
        ] {
            grid.push((alpha + da, beta + db));
        }
    }
    grid
}

fn blocks_from(flat: &[f64]) -> ChshCounts {
    let mut blocks = [[0.0f64; 4]; 4];
    for (k, &value) in flat.iter().enumerate() {
        blocks[k / 4][k % 4] = value;
    }
    blocks
}

fn oam_chsh(run: &mut Run) -> Result<(), CliError> {
    let ideal = resolve_pair_state(run, BellKind::OamMinus)?;
    let rho = ideal.density();
    let chsh = run
        .cfg
        .chsh
        .map(|c| c.to_settings())
        .unwrap_or_else(oamsim_core::analysis::ChshSettings::optimal);
    let noise = run.noise_for(0)?;
    let grid = chsh_settings_grid(&chsh);

    let mut raw = Vec::with_capacity(16);
    let mut net = Vec::with_capacity(16);
    let mut accidental = 0.0;
    for &(ta, tb) in &grid {
        let side_a = ProjectorSpec::Theta(ta);
        let side_b = ProjectorSpec::Theta(tb);
        let setting = MeasurementSetting::new(side_a, side_b);
        let p = noisy_coincidence_probability(&rho, &setting, &noise).map_err(runtime)?;
        let obs = run.observe(&side_a, Some(&side_b), p, &noise);
        raw.push(obs.raw);
        net.push(obs.net);
        accidental = obs.accidental;
    }

    let raw_blocks = blocks_from(&raw);
    let net_blocks = blocks_from(&net);
    let raw_s = chsh_s_from_counts(&raw_blocks).map_err(runtime)?;
    let net_s = chsh_s_from_counts(&net_blocks).map_err(runtime)?;

    let block_names = ["e_ab", "e_ab_prime", "e_a_prime_b", "e_a_prime_b_prime"];
    for (k, name) in block_names.iter().enumerate() {
        let raw_e = oamsim_core::analysis::correlation_e(&raw_blocks[k]).map_err(runtime)?;
        let net_e = oamsim_core::analysis::correlation_e(&net_blocks[k]).map_err(runtime)?;
        run.push_metric(
            name,
            MetricValue {
                value: raw_e,
                sigma: 0.0,
                resamples: 0,
            },
            MetricValue {
                value: net_e,
                sigma: 0.0,
                resamples: 0,
            },
        );
    }

    let raw_counts = round_counts(&raw);
    let s_metric = |subtract: Option<f64>| {
        move |counts: &[u64]| -> oamsim_core::Result<f64> {
            let values: Vec<f64> = match subtract {
                None => counts.iter().map(|&c| c as f64).collect(),
                Some(acc) => counts
                    .iter()
                    .map(|&c| subtract_background(c, acc).0)
                    .collect(),
            };
            Ok(chsh_s_from_counts(&blocks_from(&values))?.s)
        }
    };
    let raw_value = run.error_bar(raw_s.s, s_metric(None), &raw_counts)?;
    let net_value = run.error_bar(net_s.s, s_metric(Some(accidental)), &raw_counts)?;
    run.push_metric("chsh_s", raw_value, net_value);
    run.push_metric(
        "chsh_s_abs",
        MetricValue {
            value: raw_s.s_abs,
            sigma: raw_value.sigma,
            resamples: raw_value.resamples,
        },
        MetricValue {
            value: net_s.s_abs,
            sigma: net_value.sigma,
            resamples: net_value.resamples,
        },
    );
    Ok(())
}

// --- budgets and capacity ----------------------------------------------------

fn efficiency_budget_scenario(run: &mut Run) -> Result<(), CliError> {
    let chains = [
        ("signal_chain_efficiency", run.cfg.stages_signal.clone()),
        ("idler_chain_efficiency", run.cfg.stages_idler.clone()),
    ];
    for (name, stages) in chains {
        if let Some(stages) = stages {
            let stages: Vec<EfficiencyStage> = stages
                .iter()
                .map(|s| EfficiencyStage::new(s.name.clone(), s.eta))
                .collect::<oamsim_core::Result<_>>()
                .map_err(runtime)?;
            run.push_exact_metric(name, efficiency_budget(&stages));
        }
    }
    if let Some(sp) = run.cfg.spectral {
        let windows = SpectralWindows::new(sp.bw_source_nm, sp.bw_sfg_nm).map_err(runtime)?;
        run.push_exact_metric("spectral_acceptance", spectral_acceptance(&windows));
    }
    Ok(())
}

fn mode_capacity_scenario(run: &mut Run) -> Result<(), CliError> {
    let beam = run.cfg.beam.expect("validated");
    let geometry = BeamGeometry::new(beam.w0_um, beam.w_max_um).map_err(runtime)?;
    let count = oamsim_core::states::mode_capacity(&geometry);
    run.push_exact_metric("mode_count", count as f64);
    run.push_exact_metric("l_max", ((count - 1) / 2) as f64);
    Ok(())
}

// --- shared ------------------------------------------------------------------

fn resolve_pair_state(run: &Run, default: BellKind) -> Result<Ket, CliError> {
    match &run.cfg.state {
        None => Ok(bell_state(default)),
        Some(StateSpec::Named(name)) => StateSpec::Named(name.clone())
            .resolve()
            .map_err(|e| CliError::Validation(vec![e])),
        Some(other) => other.resolve().map_err(|e| CliError::Validation(vec![e])),
    }
}
