//! Scenario configuration: the JSON schema consumed by `oamsim run`.
//!
//! Unknown keys are rejected outright — a silently ignored typo in a scenario
//! file is the main reproducibility hazard. Scenario-specific required fields
//! are checked by [`ExperimentConfig::validate`], which reports every problem
//! at once rather than the first one.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use oamsim_core::analysis::ChshSettings;
use oamsim_core::linalg::Ket;
use oamsim_core::measurement::NoiseModel;
use oamsim_core::states::{bell_state, BasisLabel, BellKind, QubitSpec};

use crate::error::CliError;

/// The experiment reproduced by one run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scenario {
    /// Single-qubit preparation → conversion → four-basis tomography.
    QubitTomography,
    /// Hybrid-state coincidence fringes with the idler analyzed in d and r.
    HybridFringes,
    /// Full 16-setting reconstruction of the hybrid state.
    HybridTomography,
    /// The two-basis visibility witness on the hybrid state.
    HybridWitness,
    /// OAM Bell-state fringes at fixed first-arm mask angles.
    OamFringes,
    /// CHSH S measurement on the OAM Bell state.
    OamChsh,
    /// Multiplicative efficiency chains of the apparatus.
    EfficiencyBudget,
    /// OAM mode count supported by the beam geometry.
    ModeCapacity,
}

impl Scenario {
    /// All scenarios, for `list-scenarios`.
    pub fn all() -> [Scenario; 8] {
        [
            Scenario::QubitTomography,
            Scenario::HybridFringes,
            Scenario::HybridTomography,
            Scenario::HybridWitness,
            Scenario::OamFringes,
            Scenario::OamChsh,
            Scenario::EfficiencyBudget,
            Scenario::ModeCapacity,
        ]
    }

    /// The kebab-case name used in config files.
    pub fn name(&self) -> &'static str {
        match self {
            Scenario::QubitTomography => "qubit-tomography",
            Scenario::HybridFringes => "hybrid-fringes",
            Scenario::HybridTomography => "hybrid-tomography",
            Scenario::HybridWitness => "hybrid-witness",
            Scenario::OamFringes => "oam-fringes",
            Scenario::OamChsh => "oam-chsh",
            Scenario::EfficiencyBudget => "efficiency-budget",
            Scenario::ModeCapacity => "mode-capacity",
        }
    }

    /// One-line description for `list-scenarios`.
    pub fn blurb(&self) -> &'static str {
        match self {
            Scenario::QubitTomography => {
                "prepare OAM qubits, up-convert, reconstruct each by four-basis MLE tomography"
            }
            Scenario::HybridFringes => {
                "hybrid-state coincidence fringes vs. mask angle, idler analyzed in |d⟩ and |r⟩"
            }
            Scenario::HybridTomography => {
                "16-setting two-qubit MLE reconstruction of the hybrid entangled state"
            }
            Scenario::HybridWitness => {
                "entanglement witness W = V_d/a + V_r/l from the two fringe visibilities"
            }
            Scenario::OamFringes => {
                "OAM Bell-state fringes vs. second-arm mask angle at fixed first-arm angles"
            }
            Scenario::OamChsh => "CHSH S parameter of the OAM Bell state at four analyzer angles",
            Scenario::EfficiencyBudget => {
                "multiplicative photon-efficiency chains and spectral acceptance"
            }
            Scenario::ModeCapacity => "OAM mode count supported by a beam geometry",
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scenario {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Scenario::all()
            .into_iter()
            .find(|sc| sc.name() == s)
            .ok_or_else(|| format!("unknown scenario `{s}`"))
    }
}

/// Whether counts are Poisson-sampled or carried as exact expectations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    /// Exact expectation-driven metrics, σ = 0.
    Analytic,
    /// Poisson-sampled counts with bootstrap error bars.
    Sampled,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Analytic => "analytic",
            Mode::Sampled => "sampled",
        })
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "analytic" => Ok(Mode::Analytic),
            "sampled" => Ok(Mode::Sampled),
            other => Err(format!(
                "unknown mode `{other}` (expected analytic|sampled)"
            )),
        }
    }
}

/// A prepared state: a named basis/Bell state or explicit qubit amplitudes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum StateSpec {
    /// One of `R/L/H/V/D/A`, `h/v/d/a/r/l`, or a Bell kind like `oam-minus`.
    Named(String),
    /// Explicit OAM-qubit amplitudes `α|R⟩ + β|L⟩`.
    Amplitudes {
        /// Re α.
        alpha_re: f64,
        /// Im α.
        #[serde(default)]
        alpha_im: f64,
        /// Re β.
        beta_re: f64,
        /// Im β.
        #[serde(default)]
        beta_im: f64,
        /// Topological charge (metadata; defaults to 1).
        #[serde(default = "default_charge")]
        l: i32,
    },
}

fn default_charge() -> i32 {
    1
}

impl StateSpec {
    /// Resolves to a ket (dimension 2 for qubit specs, 4 for Bell kinds).
    pub fn resolve(&self) -> Result<Ket, String> {
        match self {
            StateSpec::Named(name) => {
                if let Ok(label) = name.parse::<BasisLabel>() {
                    return Ok(label.ket());
                }
                if let Ok(kind) = name.parse::<BellKind>() {
                    return Ok(bell_state(kind));
                }
                Err(format!("unknown state name `{name}`"))
            }
            StateSpec::Amplitudes {
                alpha_re,
                alpha_im,
                beta_re,
                beta_im,
                l,
            } => {
                let spec = QubitSpec::with_charge(
                    oamsim_core::Complex64::new(*alpha_re, *alpha_im),
                    oamsim_core::Complex64::new(*beta_re, *beta_im),
                    *l,
                )
                .map_err(|e| e.to_string())?;
                Ok(oamsim_core::states::make_qubit(&spec))
            }
        }
    }

    /// Display label used in reports.
    pub fn label(&self) -> String {
        match self {
            StateSpec::Named(name) => name.clone(),
            StateSpec::Amplitudes {
                alpha_re,
                alpha_im,
                beta_re,
                beta_im,
                ..
            } => {
                format!("({alpha_re}{alpha_im:+}i)|R> + ({beta_re}{beta_im:+}i)|L>")
            }
        }
    }
}

/// Detector and preparation noise; all fields optional with quiet defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseConfig {
    /// Singles rate on the first arm, counts/s.
    #[serde(default)]
    pub singles_a: f64,
    /// Singles rate on the second arm, counts/s.
    #[serde(default)]
    pub singles_b: f64,
    /// Coincidence window in seconds.
    #[serde(default)]
    pub coincidence_window_s: f64,
    /// State-mixing visibility (1 = no mixing).
    #[serde(default = "default_werner_v")]
    pub werner_v: f64,
    /// Projector leak probability.
    #[serde(default)]
    pub crosstalk_eps: f64,
}

fn default_werner_v() -> f64 {
    1.0
}

impl Default for NoiseConfig {
    fn default() -> Self {
        Self {
            singles_a: 0.0,
            singles_b: 0.0,
            coincidence_window_s: 0.0,
            werner_v: 1.0,
            crosstalk_eps: 0.0,
        }
    }
}

impl NoiseConfig {
    /// Converts to the core noise model, validating ranges.
    pub fn to_model(&self) -> Result<NoiseModel, String> {
        NoiseModel::new(
            self.singles_a,
            self.singles_b,
            self.coincidence_window_s,
            self.werner_v,
            self.crosstalk_eps,
        )
        .map_err(|e| e.to_string())
    }
}

/// The four CHSH analyzer angles in radians.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChshConfig {
    /// θ_A.
    pub theta_a: f64,
    /// θ'_A.
    pub theta_a_prime: f64,
    /// θ_B.
    pub theta_b: f64,
    /// θ'_B.
    pub theta_b_prime: f64,
}

impl ChshConfig {
    /// The `|S|`-maximizing angle set for the OAM Bell states.
    pub fn optimal() -> Self {
        let s = ChshSettings::optimal();
        Self {
            theta_a: s.theta_a,
            theta_a_prime: s.theta_a_prime,
            theta_b: s.theta_b,
            theta_b_prime: s.theta_b_prime,
        }
    }

    /// Converts to the core settings type.
    pub fn to_settings(&self) -> ChshSettings {
        ChshSettings::new(
            self.theta_a,
            self.theta_a_prime,
            self.theta_b,
            self.theta_b_prime,
        )
    }
}

/// One stage of a multiplicative efficiency chain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StageConfig {
    /// Stage label.
    pub name: String,
    /// Transmittance / efficiency in [0, 1].
    pub eta: f64,
}

/// Source and acceptance bandwidths in nanometers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpectralConfig {
    /// Photon-source bandwidth, nm.
    pub bw_source_nm: f64,
    /// Crystal acceptance bandwidth, nm.
    pub bw_sfg_nm: f64,
}

/// Beam geometry in micrometers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BeamConfig {
    /// Gaussian beam waist, µm.
    pub w0_um: f64,
    /// Largest overlapped mode radius, µm.
    pub w_max_um: f64,
}

/// A complete scenario description. See `docs/configuration.md` for the
/// field-by-field schema and per-scenario requirements.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Which experiment to run.
    pub scenario: Scenario,
    /// Free-text description echoed into reports.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub description: Option<String>,
    /// Prepared state for two-photon scenarios (defaults to the scenario's
    /// canonical Bell state).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub state: Option<StateSpec>,
    /// Prepared states for `qubit-tomography` (one reconstruction each).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub states: Option<Vec<StateSpec>>,
    /// Noise model.
    #[serde(default)]
    pub noise: NoiseConfig,
    /// Per-scan (fringe scenarios) or per-state (qubit tomography) Werner
    /// visibility overrides, index-aligned; missing entries fall back to
    /// `noise.werner_v`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub werner_v_overrides: Option<Vec<f64>>,
    /// Detected coincidence pair rate, pairs/s.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pair_rate: Option<f64>,
    /// Acquisition duration per setting, s.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub duration_s: Option<f64>,
    /// Heralded conversion success probability scaling the pair rate
    /// (defaults to 1, i.e. rates are quoted post-conversion).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub conversion_eta: Option<f64>,
    /// Mask-angle scan points in radians (fringe scenarios).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub angles: Option<Vec<f64>>,
    /// Fixed first-arm mask angles in radians (`oam-fringes`).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fixed_angles: Option<Vec<f64>>,
    /// CHSH analyzer angles (`oam-chsh`; defaults to the optimal set).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chsh: Option<ChshConfig>,
    /// Signal-arm efficiency chain (`efficiency-budget`).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stages_signal: Option<Vec<StageConfig>>,
    /// Idler-arm efficiency chain (`efficiency-budget`).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stages_idler: Option<Vec<StageConfig>>,
    /// Spectral windows (`efficiency-budget`, optional).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub spectral: Option<SpectralConfig>,
    /// Beam geometry (`mode-capacity`).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beam: Option<BeamConfig>,
    /// Bootstrap resamples for sampled-mode error bars (default 300).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub resamples: Option<u32>,
    /// Master seed for every random draw in the run.
    pub seed: u64,
    /// `analytic` or `sampled`.
    pub mode: Mode,
}

impl ExperimentConfig {
    /// Parses a config from JSON bytes (strict: unknown keys are errors).
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Validation(vec![e.to_string()]))
    }

    /// Bootstrap resamples with the default applied.
    pub fn resamples(&self) -> u32 {
        self.resamples.unwrap_or(300)
    }

    /// Conversion efficiency with the default applied.
    pub fn conversion_eta(&self) -> f64 {
        self.conversion_eta.unwrap_or(1.0)
    }

    /// Checks every scenario-specific requirement, returning the full list of
    /// problems.
    pub fn validate(&self) -> Result<(), CliError> {
        let mut errors: Vec<String> = Vec::new();
        let mut require_rates = || {
            match self.pair_rate {
                Some(r) if r > 0.0 => {}
                Some(r) => errors.push(format!("pair_rate must be > 0, got {r}")),
                None => errors.push("pair_rate is required for this scenario".into()),
            }
            match self.duration_s {
                Some(d) if d > 0.0 => {}
                Some(d) => errors.push(format!("duration_s must be > 0, got {d}")),
                None => errors.push("duration_s is required for this scenario".into()),
            }
        };

        match self.scenario {
            Scenario::QubitTomography => {
                require_rates();
                match &self.states {
                    None => errors.push("states: at least one state is required".into()),
                    Some(list) if list.is_empty() => {
                        errors.push("states: at least one state is required".into())
                    }
                    Some(list) => {
                        for (i, s) in list.iter().enumerate() {
                            match s.resolve() {
                                Ok(ket) if ket.dim() != 2 => {
                                    errors.push(format!("states[{i}]: expected a qubit state"))
                                }
                                Ok(_) => {}
                                Err(e) => errors.push(format!("states[{i}]: {e}")),
                            }
                        }
                    }
                }
            }
            Scenario::HybridFringes | Scenario::HybridWitness | Scenario::OamFringes => {
                require_rates();
                match &self.angles {
                    None => errors.push("angles: a scan angle list is required".into()),
                    Some(a) if a.len() < 5 => {
                        errors.push(format!("angles: need at least 5 points, got {}", a.len()))
                    }
                    Some(_) => {}
                }
                if self.scenario == Scenario::OamFringes {
                    match &self.fixed_angles {
                        None => {
                            errors.push("fixed_angles: first-arm mask angles are required".into())
                        }
                        Some(f) if f.is_empty() => {
                            errors.push("fixed_angles: at least one angle is required".into())
                        }
                        Some(_) => {}
                    }
                }
                if let Some(state) = &self.state {
                    match state.resolve() {
                        Ok(ket) if ket.dim() != 4 => {
                            errors.push("state: expected a two-photon state".into())
                        }
                        Ok(_) => {}
                        Err(e) => errors.push(format!("state: {e}")),
                    }
                }
            }
            Scenario::HybridTomography | Scenario::OamChsh => {
                require_rates();
                if let Some(state) = &self.state {
                    match state.resolve() {
                        Ok(ket) if ket.dim() != 4 => {
                            errors.push("state: expected a two-photon state".into())
                        }
                        Ok(_) => {}
                        Err(e) => errors.push(format!("state: {e}")),
                    }
                }
            }
            Scenario::EfficiencyBudget => {
                if self.stages_signal.is_none() && self.stages_idler.is_none() {
                    errors.push(
                        "stages_signal and/or stages_idler is required for efficiency-budget"
                            .into(),
                    );
                }
                for (field, stages) in [
                    ("stages_signal", &self.stages_signal),
                    ("stages_idler", &self.stages_idler),
                ] {
                    if let Some(stages) = stages {
                        for (i, s) in stages.iter().enumerate() {
                            if !(0.0..=1.0).contains(&s.eta) {
                                errors.push(format!(
                                    "{field}[{i}] ({}): eta {} outside [0,1]",
                                    s.name, s.eta
                                ));
                            }
                        }
                    }
                }
                if let Some(sp) = &self.spectral {
                    let positive = |x: f64| x.is_finite() && x > 0.0;
                    if !positive(sp.bw_source_nm) || !positive(sp.bw_sfg_nm) {
                        errors.push("spectral: bandwidths must be positive".into());
                    }
                }
            }
            Scenario::ModeCapacity => match &self.beam {
                None => errors.push("beam: geometry is required for mode-capacity".into()),
                Some(b) => {
                    if !b.w0_um.is_finite() || b.w0_um <= 0.0 {
                        errors.push(format!("beam.w0_um must be > 0, got {}", b.w0_um));
                    } else if b.w_max_um < b.w0_um {
                        errors.push(format!(
                            "beam.w_max_um ({}) must be ≥ beam.w0_um ({})",
                            b.w_max_um, b.w0_um
                        ));
                    }
                }
            },
        }

        if let Err(e) = self.noise.to_model() {
            errors.push(format!("noise: {e}"));
        }
        if let Some(overrides) = &self.werner_v_overrides {
            for (i, v) in overrides.iter().enumerate() {
                if !(0.0..=1.0).contains(v) {
                    errors.push(format!("werner_v_overrides[{i}] = {v} outside [0,1]"));
                }
            }
        }
        if let Some(eta) = self.conversion_eta {
            if !(0.0..=1.0).contains(&eta) {
                errors.push(format!("conversion_eta = {eta} outside [0,1]"));
            }
        }
        if let Some(r) = self.resamples {
            if r < oamsim_core::analysis::MIN_RESAMPLES {
                errors.push(format!(
                    "resamples = {r} below the minimum of {}",
                    oamsim_core::analysis::MIN_RESAMPLES
                ));
            }
        }

        if errors.is_empty() {
            Ok(())
        } else {
            Err(CliError::Validation(errors))
        }
    }
}
