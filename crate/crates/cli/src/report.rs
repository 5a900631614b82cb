//! Structured run output and its JSON / CSV serializations.
//!
//! The JSON report is a single self-describing document; `parse(emit(r))`
//! returns an equal report. CSV emission produces one file per tabular
//! section with the exact headers documented in `docs/reports.md`. Reports
//! are deterministic for a fixed config and seed except for the
//! `timestamp_unix` field, which equality checks are expected to strip (see
//! [`ResultsReport::strip_timestamp`]).

use serde::{Deserialize, Serialize};

use oamsim_core::analysis::MetricWithError;
use oamsim_core::linalg::DensityMatrix;
use oamsim_core::measurement::ProjectorSpec;

use crate::config::{ExperimentConfig, Mode, Scenario};
use crate::error::CliError;

/// A value with its bootstrap error bar (σ = 0 and no resamples in analytic mode).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricValue {
    /// The metric itself.
    pub value: f64,
    /// Bootstrap standard deviation.
    pub sigma: f64,
    /// Resamples behind `sigma`.
    pub resamples: u32,
}

impl From<MetricWithError> for MetricValue {
    fn from(m: MetricWithError) -> Self {
        Self {
            value: m.value,
            sigma: m.sigma,
            resamples: m.resamples,
        }
    }
}

/// One named metric in raw (background included) and net (background
/// subtracted) form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricEntry {
    /// Metric name (e.g. `visibility_d`, `chsh_s_abs`).
    pub name: String,
    /// Computed from raw counts.
    pub raw: MetricValue,
    /// Computed from background-subtracted counts.
    pub net: MetricValue,
}

/// A reconstructed density matrix, split into real and imaginary parts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DensityMatrixReport {
    /// What was reconstructed (state label plus raw/net tag).
    pub label: String,
    /// Hilbert-space dimension.
    pub dim: usize,
    /// Real parts, row-major nested arrays.
    pub re: Vec<Vec<f64>>,
    /// Imaginary parts, row-major nested arrays.
    pub im: Vec<Vec<f64>>,
    /// Eigenvalues ascending, with negatives inside the numerical floor
    /// clamped to zero.
    pub eigenvalues: Vec<f64>,
}

impl DensityMatrixReport {
    /// Captures a core density matrix.
    pub fn from_density(label: impl Into<String>, rho: &DensityMatrix) -> Self {
        let dim = rho.dim();
        let mut re = vec![vec![0.0; dim]; dim];
        let mut im = vec![vec![0.0; dim]; dim];
        for i in 0..dim {
            for j in 0..dim {
                let e = rho.entry(i, j);
                re[i][j] = e.re;
                im[i][j] = e.im;
            }
        }
        Self {
            label: label.into(),
            dim,
            re,
            im,
            eigenvalues: rho.eigenvalues_clamped(),
        }
    }

    /// Rebuilds the core density matrix (validating its invariants).
    pub fn to_density(&self) -> Result<DensityMatrix, CliError> {
        let mut entries = Vec::with_capacity(self.dim * self.dim);
        for i in 0..self.dim {
            for j in 0..self.dim {
                entries.push(oamsim_core::Complex64::new(self.re[i][j], self.im[i][j]));
            }
        }
        DensityMatrix::new(self.dim, entries).map_err(|e| CliError::Runtime(e.to_string()))
    }
}

/// Text form of a projector spec used in reports and CSV (`R`, `d`,
/// `theta:0.392699…`).
pub fn spec_label(spec: &ProjectorSpec) -> String {
    match spec {
        ProjectorSpec::Basis(label) => label.as_str().to_string(),
        ProjectorSpec::Theta(theta) => format!("theta:{theta}"),
    }
}

/// One acquisition record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RecordReport {
    /// Analyzer on the first arm.
    pub side_a: String,
    /// Analyzer on the second arm (absent for heralded single-qubit records).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub side_b: Option<String>,
    /// Acquisition duration, s.
    pub duration_s: f64,
    /// Expected counts including background.
    pub expected: f64,
    /// Poisson draw (absent in analytic mode).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sampled: Option<u64>,
    /// Expected accidental counts.
    pub accidental: f64,
    /// Background-subtracted counts (floored at 0).
    pub net: f64,
    /// Whether the zero floor was hit.
    pub clamped: bool,
}

impl RecordReport {
    /// Raw counts: the draw in sampled mode, the expectation otherwise.
    pub fn raw(&self) -> f64 {
        self.sampled.map(|s| s as f64).unwrap_or(self.expected)
    }
}

/// One point of a fringe scan.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FringePoint {
    /// Mask angle, radians.
    pub theta_rad: f64,
    /// Expected counts including background.
    pub expected: f64,
    /// Poisson draw (absent in analytic mode).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sampled: Option<u64>,
    /// Expected accidental counts.
    pub accidental: f64,
}

/// A fitted fringe parameter set.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    /// Fringe contrast in [0, 1].
    pub visibility: f64,
    /// Fringe phase, radians.
    pub phase: f64,
    /// Mean level.
    pub baseline: f64,
    /// Modulation amplitude.
    pub amplitude: f64,
    /// ℓ² residual norm.
    pub residual_norm: f64,
    /// Visibility was clamped into [0, 1].
    pub clamped: bool,
    /// Scan was flat; visibility forced to 0.
    pub degenerate: bool,
}

impl From<oamsim_core::analysis::FringeFit> for FitReport {
    fn from(f: oamsim_core::analysis::FringeFit) -> Self {
        Self {
            visibility: f.visibility,
            phase: f.phase,
            baseline: f.baseline,
            amplitude: f.amplitude,
            residual_norm: f.residual_norm,
            clamped: f.clamped,
            degenerate: f.degenerate,
        }
    }
}

/// One complete fringe scan with its raw and net fits.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FringeSection {
    /// Scan label (e.g. `idler_d`, `theta_a_0.000000`).
    pub label: String,
    /// Fixed analyzer on the non-scanned arm.
    pub fixed: String,
    /// Acquisition time per point, s.
    pub duration_s: f64,
    /// The scan points.
    pub points: Vec<FringePoint>,
    /// Fit to raw counts.
    pub raw_fit: FitReport,
    /// Fit to net counts.
    pub net_fit: FitReport,
}

/// One row of the qubit-fidelity table.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FidelityRow {
    /// Prepared-state label.
    pub state: String,
    /// Fidelity from raw counts.
    pub raw_fidelity: f64,
    /// Bootstrap σ of the raw fidelity.
    pub raw_sigma: f64,
    /// Fidelity from net counts.
    pub net_fidelity: f64,
    /// Bootstrap σ of the net fidelity.
    pub net_sigma: f64,
}

/// One measured tomography input count (for CSV emission).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TomographyCountRow {
    /// Which reconstruction this count feeds.
    pub label: String,
    /// Analyzer on the first arm.
    pub side_a: String,
    /// Analyzer on the second arm (absent for single-qubit tomography).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub side_b: Option<String>,
    /// Raw counts.
    pub raw: f64,
    /// Net counts.
    pub net: f64,
}

/// The full structured output of one scenario run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultsReport {
    /// Version of the toolkit that produced this report.
    pub toolkit_version: String,
    /// Scenario that ran.
    pub scenario: Scenario,
    /// Master seed used.
    pub seed: u64,
    /// Analytic or sampled counts.
    pub mode: Mode,
    /// Wall-clock emission time (unix seconds); excluded from equality.
    pub timestamp_unix: u64,
    /// The configuration that ran, echoed verbatim after parsing.
    pub config: ExperimentConfig,
    /// Named metrics, raw and net.
    pub metrics: Vec<MetricEntry>,
    /// Reconstructed density matrices.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub density_matrices: Vec<DensityMatrixReport>,
    /// Fringe scans.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub fringes: Vec<FringeSection>,
    /// Qubit-fidelity table (qubit-tomography only).
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub fidelity_table: Vec<FidelityRow>,
    /// Tomography input counts.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub tomography_counts: Vec<TomographyCountRow>,
    /// Per-setting acquisition records.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub records: Vec<RecordReport>,
    /// Run annotations (clamp events, fitted-preset provenance, …).
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl ResultsReport {
    /// Copy with the timestamp zeroed, for byte-level reproducibility checks.
    pub fn strip_timestamp(&self) -> Self {
        let mut copy = self.clone();
        copy.timestamp_unix = 0;
        copy
    }

    /// Looks up a metric by name.
    pub fn metric(&self, name: &str) -> Option<&MetricEntry> {
        self.metrics.iter().find(|m| m.name == name)
    }
}

/// Serializes a report as pretty JSON (one self-describing document).
pub fn emit_json(report: &ResultsReport) -> String {
    let mut text = serde_json::to_string_pretty(report).expect("report serialization is total");
    text.push('\n');
    text
}

/// Parses a JSON report back.
pub fn parse_json(text: &str) -> Result<ResultsReport, CliError> {
    serde_json::from_str(text).map_err(|e| CliError::Runtime(format!("bad report JSON: {e}")))
}

fn csv_escape(field: &str) -> String {
    if field.contains(',') || field.contains('"') || field.contains('\n') {
        format!("\"{}\"", field.replace('"', "\"\""))
    } else {
        field.to_string()
    }
}

fn opt_u64(v: Option<u64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// Serializes the report's tabular sections as CSV files, returned as
/// `(file name, contents)` pairs. Section headers:
///
/// * `metrics.csv` — `metric,raw_value,raw_sigma,net_value,net_sigma`
/// * `fidelities.csv` — `state,raw_fidelity,raw_sigma,net_fidelity,net_sigma`
/// * `fringe_<label>.csv` — `theta_rad,expected,sampled,accidental,duration_s`
/// * `tomography_counts.csv` — `label,side_a,side_b,raw,net`
/// * `records.csv` — `side_a,side_b,duration_s,expected,sampled,accidental,net,clamped`
pub fn emit_csv(report: &ResultsReport) -> Vec<(String, String)> {
    let mut files = Vec::new();

    if !report.metrics.is_empty() {
        let mut out = String::from("metric,raw_value,raw_sigma,net_value,net_sigma\n");
        for m in &report.metrics {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                csv_escape(&m.name),
                m.raw.value,
                m.raw.sigma,
                m.net.value,
                m.net.sigma
            ));
        }
        files.push(("metrics.csv".to_string(), out));
    }

    if !report.fidelity_table.is_empty() {
        let mut out = String::from("state,raw_fidelity,raw_sigma,net_fidelity,net_sigma\n");
        for row in &report.fidelity_table {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                csv_escape(&row.state),
                row.raw_fidelity,
                row.raw_sigma,
                row.net_fidelity,
                row.net_sigma
            ));
        }
        files.push(("fidelities.csv".to_string(), out));
    }

    for fringe in &report.fringes {
        let mut out = String::from("theta_rad,expected,sampled,accidental,duration_s\n");
        for p in &fringe.points {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                p.theta_rad,
                p.expected,
                opt_u64(p.sampled),
                p.accidental,
                fringe.duration_s
            ));
        }
        files.push((format!("fringe_{}.csv", fringe.label), out));
    }

    if !report.tomography_counts.is_empty() {
        let mut out = String::from("label,side_a,side_b,raw,net\n");
        for row in &report.tomography_counts {
            out.push_str(&format!(
                "{},{},{},{},{}\n",
                csv_escape(&row.label),
                csv_escape(&row.side_a),
                row.side_b.as_deref().map(csv_escape).unwrap_or_default(),
                row.raw,
                row.net
            ));
        }
        files.push(("tomography_counts.csv".to_string(), out));
    }

    if !report.records.is_empty() {
        let mut out =
            String::from("side_a,side_b,duration_s,expected,sampled,accidental,net,clamped\n");
        for r in &report.records {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{}\n",
                csv_escape(&r.side_a),
                r.side_b.as_deref().map(csv_escape).unwrap_or_default(),
                r.duration_s,
                r.expected,
                opt_u64(r.sampled),
                r.accidental,
                r.net,
                r.clamped
            ));
        }
        files.push(("records.csv".to_string(), out));
    }

    files
}
