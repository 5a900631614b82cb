//! Maximum-likelihood density-matrix reconstruction from projection counts.
//!
//! A state is parameterized through a triangular factor so that positivity
//! and Hermiticity hold for every parameter value: one qubit uses the
//! four-parameter factor `α = [[t₁, 0], [t₃ + i·t₄, t₂]]` with
//! `ρ = α·α† / tr(α·α†)`, two qubits a 4×4 lower-triangular complex factor
//! `T` (16 real parameters) with `ρ = T†·T / tr(T†·T)`.
//!
//! With `N` the normalization constant (sum of the counts in one complete
//! orthogonal projector set) and `pᵢ` the model probabilities, the fit
//! minimizes
//!
//! ```text
//! L = Σᵢ (N·pᵢ − nᵢ)² / (2·N·pᵢ)
//! ```
//!
//! by seeded multi-start simplex descent; `pᵢ` is floored at 1e-12 inside the
//! objective because the printed loss is singular at `pᵢ = 0`. Identical
//! counts and an identical multi-start seed reproduce the output bit for bit.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{self, DensityMatrix, Operator};
use crate::measurement::{projector, MeasurementSetting, ProjectorSpec};
use crate::optimize::{nelder_mead, SimplexOptions};
use crate::rng::{self, StreamDomain};
use crate::states::BasisLabel;

/// Floor applied to model probabilities inside the loss.
pub const PROBABILITY_FLOOR: f64 = 1e-12;
/// How far the four Stokes probabilities may stray from `p_R + p_L = 1`.
pub const STOKES_SUM_TOL: f64 = 1e-6;

/// Triangular-factor parameters of a single-qubit state, canonicalized to
/// `t₁ ≥ 0`, `t₂ ≥ 0` (flipping the redundant signs leaves ρ unchanged).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MleParamsQubit {
    t: [f64; 4],
}

impl MleParamsQubit {
    /// Stores `(t₁, t₂, t₃, t₄)`, flipping sign conventions so the diagonal
    /// entries are non-negative.
    pub fn new(t: [f64; 4]) -> Self {
        let mut t = t;
        if t[0] < 0.0 {
            // ρ depends on t₁ and (t₃, t₄) only through their products.
            t[0] = -t[0];
            t[2] = -t[2];
            t[3] = -t[3];
        }
        if t[1] < 0.0 {
            t[1] = -t[1];
        }
        Self { t }
    }

    /// The parameter vector `(t₁, t₂, t₃, t₄)`.
    pub fn t(&self) -> [f64; 4] {
        self.t
    }

    /// The state `α·α† / tr(α·α†)` these parameters encode.
    pub fn density(&self) -> Result<DensityMatrix> {
        let entries = qubit_rho_entries(&self.t)?;
        DensityMatrix::new(2, entries.to_vec())
    }
}

/// The 16 real parameters of a 4×4 lower-triangular complex factor `T`:
/// indices 0–3 are the real diagonal, the rest are (re, im) pairs for the
/// below-diagonal entries in row-major order
/// `(1,0), (2,0), (2,1), (3,0), (3,1), (3,2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MleParamsTwoQubit {
    t: [f64; 16],
}

impl MleParamsTwoQubit {
    /// Wraps a raw parameter vector.
    pub fn new(t: [f64; 16]) -> Self {
        Self { t }
    }

    /// The parameter vector.
    pub fn t(&self) -> [f64; 16] {
        self.t
    }

    /// The state `T†·T / tr(T†·T)` these parameters encode.
    pub fn density(&self) -> Result<DensityMatrix> {
        let entries = two_qubit_rho_entries(&self.t)?;
        DensityMatrix::new(4, entries.to_vec())
    }
}

fn qubit_rho_entries(t: &[f64; 4]) -> Result<[Complex64; 4]> {
    let norm = t.iter().map(|x| x * x).sum::<f64>();
    if norm <= 0.0 {
        return Err(Error::DegenerateData(String::from(
            "triangular factor has zero trace; state undefined",
        )));
    }
    let off = Complex64::new(t[2], t[3]);
    Ok([
        Complex64::new(t[0] * t[0] / norm, 0.0),
        t[0] * off.conj() / norm,
        t[0] * off / norm,
        Complex64::new((t[1] * t[1] + t[2] * t[2] + t[3] * t[3]) / norm, 0.0),
    ])
}

/// Lower-triangular T from the 16-parameter vector, row-major 4×4.
fn two_qubit_factor(t: &[f64; 16]) -> [Complex64; 16] {
    let mut m = [Complex64::ZERO; 16];
    for i in 0..4 {
        m[i * 4 + i] = Complex64::new(t[i], 0.0);
    }
    let below = [(1usize, 0usize), (2, 0), (2, 1), (3, 0), (3, 1), (3, 2)];
    for (k, &(i, j)) in below.iter().enumerate() {
        m[i * 4 + j] = Complex64::new(t[4 + 2 * k], t[5 + 2 * k]);
    }
    m
}

fn two_qubit_rho_entries(t: &[f64; 16]) -> Result<[Complex64; 16]> {
    let factor = two_qubit_factor(t);
    let mut gram = [Complex64::ZERO; 16];
    // (T†T)_{ij} = Σ_k conj(T_{ki})·T_{kj}
    for i in 0..4 {
        for j in 0..4 {
            let mut acc = Complex64::ZERO;
            for k in 0..4 {
                acc += factor[k * 4 + i].conj() * factor[k * 4 + j];
            }
            gram[i * 4 + j] = acc;
        }
    }
    let trace: f64 = (0..4).map(|i| gram[i * 4 + i].re).sum();
    if trace <= 0.0 {
        return Err(Error::DegenerateData(String::from(
            "triangular factor has zero trace; state undefined",
        )));
    }
    for e in gram.iter_mut() {
        *e /= trace;
    }
    Ok(gram)
}

/// The four canonical qubit projection bases `χ₁..χ₄ = R, L, H, A`.
pub fn standard_qubit_basis() -> [ProjectorSpec; 4] {
    [
        ProjectorSpec::Basis(BasisLabel::OamR),
        ProjectorSpec::Basis(BasisLabel::OamL),
        ProjectorSpec::Basis(BasisLabel::OamH),
        ProjectorSpec::Basis(BasisLabel::OamA),
    ]
}

/// Model probabilities of the four canonical projections `χᵢ† ρ χᵢ` for a
/// parameter vector.
pub fn qubit_probabilities(params: &MleParamsQubit) -> Result<[f64; 4]> {
    let rho = qubit_rho_entries(&params.t())?;
    Ok(probabilities_against(&rho, &standard_qubit_basis()))
}

fn probabilities_against(rho: &[Complex64; 4], basis: &[ProjectorSpec; 4]) -> [f64; 4] {
    let mut out = [0.0f64; 4];
    for (slot, spec) in out.iter_mut().zip(basis) {
        let chi = spec.ket();
        let a = chi.amplitudes();
        let mut acc = Complex64::ZERO;
        for i in 0..2 {
            for j in 0..2 {
                acc += a[i].conj() * rho[i * 2 + j] * a[j];
            }
        }
        *slot = acc.re;
    }
    out
}

/// Projection counts for single-qubit tomography: four projector specs, the
/// first two forming an orthogonal pair, and their observed counts.
#[derive(Debug, Clone, PartialEq)]
pub struct QubitCounts {
    specs: [ProjectorSpec; 4],
    counts: [u64; 4],
}

impl QubitCounts {
    /// Counts in the canonical `(R, L, H, A)` basis order.
    pub fn standard(counts: [u64; 4]) -> Result<Self> {
        Self::new(standard_qubit_basis(), counts)
    }

    /// Counts against custom projectors; the first two must be orthogonal
    /// (they define the normalization `N = n₁ + n₂`).
    pub fn new(specs: [ProjectorSpec; 4], counts: [u64; 4]) -> Result<Self> {
        let overlap = specs[0].ket().inner(&specs[1].ket())?.norm();
        if overlap > 1e-9 {
            return Err(Error::InvalidParameter(format!(
                "first two tomography projectors must be orthogonal, overlap {overlap:e}"
            )));
        }
        if counts[0] + counts[1] == 0 {
            return Err(Error::DegenerateData(String::from(
                "normalization counts n₁ + n₂ are zero",
            )));
        }
        Ok(Self { specs, counts })
    }

    /// The projector specs.
    pub fn specs(&self) -> &[ProjectorSpec; 4] {
        &self.specs
    }

    /// The observed counts.
    pub fn counts(&self) -> &[u64; 4] {
        &self.counts
    }

    /// Normalization constant `N = n₁ + n₂`.
    pub fn normalization(&self) -> f64 {
        (self.counts[0] + self.counts[1]) as f64
    }
}

/// Projection counts for two-qubit tomography: 16 settings with a marked
/// subset of four whose tensor projectors sum to the identity.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoQubitCounts {
    settings: Vec<MeasurementSetting>,
    counts: Vec<u64>,
    normalization_indices: [usize; 4],
}

/// Per-side bases used by the canonical two-qubit constructors.
const OAM_SIDE: [BasisLabel; 4] = [
    BasisLabel::OamR,
    BasisLabel::OamL,
    BasisLabel::OamH,
    BasisLabel::OamD,
];
const POL_SIDE: [BasisLabel; 4] = [
    BasisLabel::PolH,
    BasisLabel::PolV,
    BasisLabel::PolD,
    BasisLabel::PolR,
];

/// The canonical 16 hybrid-tomography settings: index `4·i + j` pairs OAM
/// basis `{R,L,H,D}[i]` on the second subsystem with polarization basis
/// `{h,v,d,r}[j]` on the first, matching the `(hR, hL, vR, vL)` state
/// ordering.
pub fn hybrid_tomography_settings() -> Vec<MeasurementSetting> {
    let mut settings = Vec::with_capacity(16);
    for oam in OAM_SIDE {
        for pol in POL_SIDE {
            settings.push(MeasurementSetting::new(
                ProjectorSpec::Basis(pol),
                ProjectorSpec::Basis(oam),
            ));
        }
    }
    settings
}

/// The canonical 16 OAM–OAM tomography settings: index `4·i + j` pairs
/// `{R,L,H,D}[i]` on the first subsystem with `{R,L,H,D}[j]` on the second.
pub fn oam_tomography_settings() -> Vec<MeasurementSetting> {
    let mut settings = Vec::with_capacity(16);
    for a in OAM_SIDE {
        for b in OAM_SIDE {
            settings.push(MeasurementSetting::new(
                ProjectorSpec::Basis(a),
                ProjectorSpec::Basis(b),
            ));
        }
    }
    settings
}

impl TwoQubitCounts {
    /// Counts in the [`hybrid_tomography_settings`] layout.
    pub fn hybrid(counts: Vec<u64>) -> Result<Self> {
        Self::new(hybrid_tomography_settings(), counts, [0, 1, 4, 5])
    }

    /// Counts in the [`oam_tomography_settings`] layout.
    pub fn oam(counts: Vec<u64>) -> Result<Self> {
        Self::new(oam_tomography_settings(), counts, [0, 1, 4, 5])
    }

    /// Custom settings. Validates tomographic completeness (the 16 tensor
    /// projectors must span operator space) and that the four marked settings
    /// resolve the identity.
    pub fn new(
        settings: Vec<MeasurementSetting>,
        counts: Vec<u64>,
        normalization_indices: [usize; 4],
    ) -> Result<Self> {
        if settings.len() != 16 || counts.len() != 16 {
            return Err(Error::InvalidParameter(format!(
                "two-qubit tomography needs 16 settings and 16 counts, got {} and {}",
                settings.len(),
                counts.len()
            )));
        }
        let projectors: Vec<Operator> = settings
            .iter()
            .map(|s| projector(&s.side_a).tensor(&projector(&s.side_b)))
            .collect::<Result<_>>()?;

        // Completeness: flattened projectors must form a rank-16 system.
        let mut flat = vec![Complex64::ZERO; 256];
        for (row, p) in projectors.iter().enumerate() {
            flat[row * 16..(row + 1) * 16].copy_from_slice(p.entries());
        }
        let rank = linalg::matrix_rank(16, &flat, 1e-9);
        if rank < 16 {
            return Err(Error::InvalidParameter(format!(
                "projector set is tomographically incomplete (rank {rank} of 16)"
            )));
        }

        for idx in normalization_indices {
            if idx >= 16 {
                return Err(Error::InvalidParameter(format!(
                    "normalization index {idx} out of range"
                )));
            }
        }
        let mut resolution = vec![Complex64::ZERO; 16];
        for &idx in &normalization_indices {
            for (acc, e) in resolution.iter_mut().zip(projectors[idx].entries()) {
                *acc += e;
            }
        }
        for i in 0..4 {
            for j in 0..4 {
                let want = if i == j {
                    Complex64::ONE
                } else {
                    Complex64::ZERO
                };
                if (resolution[i * 4 + j] - want).norm() > 1e-9 {
                    return Err(Error::InvalidParameter(String::from(
                        "normalization settings do not resolve the identity",
                    )));
                }
            }
        }

        if normalization_indices
            .iter()
            .map(|&i| counts[i])
            .sum::<u64>()
            == 0
        {
            return Err(Error::DegenerateData(String::from(
                "normalization counts sum to zero",
            )));
        }
        Ok(Self {
            settings,
            counts,
            normalization_indices,
        })
    }

    /// The measurement settings, index-aligned with the counts.
    pub fn settings(&self) -> &[MeasurementSetting] {
        &self.settings
    }

    /// The observed counts.
    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    /// Normalization constant: sum of the counts in the identity-resolving subset.
    pub fn normalization(&self) -> f64 {
        self.normalization_indices
            .iter()
            .map(|&i| self.counts[i])
            .sum::<u64>() as f64
    }
}

/// Multi-start configuration for the likelihood minimizations.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MleOptions {
    /// Seed for the start-perturbation sub-streams.
    pub seed: u64,
    /// Number of starts: the identity-scaled start plus `starts − 1` seeded
    /// perturbations of it.
    pub starts: u32,
    /// Evaluation cap per start.
    pub max_evals_per_start: u32,
    /// Per-coordinate amplitude of the start perturbations.
    pub perturbation: f64,
}

impl Default for MleOptions {
    fn default() -> Self {
        Self {
            seed: 0,
            starts: 8,
            max_evals_per_start: 100_000,
            perturbation: 0.1,
        }
    }
}

/// A finished reconstruction.
#[derive(Debug, Clone, PartialEq)]
pub struct Reconstruction<P> {
    /// The reconstructed state (physical by construction).
    pub rho: DensityMatrix,
    /// Triangular-factor parameters at the optimum.
    pub params: P,
    /// Final loss value.
    pub objective: f64,
    /// Total objective evaluations across all starts.
    pub evaluations: u32,
    /// Index of the winning start (ties break to the lowest index).
    pub start_index: u32,
}

/// The loss `Σ (N·pᵢ − nᵢ)² / (2·N·pᵢ)` with the probability floor applied.
fn loss(n_total: f64, probabilities: &[f64], counts: &[u64]) -> f64 {
    probabilities
        .iter()
        .zip(counts)
        .map(|(&p, &n)| {
            let p = p.max(PROBABILITY_FLOOR);
            let d = n_total * p - n as f64;
            d * d / (2.0 * n_total * p)
        })
        .sum()
}

fn run_multistart<F>(
    dim_params: usize,
    identity_start: &[f64],
    mut objective: F,
    opts: &MleOptions,
) -> (Vec<f64>, f64, u32, u32, bool)
where
    F: FnMut(&[f64]) -> f64,
{
    let simplex = SimplexOptions {
        initial_step: 0.1,
        max_evals: opts.max_evals_per_start,
        improvement_tol: 1e-12,
    };
    let mut best: Option<(Vec<f64>, f64, u32)> = None;
    let mut total_evals = 0u32;
    let mut any_converged = false;
    for start_index in 0..opts.starts.max(1) {
        let mut start = identity_start.to_vec();
        if start_index > 0 {
            let mut rng = rng::substream(opts.seed, StreamDomain::MleStart, start_index as u64);
            for coordinate in start.iter_mut().take(dim_params) {
                *coordinate += (rng::uniform(&mut rng) - 0.5) * 2.0 * opts.perturbation;
            }
        }
        let outcome = nelder_mead(&mut objective, &start, &simplex);
        total_evals = total_evals.saturating_add(outcome.evals);
        any_converged |= outcome.converged;
        let replace = match &best {
            None => true,
            Some((_, value, _)) => outcome.value < *value,
        };
        if replace {
            best = Some((outcome.x, outcome.value, start_index));
        }
    }
    let (x, value, start_index) = best.expect("at least one start ran");
    (x, value, total_evals, start_index, any_converged)
}

/// Maximum-likelihood reconstruction of a single qubit with default options.
pub fn qubit_mle(data: &QubitCounts) -> Result<Reconstruction<MleParamsQubit>> {
    qubit_mle_with(data, &MleOptions::default())
}

/// Maximum-likelihood reconstruction of a single qubit.
pub fn qubit_mle_with(
    data: &QubitCounts,
    opts: &MleOptions,
) -> Result<Reconstruction<MleParamsQubit>> {
    let n_total = data.normalization();
    let specs = *data.specs();
    let counts = *data.counts();
    let objective = move |t: &[f64]| -> f64 {
        let t4 = [t[0], t[1], t[2], t[3]];
        match qubit_rho_entries(&t4) {
            Ok(rho) => loss(n_total, &probabilities_against(&rho, &specs), &counts),
            Err(_) => f64::MAX,
        }
    };
    // Identity-scaled start: ρ = I/2.
    let start = [
        core::f64::consts::FRAC_1_SQRT_2,
        core::f64::consts::FRAC_1_SQRT_2,
        0.0,
        0.0,
    ];
    let (x, value, evaluations, start_index, converged) =
        run_multistart(4, &start, objective, opts);
    if !converged {
        return Err(Error::NonConvergence {
            best_value: value,
            best_params: x,
        });
    }
    let params = MleParamsQubit::new([x[0], x[1], x[2], x[3]]);
    Ok(Reconstruction {
        rho: params.density()?,
        params,
        objective: value,
        evaluations,
        start_index,
    })
}

/// Maximum-likelihood reconstruction of a photon pair with default options.
pub fn two_qubit_mle(data: &TwoQubitCounts) -> Result<Reconstruction<MleParamsTwoQubit>> {
    two_qubit_mle_with(data, &MleOptions::default())
}

/// Maximum-likelihood reconstruction of a photon pair.
pub fn two_qubit_mle_with(
    data: &TwoQubitCounts,
    opts: &MleOptions,
) -> Result<Reconstruction<MleParamsTwoQubit>> {
    let n_total = data.normalization();
    let counts: Vec<u64> = data.counts().to_vec();
    // Projectors are fixed per dataset; precompute them once.
    let projectors: Vec<[Complex64; 16]> = data
        .settings()
        .iter()
        .map(|s| {
            let p = projector(&s.side_a).tensor(&projector(&s.side_b))?;
            let mut buf = [Complex64::ZERO; 16];
            buf.copy_from_slice(p.entries());
            Ok(buf)
        })
        .collect::<Result<_>>()?;

    let objective = move |t: &[f64]| -> f64 {
        let mut t16 = [0.0f64; 16];
        t16.copy_from_slice(t);
        let rho = match two_qubit_rho_entries(&t16) {
            Ok(r) => r,
            Err(_) => return f64::MAX,
        };
        let mut probabilities = [0.0f64; 16];
        for (slot, p) in probabilities.iter_mut().zip(&projectors) {
            // tr(ρP) for Hermitian ρ, P.
            let mut acc = 0.0;
            for i in 0..4 {
                for k in 0..4 {
                    let a = rho[i * 4 + k];
                    let b = p[k * 4 + i];
                    acc += a.re * b.re - a.im * b.im;
                }
            }
            *slot = acc;
        }
        loss(n_total, &probabilities, &counts)
    };

    // Identity-scaled start: ρ = I/4.
    let mut start = [0.0f64; 16];
    for s in start.iter_mut().take(4) {
        *s = 0.5;
    }
    let (x, value, evaluations, start_index, converged) =
        run_multistart(16, &start, objective, opts);
    if !converged {
        return Err(Error::NonConvergence {
            best_value: value,
            best_params: x,
        });
    }
    let mut t16 = [0.0f64; 16];
    t16.copy_from_slice(&x);
    let params = MleParamsTwoQubit::new(t16);
    Ok(Reconstruction {
        rho: params.density()?,
        params,
        objective: value,
        evaluations,
        start_index,
    })
}

/// Linear Stokes inversion of the four probabilities `(p_R, p_L, p_H, p_D)`.
///
/// Produces `ρ = ½·Σᵢ (Sᵢ/S₀)·σᵢ` with `S₀ = p_R + p_L`, `S₁ = 2p_H − S₀`,
/// `S₂ = 2p_D − S₀`, `S₃ = p_R − p_L` (σ₃ diagonal in R/L). The output is
/// Hermitian with unit trace but, being a linear inversion, may be
/// indefinite; check [`DensityMatrix::min_eigenvalue`] before treating it as
/// a physical state.
pub fn stokes_reconstruct(p_r: f64, p_l: f64, p_h: f64, p_d: f64) -> Result<DensityMatrix> {
    for (name, p) in [("p_R", p_r), ("p_L", p_l), ("p_H", p_h), ("p_D", p_d)] {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidParameter(format!(
                "{name} = {p} outside [0,1]"
            )));
        }
    }
    let s0 = p_r + p_l;
    if (s0 - 1.0).abs() > STOKES_SUM_TOL {
        return Err(Error::InvalidParameter(format!(
            "p_R + p_L = {s0} is not 1 within {STOKES_SUM_TOL:e}"
        )));
    }
    let s1 = (2.0 * p_h - s0) / s0;
    let s2 = (2.0 * p_d - s0) / s0;
    let s3 = (p_r - p_l) / s0;
    let entries = vec![
        Complex64::new(0.5 * (1.0 + s3), 0.0),
        Complex64::new(0.5 * s1, -0.5 * s2),
        Complex64::new(0.5 * s1, 0.5 * s2),
        Complex64::new(0.5 * (1.0 - s3), 0.0),
    ];
    DensityMatrix::hermitian_unit_trace(2, entries)
}
