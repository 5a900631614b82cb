//! Derived quantities: fringe visibility, entanglement witness, CHSH, and
//! Poisson error bars.
//!
//! Coincidence fringes against a rotating phase mask follow
//! `C(θ) = B·(1 + V·cos(2θ − φ))` — the mask state carries a `2θ` relative
//! phase, so the period is fixed at π and only the first harmonic is fitted.
//! Error bars on any count-derived metric come from one mechanism: parametric
//! bootstrap with Poisson-resampled counts.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::linalg::DensityMatrix;
use crate::measurement::{coincidence_probability, MeasurementSetting, ProjectorSpec};
use crate::rng::{self, StreamDomain};

/// A coincidence scan over mask angles.
#[derive(Debug, Clone, PartialEq)]
pub struct FringeScan {
    angles: Vec<f64>,
    counts: Vec<f64>,
    duration_s: f64,
}

impl FringeScan {
    /// Validates matched lengths (≥ 5 points) and that the angles span at
    /// least one full π period.
    pub fn new(angles: Vec<f64>, counts: Vec<f64>, duration_s: f64) -> Result<Self> {
        if angles.len() != counts.len() {
            return Err(Error::InvalidParameter(format!(
                "angle/count length mismatch: {} vs {}",
                angles.len(),
                counts.len()
            )));
        }
        if angles.len() < 5 {
            return Err(Error::DegenerateData(format!(
                "fringe fit needs at least 5 points, got {}",
                angles.len()
            )));
        }
        if counts.iter().any(|&c| c < 0.0 || !c.is_finite()) {
            return Err(Error::InvalidParameter(String::from(
                "counts must be finite and ≥ 0",
            )));
        }
        let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
        for &a in &angles {
            lo = lo.min(a);
            hi = hi.max(a);
        }
        if hi - lo < core::f64::consts::PI - 1e-9 {
            return Err(Error::DegenerateData(format!(
                "scan spans {:.4} rad; a full π period is required",
                hi - lo
            )));
        }
        Ok(Self {
            angles,
            counts,
            duration_s,
        })
    }

    /// Mask angles in radians.
    pub fn angles(&self) -> &[f64] {
        &self.angles
    }

    /// Counts per point.
    pub fn counts(&self) -> &[f64] {
        &self.counts
    }

    /// Acquisition time per point in seconds.
    pub fn duration_s(&self) -> f64 {
        self.duration_s
    }
}

/// Result of fitting `C(θ) = B·(1 + V·cos(2θ − φ))` to a scan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FringeFit {
    /// Fringe contrast, clamped into [0, 1].
    pub visibility: f64,
    /// Fringe phase in radians, normalized into (−π, π].
    pub phase: f64,
    /// Mean count level `B`.
    pub baseline: f64,
    /// Modulation amplitude `B·V` before any clamping.
    pub amplitude: f64,
    /// ℓ² norm of the fit residuals.
    pub residual_norm: f64,
    /// Whether the visibility had to be clamped into [0, 1].
    pub clamped: bool,
    /// Whether the scan was flat (no resolvable fringe); visibility is 0.
    pub degenerate: bool,
}

/// Solves the 3×3 system `m·x = b` by Gaussian elimination.
fn solve3(mut m: [[f64; 3]; 3], mut b: [f64; 3]) -> Option<[f64; 3]> {
    for col in 0..3 {
        let pivot_row = (col..3)
            .max_by(|&a, &c| m[a][col].abs().partial_cmp(&m[c][col].abs()).unwrap())
            .unwrap();
        if m[pivot_row][col].abs() < 1e-14 {
            return None;
        }
        m.swap(col, pivot_row);
        b.swap(col, pivot_row);
        let pivot = m[col];
        for row in (col + 1)..3 {
            let f = m[row][col] / pivot[col];
            for (cell, p) in m[row].iter_mut().zip(&pivot).skip(col) {
                *cell -= f * p;
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = [0.0f64; 3];
    for row in (0..3).rev() {
        let mut acc = b[row];
        for k in (row + 1)..3 {
            acc -= m[row][k] * x[k];
        }
        x[row] = acc / m[row][row];
    }
    Some(x)
}

/// Least-squares fringe fit.
///
/// The cosine model is linear in `(B, B·V·cosφ, B·V·sinφ)`, so a linear
/// solve provides the start; Gauss–Newton on `(B, V, φ)` then polishes until
/// the relative step drops below 1e-10. A flat scan comes back with
/// `visibility = 0` and the `degenerate` flag instead of an error.
pub fn fit_fringe(scan: &FringeScan) -> Result<FringeFit> {
    let angles = scan.angles();
    let counts = scan.counts();
    let n = angles.len() as f64;

    // Linear quadrature solve: C ≈ a0 + a1·cos2θ + a2·sin2θ.
    let mut m = [[0.0f64; 3]; 3];
    let mut b = [0.0f64; 3];
    for (&theta, &count) in angles.iter().zip(counts) {
        let basis = [1.0, (2.0 * theta).cos(), (2.0 * theta).sin()];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell += basis[i] * basis[j];
            }
            b[i] += basis[i] * count;
        }
    }
    let [a0, a1, a2] = solve3(m, b)
        .ok_or_else(|| Error::DegenerateData(String::from("fringe design matrix is singular")))?;

    let amplitude0 = (a1 * a1 + a2 * a2).sqrt();
    let mean = counts.iter().sum::<f64>() / n;
    if amplitude0 <= 1e-10 * (mean.abs() + 1.0) || a0 <= 0.0 {
        let residual_norm = counts
            .iter()
            .map(|c| (c - a0) * (c - a0))
            .sum::<f64>()
            .sqrt();
        return Ok(FringeFit {
            visibility: 0.0,
            phase: 0.0,
            baseline: a0,
            amplitude: 0.0,
            residual_norm,
            clamped: false,
            degenerate: true,
        });
    }

    let mut baseline = a0;
    let mut visibility = amplitude0 / a0;
    let mut phase = a2.atan2(a1);

    // Gauss–Newton refinement.
    for _ in 0..200 {
        let mut jtj = [[0.0f64; 3]; 3];
        let mut jtr = [0.0f64; 3];
        for (&theta, &count) in angles.iter().zip(counts) {
            let arg = 2.0 * theta - phase;
            let cos = arg.cos();
            let sin = arg.sin();
            let model = baseline * (1.0 + visibility * cos);
            let residual = count - model;
            let jac = [
                1.0 + visibility * cos,
                baseline * cos,
                baseline * visibility * sin,
            ];
            for i in 0..3 {
                for j in 0..3 {
                    jtj[i][j] += jac[i] * jac[j];
                }
                jtr[i] += jac[i] * residual;
            }
        }
        let Some(step) = solve3(jtj, jtr) else { break };
        baseline += step[0];
        visibility += step[1];
        phase += step[2];
        let step_norm = (step[0] * step[0] + step[1] * step[1] + step[2] * step[2]).sqrt();
        let param_norm = (baseline * baseline + visibility * visibility + phase * phase).sqrt();
        if step_norm < 1e-10 * (1.0 + param_norm) {
            break;
        }
    }

    phase = phase.sin().atan2(phase.cos());
    // A negative fitted contrast is the same fringe shifted by π.
    if visibility < 0.0 {
        visibility = -visibility;
        phase = if phase > 0.0 {
            phase - core::f64::consts::PI
        } else {
            phase + core::f64::consts::PI
        };
    }
    let amplitude = baseline * visibility;
    let clamped = visibility > 1.0;
    let visibility = visibility.clamp(0.0, 1.0);

    let mut residual_sq = 0.0;
    for (&theta, &count) in angles.iter().zip(counts) {
        let model = baseline * (1.0 + (amplitude / baseline) * (2.0 * theta - phase).cos());
        residual_sq += (count - model) * (count - model);
    }

    Ok(FringeFit {
        visibility,
        phase,
        baseline,
        amplitude,
        residual_norm: residual_sq.sqrt(),
        clamped,
        degenerate: false,
    })
}

/// Entanglement witness `W = V_d/a + V_r/l`: the sum of the fringe
/// visibilities in the two mutually unbiased analysis bases. Separable
/// states obey `W ≤ 1`; both inputs are visibilities in `[0, 1]`.
pub fn witness(v_da: f64, v_rl: f64) -> f64 {
    v_da + v_rl
}

/// The four analyzer angles of a CHSH measurement.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChshSettings {
    /// First setting on side A.
    pub theta_a: f64,
    /// Second setting on side A.
    pub theta_a_prime: f64,
    /// First setting on side B.
    pub theta_b: f64,
    /// Second setting on side B.
    pub theta_b_prime: f64,
}

impl ChshSettings {
    /// Any four angles form a valid setting.
    pub fn new(theta_a: f64, theta_a_prime: f64, theta_b: f64, theta_b_prime: f64) -> Self {
        Self {
            theta_a,
            theta_a_prime,
            theta_b,
            theta_b_prime,
        }
    }

    /// The angle set `θ_A = 0, θ'_A = π/4, θ_B = π/8, θ'_B = 3π/8` that
    /// maximizes `|S|` for the OAM Bell states.
    pub fn optimal() -> Self {
        use core::f64::consts::PI;
        Self::new(0.0, PI / 4.0, PI / 8.0, 3.0 * PI / 8.0)
    }

    /// The four (θ_A, θ_B) pairs entering the S combination, in the order
    /// `(A,B), (A,B'), (A',B), (A',B')`.
    pub fn pairs(&self) -> [(f64, f64); 4] {
        [
            (self.theta_a, self.theta_b),
            (self.theta_a, self.theta_b_prime),
            (self.theta_a_prime, self.theta_b),
            (self.theta_a_prime, self.theta_b_prime),
        ]
    }
}

/// Correlation from the four coincidence counts
/// `[C(α,β), C(α+π/2, β+π/2), C(α+π/2, β), C(α, β+π/2)]`:
/// the first two count correlated outcomes, the last two anticorrelated, and
/// `E` is their normalized difference.
pub fn correlation_e(counts: &[f64; 4]) -> Result<f64> {
    debug_assert!(counts.iter().all(|&c| c >= 0.0));
    let total: f64 = counts.iter().sum();
    if total <= 0.0 {
        return Err(Error::UndefinedCorrelation);
    }
    Ok((counts[0] + counts[1] - counts[2] - counts[3]) / total)
}

/// A CHSH S value with its magnitude alongside: the sign of `S` depends on
/// which Bell state is measured, while the violation criterion `|S| > 2` does
/// not.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChshValue {
    /// The signed combination `E(A,B) − E(A,B') + E(A',B) + E(A',B')`.
    pub s: f64,
    /// `|S|`.
    pub s_abs: f64,
}

impl ChshValue {
    fn from_correlations(e: [f64; 4]) -> Self {
        let s = e[0] - e[1] + e[2] + e[3];
        Self { s, s_abs: s.abs() }
    }
}

/// The 4×4 block of coincidence counts for a CHSH evaluation: one row per
/// setting pair in [`ChshSettings::pairs`] order, each row in
/// [`correlation_e`] order.
pub type ChshCounts = [[f64; 4]; 4];

/// CHSH S from measured counts.
pub fn chsh_s_from_counts(counts: &ChshCounts) -> Result<ChshValue> {
    let mut e = [0.0f64; 4];
    for (slot, block) in e.iter_mut().zip(counts) {
        *slot = correlation_e(block)?;
    }
    Ok(ChshValue::from_correlations(e))
}

/// CHSH S from exact projection probabilities of a two-photon state, with
/// both analyzers sweeping mask angles.
pub fn chsh_s_from_state(settings: &ChshSettings, rho: &DensityMatrix) -> Result<ChshValue> {
    use core::f64::consts::FRAC_PI_2;
    let mut e = [0.0f64; 4];
    for (slot, (alpha, beta)) in e.iter_mut().zip(settings.pairs()) {
        let mut block = [0.0f64; 4];
        let shifts = [
            (0.0, 0.0),
            (FRAC_PI_2, FRAC_PI_2),
            (FRAC_PI_2, 0.0),
            (0.0, FRAC_PI_2),
        ];
        for (c, (da, db)) in block.iter_mut().zip(shifts) {
            let setting = MeasurementSetting::new(
                ProjectorSpec::Theta(alpha + da),
                ProjectorSpec::Theta(beta + db),
            );
            *c = coincidence_probability(rho, &setting)?;
        }
        *slot = correlation_e(&block)?;
    }
    Ok(ChshValue::from_correlations(e))
}

/// A metric with its bootstrap error bar.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricWithError {
    /// The metric evaluated on the original counts.
    pub value: f64,
    /// Standard deviation over the bootstrap resamples.
    pub sigma: f64,
    /// Number of resamples that contributed to `sigma`.
    pub resamples: u32,
}

impl MetricWithError {
    /// An exact (analytic-mode) value: zero error, no resamples.
    pub fn exact(value: f64) -> Self {
        Self {
            value,
            sigma: 0.0,
            resamples: 0,
        }
    }
}

/// Minimum resample count accepted by [`poisson_error`].
pub const MIN_RESAMPLES: u32 = 100;
/// Maximum resamples per bootstrap block (keeps block sub-streams disjoint).
pub const MAX_RESAMPLES: u32 = 1 << 24;

/// Parametric-bootstrap error propagation: every count is replaced by a
/// Poisson draw with that count as its mean, the metric is re-evaluated, and
/// `sigma` is the standard deviation over `resamples` such replays.
///
/// Resamples on which the metric fails are dropped (and counted); more than
/// 10% drops is an error. Resample `r` draws from the sub-stream
/// `(seed, Bootstrap, r)`, so results are deterministic per seed.
pub fn poisson_error<F>(
    metric: F,
    counts: &[u64],
    resamples: u32,
    seed: u64,
) -> Result<MetricWithError>
where
    F: Fn(&[u64]) -> Result<f64>,
{
    poisson_error_at(metric, counts, resamples, seed, 0)
}

/// [`poisson_error`] on a dedicated stream block: resample `r` of block `b`
/// draws from `(seed, Bootstrap, b·2²⁴ + r)`. A harness propagating several
/// metrics from one seed gives each its own block so no draw is shared.
pub fn poisson_error_at<F>(
    metric: F,
    counts: &[u64],
    resamples: u32,
    seed: u64,
    block: u64,
) -> Result<MetricWithError>
where
    F: Fn(&[u64]) -> Result<f64>,
{
    if resamples < MIN_RESAMPLES {
        return Err(Error::InvalidParameter(format!(
            "at least {MIN_RESAMPLES} resamples required, got {resamples}"
        )));
    }
    if resamples > MAX_RESAMPLES {
        return Err(Error::InvalidParameter(format!(
            "at most {MAX_RESAMPLES} resamples supported, got {resamples}"
        )));
    }
    let value = metric(counts)?;
    let mut values: Vec<f64> = Vec::with_capacity(resamples as usize);
    let mut dropped = 0usize;
    let mut scratch: Vec<u64> = Vec::with_capacity(counts.len());
    for r in 0..resamples {
        let index = block * MAX_RESAMPLES as u64 + r as u64;
        let mut rng = rng::substream(seed, StreamDomain::Bootstrap, index);
        scratch.clear();
        scratch.extend(counts.iter().map(|&n| rng::poisson(n as f64, &mut rng)));
        match metric(&scratch) {
            Ok(v) if v.is_finite() => values.push(v),
            _ => dropped += 1,
        }
    }
    if dropped as f64 > 0.1 * resamples as f64 {
        return Err(Error::ResampleFailure {
            dropped,
            requested: resamples as usize,
        });
    }
    let used = values.len();
    let mean = values.iter().sum::<f64>() / used as f64;
    let variance = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / used as f64;
    Ok(MetricWithError {
        value,
        sigma: variance.sqrt(),
        resamples: used as u32,
    })
}
