//! Projective coincidence measurement with realistic noise.
//!
//! A measurement setting is a pair of single-photon projectors, one per arm.
//! The simulation chain for one record is
//!
//! 1. Werner-mix the state ([`apply_noise_state`]) — imperfect preparation;
//! 2. cross-talk-mix each projector ([`projector_with_crosstalk`]) — imperfect
//!    mode filtering on the SLMs;
//! 3. expected counts = probability × pair rate × duration, plus the uniform
//!    accidental background of the coincidence window;
//! 4. optionally draw the observed counts from a Poisson distribution on a
//!    per-record RNG sub-stream;
//! 5. subtract the accidental estimate back out for the "net" figures.

use alloc::format;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::linalg::{DensityMatrix, Ket, Operator};
use crate::rng::{self, StreamDomain};
use crate::states::{theta_state, BasisLabel, ThetaSetting};

/// What one analyzer projects onto: a named basis state or a phase-mask angle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ProjectorSpec {
    /// A named basis state (`R/L/H/V/A/D` for OAM, `h/v/d/a/r/l` for polarization).
    Basis(BasisLabel),
    /// The mask-rotation state `|θ⟩` at this angle in radians.
    Theta(f64),
}

impl ProjectorSpec {
    /// The normalized state this spec projects onto.
    pub fn ket(&self) -> Ket {
        match self {
            ProjectorSpec::Basis(label) => label.ket(),
            ProjectorSpec::Theta(theta) => theta_state(ThetaSetting::new(*theta)),
        }
    }
}

/// A projector pair, one spec per photon; `side_a` addresses the first-listed
/// tensor factor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeasurementSetting {
    /// Projector on the first subsystem.
    pub side_a: ProjectorSpec,
    /// Projector on the second subsystem.
    pub side_b: ProjectorSpec,
}

impl MeasurementSetting {
    /// Pairs two projector specs.
    pub fn new(side_a: ProjectorSpec, side_b: ProjectorSpec) -> Self {
        Self { side_a, side_b }
    }
}

/// Detector and state-imperfection parameters for one run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseModel {
    singles_a: f64,
    singles_b: f64,
    coincidence_window_s: f64,
    werner_v: f64,
    crosstalk_eps: f64,
}

impl NoiseModel {
    /// Validates all rates non-negative and both mixing weights in `[0, 1]`.
    ///
    /// `singles_a/b` are the uncorrelated singles rates (counts/s) behind the
    /// accidental background, `coincidence_window_s` the coincidence gate,
    /// `werner_v` the state-mixing visibility applied before measurement, and
    /// `crosstalk_eps` the probability that a projector leaks into its
    /// orthogonal complement.
    pub fn new(
        singles_a: f64,
        singles_b: f64,
        coincidence_window_s: f64,
        werner_v: f64,
        crosstalk_eps: f64,
    ) -> Result<Self> {
        let rate_ok = |x: f64| x.is_finite() && x >= 0.0;
        if !rate_ok(singles_a) || !rate_ok(singles_b) {
            return Err(Error::InvalidParameter(format!(
                "singles rates must be finite and ≥ 0, got ({singles_a}, {singles_b})"
            )));
        }
        if !rate_ok(coincidence_window_s) {
            return Err(Error::InvalidParameter(format!(
                "coincidence window {coincidence_window_s} s must be finite and ≥ 0"
            )));
        }
        if !(0.0..=1.0).contains(&werner_v) {
            return Err(Error::InvalidParameter(format!(
                "werner_v {werner_v} outside [0,1]"
            )));
        }
        if !(0.0..=1.0).contains(&crosstalk_eps) {
            return Err(Error::InvalidParameter(format!(
                "crosstalk_eps {crosstalk_eps} outside [0,1]"
            )));
        }
        Ok(Self {
            singles_a,
            singles_b,
            coincidence_window_s,
            werner_v,
            crosstalk_eps,
        })
    }

    /// A noiseless model: no singles, no mixing, no cross-talk.
    pub fn ideal() -> Self {
        Self {
            singles_a: 0.0,
            singles_b: 0.0,
            coincidence_window_s: 0.0,
            werner_v: 1.0,
            crosstalk_eps: 0.0,
        }
    }

    /// Singles rate on the first arm (counts/s).
    pub fn singles_a(&self) -> f64 {
        self.singles_a
    }

    /// Singles rate on the second arm (counts/s).
    pub fn singles_b(&self) -> f64 {
        self.singles_b
    }

    /// Coincidence gate in seconds.
    pub fn coincidence_window_s(&self) -> f64 {
        self.coincidence_window_s
    }

    /// State-mixing visibility.
    pub fn werner_v(&self) -> f64 {
        self.werner_v
    }

    /// Projector leak probability.
    pub fn crosstalk_eps(&self) -> f64 {
        self.crosstalk_eps
    }

    /// Copy of this model with a different Werner visibility.
    pub fn with_werner_v(&self, v: f64) -> Result<Self> {
        Self::new(
            self.singles_a,
            self.singles_b,
            self.coincidence_window_s,
            v,
            self.crosstalk_eps,
        )
    }
}

/// One simulated acquisition: the setting, what was expected, what was
/// drawn, and the background bookkeeping.
#[derive(Debug, Clone, PartialEq)]
pub struct CoincidenceRecord {
    setting: MeasurementSetting,
    duration_s: f64,
    expected: f64,
    sampled: Option<u64>,
    accidental: f64,
    net: f64,
    clamped: bool,
}

impl CoincidenceRecord {
    /// Expectation-only record (analytic mode): no Poisson draw, net is the
    /// signal expectation itself.
    pub fn analytic(
        setting: MeasurementSetting,
        duration_s: f64,
        expected_signal: f64,
        accidental: f64,
    ) -> Self {
        Self {
            setting,
            duration_s,
            expected: expected_signal + accidental,
            sampled: None,
            accidental,
            net: expected_signal,
            clamped: false,
        }
    }

    /// Sampled record: draws Poisson(expected_signal + accidental) on the
    /// sub-stream `(seed, Record, record_index)` and subtracts the background.
    pub fn sample(
        setting: MeasurementSetting,
        duration_s: f64,
        expected_signal: f64,
        accidental: f64,
        seed: u64,
        record_index: u64,
    ) -> Self {
        let expected = expected_signal + accidental;
        let draw = sample_counts(expected, seed, record_index);
        let (net, clamped) = subtract_background(draw, accidental);
        Self {
            setting,
            duration_s,
            expected,
            sampled: Some(draw),
            accidental,
            net,
            clamped,
        }
    }

    /// The projector pair measured.
    pub fn setting(&self) -> &MeasurementSetting {
        &self.setting
    }

    /// Acquisition time in seconds.
    pub fn duration_s(&self) -> f64 {
        self.duration_s
    }

    /// Expected counts including the accidental background.
    pub fn expected(&self) -> f64 {
        self.expected
    }

    /// The Poisson draw, if this record was sampled.
    pub fn sampled(&self) -> Option<u64> {
        self.sampled
    }

    /// Expected accidental background counts.
    pub fn accidental(&self) -> f64 {
        self.accidental
    }

    /// Raw counts: the draw in sampled mode, the expectation otherwise.
    pub fn raw(&self) -> f64 {
        self.sampled.map(|s| s as f64).unwrap_or(self.expected)
    }

    /// Background-subtracted counts, floored at zero.
    pub fn net(&self) -> f64 {
        self.net
    }

    /// Whether the zero floor was hit during background subtraction.
    pub fn clamped(&self) -> bool {
        self.clamped
    }
}

/// The rank-1 projector |χ⟩⟨χ| for a projector spec.
pub fn projector(spec: &ProjectorSpec) -> Operator {
    Operator::projector_onto(&spec.ket())
}

/// A leaky analyzer: `(1−ε)·P + ε·P⊥`.
pub fn projector_with_crosstalk(spec: &ProjectorSpec, eps: f64) -> Result<Operator> {
    if !(0.0..=1.0).contains(&eps) {
        return Err(Error::InvalidParameter(format!(
            "crosstalk ε = {eps} outside [0,1]"
        )));
    }
    let p = projector(spec);
    let complement = Operator::identity(p.dim())?.linear_combination(1.0, &p, -1.0)?;
    p.linear_combination(1.0 - eps, &complement, eps)
}

/// Probability of a coincidence: `tr(ρ · P_A ⊗ P_B)`.
pub fn coincidence_probability(rho: &DensityMatrix, setting: &MeasurementSetting) -> Result<f64> {
    if rho.dim() != 4 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            got: rho.dim(),
        });
    }
    let pair = projector(&setting.side_a).tensor(&projector(&setting.side_b))?;
    let p = rho.expectation(&pair)?;
    debug_assert!(
        p.im.abs() < 1e-10,
        "probability picked up imaginary part {:e}",
        p.im
    );
    Ok(p.re.clamp(0.0, 1.0))
}

/// Coincidence probability with the full noise model applied: Werner-mixed
/// state and cross-talk-mixed projectors on both arms.
pub fn noisy_coincidence_probability(
    rho: &DensityMatrix,
    setting: &MeasurementSetting,
    noise: &NoiseModel,
) -> Result<f64> {
    let mixed = apply_noise_state(rho, noise)?;
    let pa = projector_with_crosstalk(&setting.side_a, noise.crosstalk_eps())?;
    let pb = projector_with_crosstalk(&setting.side_b, noise.crosstalk_eps())?;
    let p = mixed.expectation(&pa.tensor(&pb)?)?;
    Ok(p.re.clamp(0.0, 1.0))
}

/// Probability of projecting a single qubit: `⟨χ|ρ|χ⟩` (heralded, the other
/// arm unanalyzed).
pub fn projection_probability(rho: &DensityMatrix, spec: &ProjectorSpec) -> Result<f64> {
    if rho.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: rho.dim(),
        });
    }
    let p = rho.expectation(&projector(spec))?;
    Ok(p.re.clamp(0.0, 1.0))
}

/// Single-qubit projection probability under the noise model.
pub fn noisy_projection_probability(
    rho: &DensityMatrix,
    spec: &ProjectorSpec,
    noise: &NoiseModel,
) -> Result<f64> {
    let mixed = apply_noise_state(rho, noise)?;
    let p = mixed.expectation(&projector_with_crosstalk(spec, noise.crosstalk_eps())?)?;
    Ok(p.re.clamp(0.0, 1.0))
}

/// Werner mixing `ρ → V·ρ + (1−V)·I/dim` with `V` from the noise model.
pub fn apply_noise_state(rho: &DensityMatrix, noise: &NoiseModel) -> Result<DensityMatrix> {
    let mixed = DensityMatrix::maximally_mixed(rho.dim())?;
    rho.mix(&mixed, noise.werner_v())
}

/// Expected signal coincidences: probability × pair rate × duration.
///
/// All inputs are expected non-negative.
pub fn expected_counts(probability: f64, pair_rate: f64, duration_s: f64) -> f64 {
    debug_assert!(probability >= 0.0 && pair_rate >= 0.0 && duration_s >= 0.0);
    probability * pair_rate * duration_s
}

/// Expected accidental coincidences from uncorrelated singles:
/// `singles_a · singles_b · window · duration`.
pub fn accidental_coincidences(noise: &NoiseModel, duration_s: f64) -> f64 {
    debug_assert!(duration_s >= 0.0);
    noise.singles_a() * noise.singles_b() * noise.coincidence_window_s() * duration_s
}

/// One Poisson draw with mean `expected` on the record sub-stream
/// `(seed, record_index)`; identical arguments give identical counts.
pub fn sample_counts(expected: f64, seed: u64, record_index: u64) -> u64 {
    let mut rng = rng::substream(seed, StreamDomain::Record, record_index);
    rng::poisson(expected, &mut rng)
}

/// `max(0, raw − accidental)` and whether the floor was hit.
pub fn subtract_background(raw: u64, accidental: f64) -> (f64, bool) {
    debug_assert!(accidental >= 0.0);
    let diff = raw as f64 - accidental;
    if diff < 0.0 {
        (0.0, true)
    } else {
        (diff, false)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::trace_distance;
    use crate::states::{bell_state, BellKind};
    use alloc::vec::Vec;
    use approx::assert_abs_diff_eq;
    use core::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};
    use num_complex::Complex64;
    use rand_chacha::ChaCha12Rng;

    fn random_ket(dim: usize, rng: &mut ChaCha12Rng) -> Ket {
        let amps: Vec<Complex64> = (0..dim)
            .map(|_| Complex64::new(rng::uniform(rng) - 0.5, rng::uniform(rng) - 0.5))
            .collect();
        Ket::normalized(amps).unwrap()
    }

    #[test]
    fn projector_for_r_is_diagonal() {
        let p = projector(&ProjectorSpec::Basis(BasisLabel::OamR));
        assert_abs_diff_eq!(p.entry(0, 0).re, 1.0);
        assert_abs_diff_eq!(p.entry(1, 1).re, 0.0);
        assert_abs_diff_eq!(p.entry(0, 1).norm(), 0.0);
    }

    #[test]
    fn projector_for_a_matches_chi4_outer_product() {
        // χ₄ = (1, −i)/√2 → |χ₄⟩⟨χ₄| = ½ [[1, i], [−i, 1]]
        let p = projector(&ProjectorSpec::Basis(BasisLabel::OamA));
        assert_abs_diff_eq!(p.entry(0, 0).re, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(p.entry(0, 1).im, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(p.entry(1, 0).im, -0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(p.entry(1, 1).re, 0.5, epsilon = 1e-15);
    }

    #[test]
    fn theta_projector_matches_state_outer_product() {
        let spec = ProjectorSpec::Theta(PI / 8.0);
        let p = projector(&spec);
        let direct = Operator::projector_onto(&theta_state(ThetaSetting::new(PI / 8.0)));
        for (a, b) in p.entries().iter().zip(direct.entries()) {
            assert!((a - b).norm() < 1e-15);
        }
    }

    #[test]
    fn projector_is_hermitian_idempotent() {
        let p = projector(&ProjectorSpec::Theta(0.7));
        for i in 0..2 {
            for j in 0..2 {
                assert!((p.entry(i, j) - p.entry(j, i).conj()).norm() < 1e-15);
                let mut sq = Complex64::ZERO;
                for k in 0..2 {
                    sq += p.entry(i, k) * p.entry(k, j);
                }
                assert!((sq - p.entry(i, j)).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn singlet_fringe_probabilities() {
        let rho = bell_state(BellKind::OamMinus).density();
        let perpendicular =
            MeasurementSetting::new(ProjectorSpec::Theta(FRAC_PI_2), ProjectorSpec::Theta(0.0));
        assert_abs_diff_eq!(
            coincidence_probability(&rho, &perpendicular).unwrap(),
            0.5,
            epsilon = 1e-12
        );
        let parallel =
            MeasurementSetting::new(ProjectorSpec::Theta(0.3), ProjectorSpec::Theta(0.3));
        assert_abs_diff_eq!(
            coincidence_probability(&rho, &parallel).unwrap(),
            0.0,
            epsilon = 1e-12
        );
    }

    #[test]
    fn hybrid_fringe_probability_at_zero_angle() {
        let rho = bell_state(BellKind::HybridPlus).density();
        let s = MeasurementSetting::new(
            ProjectorSpec::Basis(BasisLabel::PolD),
            ProjectorSpec::Theta(0.0),
        );
        assert_abs_diff_eq!(
            coincidence_probability(&rho, &s).unwrap(),
            0.5,
            epsilon = 1e-12
        );
    }

    #[test]
    fn singlet_fringe_law_at_200_random_angle_pairs() {
        let rho = bell_state(BellKind::OamMinus).density();
        let mut rng = rng::substream(77, StreamDomain::Record, 0);
        for _ in 0..200 {
            let ta = (rng::uniform(&mut rng) - 0.5) * 4.0 * PI;
            let tb = (rng::uniform(&mut rng) - 0.5) * 4.0 * PI;
            let s = MeasurementSetting::new(ProjectorSpec::Theta(ta), ProjectorSpec::Theta(tb));
            let p = coincidence_probability(&rho, &s).unwrap();
            assert_abs_diff_eq!(p, (ta - tb).sin().powi(2) / 2.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn four_outcome_probabilities_are_complete() {
        let mut rng = rng::substream(5, StreamDomain::Record, 1);
        for trial in 0..50 {
            let a = random_ket(4, &mut rng);
            let b = random_ket(4, &mut rng);
            let rho = a
                .density()
                .mix(&b.density(), 0.3 + 0.4 * (trial as f64 / 50.0))
                .unwrap();
            let ta = rng::uniform(&mut rng) * PI;
            let tb = rng::uniform(&mut rng) * PI;
            let total: f64 = [
                (ta, tb),
                (ta, tb + FRAC_PI_2),
                (ta + FRAC_PI_2, tb),
                (ta + FRAC_PI_2, tb + FRAC_PI_2),
            ]
            .iter()
            .map(|&(x, y)| {
                let s = MeasurementSetting::new(ProjectorSpec::Theta(x), ProjectorSpec::Theta(y));
                coincidence_probability(&rho, &s).unwrap()
            })
            .sum();
            assert_abs_diff_eq!(total, 1.0, epsilon = 1e-12);
        }
    }

    #[test]
    fn werner_mixing_endpoints() {
        let rho = bell_state(BellKind::OamMinus).density();
        let identity_map = apply_noise_state(&rho, &NoiseModel::ideal()).unwrap();
        assert!(trace_distance(&identity_map, &rho).unwrap() < 1e-15);

        let fully_mixed =
            apply_noise_state(&rho, &NoiseModel::new(0.0, 0.0, 0.0, 0.0, 0.0).unwrap()).unwrap();
        assert!(
            trace_distance(&fully_mixed, &DensityMatrix::maximally_mixed(4).unwrap()).unwrap()
                < 1e-15
        );
    }

    #[test]
    fn werner_mixing_preserves_density_matrix_invariants() {
        let rho = bell_state(BellKind::HybridPlus).density();
        for k in 0..=10 {
            let v = k as f64 / 10.0;
            let noise = NoiseModel::new(100.0, 100.0, 1.6e-9, v, 0.0).unwrap();
            let out = apply_noise_state(&rho, &noise).unwrap();
            assert!((out.trace().re - 1.0).abs() < 1e-12);
            assert!(out.min_eigenvalue() > -1e-12);
            // Re-validate through the strict constructor.
            assert!(DensityMatrix::new(4, out.entries().to_vec()).is_ok());
        }
    }

    #[test]
    fn crosstalk_mixes_toward_complement() {
        let spec = ProjectorSpec::Basis(BasisLabel::OamR);
        let leaky = projector_with_crosstalk(&spec, 0.1).unwrap();
        assert_abs_diff_eq!(leaky.entry(0, 0).re, 0.9, epsilon = 1e-15);
        assert_abs_diff_eq!(leaky.entry(1, 1).re, 0.1, epsilon = 1e-15);
        assert!(projector_with_crosstalk(&spec, 1.5).is_err());
    }

    #[test]
    fn expected_counts_arithmetic() {
        assert_abs_diff_eq!(expected_counts(0.5, 10.0, 100.0), 500.0);
        assert_abs_diff_eq!(expected_counts(0.0, 123.0, 456.0), 0.0);
        let fringe_probability = (FRAC_PI_4 / 2.0).sin().powi(2) / 2.0;
        assert_abs_diff_eq!(
            expected_counts(fringe_probability, 2.0, 900.0),
            131.8,
            epsilon = 0.05
        );
    }

    #[test]
    fn accidental_background_formula() {
        let n = NoiseModel::new(1.0e4, 1.0e4, 1.6e-9, 1.0, 0.0).unwrap();
        assert_abs_diff_eq!(accidental_coincidences(&n, 100.0), 16.0, epsilon = 1e-9);
        let n = NoiseModel::new(1.0e3, 1.0e4, 1.6e-9, 1.0, 0.0).unwrap();
        assert_abs_diff_eq!(accidental_coincidences(&n, 900.0), 14.4, epsilon = 1e-9);
        let no_window = NoiseModel::new(1.0e4, 1.0e4, 0.0, 1.0, 0.0).unwrap();
        assert_abs_diff_eq!(accidental_coincidences(&no_window, 100.0), 0.0);
    }

    #[test]
    fn sampling_is_bit_reproducible() {
        assert_eq!(sample_counts(0.0, 1, 0), 0);
        let a = sample_counts(740.0, 99, 3);
        let b = sample_counts(740.0, 99, 3);
        assert_eq!(a, b);
        // Different record index, different draw stream.
        let c = sample_counts(740.0, 99, 4);
        let d = sample_counts(740.0, 100, 3);
        assert!(a != c || a != d);
    }

    #[test]
    fn sample_counts_moments_at_paper_scale() {
        // Poisson(500): mean within 1%, variance within 3% over 1e5 draws.
        let n = 100_000u64;
        let mut sum = 0.0;
        let mut sum_sq = 0.0;
        for i in 0..n {
            let k = sample_counts(500.0, 2024, i) as f64;
            sum += k;
            sum_sq += k * k;
        }
        let mean = sum / n as f64;
        let var = sum_sq / n as f64 - mean * mean;
        assert!((mean - 500.0).abs() / 500.0 < 0.01, "mean {mean}");
        assert!((var - 500.0).abs() / 500.0 < 0.03, "variance {var}");
    }

    #[test]
    fn background_subtraction_clamps_at_zero() {
        assert_eq!(subtract_background(100, 16.0), (84.0, false));
        assert_eq!(subtract_background(10, 16.0), (0.0, true));
        assert_eq!(subtract_background(500, 0.0), (500.0, false));
    }

    #[test]
    fn records_carry_raw_and_net_views() {
        let setting = MeasurementSetting::new(ProjectorSpec::Theta(0.0), ProjectorSpec::Theta(0.4));
        let analytic = CoincidenceRecord::analytic(setting, 100.0, 250.0, 16.0);
        assert_abs_diff_eq!(analytic.expected(), 266.0);
        assert_abs_diff_eq!(analytic.raw(), 266.0);
        assert_abs_diff_eq!(analytic.net(), 250.0);
        assert!(!analytic.clamped());
        assert_eq!(analytic.sampled(), None);

        let sampled = CoincidenceRecord::sample(setting, 100.0, 250.0, 16.0, 7, 0);
        let again = CoincidenceRecord::sample(setting, 100.0, 250.0, 16.0, 7, 0);
        assert_eq!(sampled, again);
        assert_abs_diff_eq!(sampled.net(), sampled.raw() - 16.0, epsilon = 1e-12);
    }
}
