//! Sum-frequency-generation up-conversion physics.
//!
//! The two-mode interaction rotates the input photon mode into the converted
//! mode by the dimensionless area `ξt`; conversion preserves the OAM index, so
//! in the post-selected single-photon subspace the channel acts as the
//! identity with success probability `η = sin²(ξt)` times the apparatus
//! losses. The pump amplitude and χ⁽²⁾ behind `ξ` are not modeled separately.

use alloc::format;
use alloc::string::String;
use alloc::vec;

#[allow(unused_imports)]
use num_traits::Float;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::{DensityMatrix, Operator, Subsystem};

/// Interaction parameters of the up-conversion stage.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SfgParams {
    xi_t: f64,
    l: i32,
}

impl SfgParams {
    /// Validates `ξt ≥ 0`; `l` is the conserved OAM label of the converted mode.
    pub fn new(xi_t: f64, l: i32) -> Result<Self> {
        if !xi_t.is_finite() || xi_t < 0.0 {
            return Err(Error::InvalidParameter(format!(
                "interaction area ξt = {xi_t} must be finite and ≥ 0"
            )));
        }
        Ok(Self { xi_t, l })
    }

    /// The dimensionless interaction area ξ·t.
    pub fn xi_t(&self) -> f64 {
        self.xi_t
    }

    /// OAM index carried through the conversion.
    pub fn l(&self) -> i32 {
        self.l
    }
}

/// One multiplicative loss or efficiency factor of the apparatus.
#[derive(Debug, Clone, PartialEq)]
pub struct EfficiencyStage {
    name: String,
    eta: f64,
}

impl EfficiencyStage {
    /// Validates `0 ≤ η ≤ 1`.
    pub fn new(name: impl Into<String>, eta: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&eta) {
            return Err(Error::InvalidParameter(format!(
                "stage efficiency {eta} outside [0,1]"
            )));
        }
        Ok(Self {
            name: name.into(),
            eta,
        })
    }

    /// Stage label for reporting.
    pub fn name(&self) -> &str {
        &self.name
    }

    /// Transmittance / efficiency of this stage.
    pub fn eta(&self) -> f64 {
        self.eta
    }
}

/// Source bandwidth and crystal acceptance bandwidth, both in nanometers.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralWindows {
    bw_source_nm: f64,
    bw_sfg_nm: f64,
}

impl SpectralWindows {
    /// Validates both bandwidths positive.
    pub fn new(bw_source_nm: f64, bw_sfg_nm: f64) -> Result<Self> {
        let positive = |x: f64| x.is_finite() && x > 0.0;
        if !positive(bw_source_nm) || !positive(bw_sfg_nm) {
            return Err(Error::InvalidParameter(format!(
                "bandwidths must be positive, got source {bw_source_nm} nm, acceptance {bw_sfg_nm} nm"
            )));
        }
        Ok(Self {
            bw_source_nm,
            bw_sfg_nm,
        })
    }

    /// Photon-source bandwidth in nm.
    pub fn bw_source_nm(&self) -> f64 {
        self.bw_source_nm
    }

    /// Crystal acceptance bandwidth in nm.
    pub fn bw_sfg_nm(&self) -> f64 {
        self.bw_sfg_nm
    }
}

/// Heisenberg-picture rotation of the (input, converted) mode pair:
/// `[[cos ξt, −sin ξt], [sin ξt, cos ξt]]`.
pub fn sfg_mode_rotation(p: &SfgParams) -> Operator {
    let (s, c) = p.xi_t().sin_cos();
    Operator::new(
        2,
        vec![
            Complex64::new(c, 0.0),
            Complex64::new(-s, 0.0),
            Complex64::new(s, 0.0),
            Complex64::new(c, 0.0),
        ],
    )
    .expect("2×2 shape")
}

/// Probability that the input photon leaves in the converted mode, `sin²(ξt)`.
///
/// Complete conversion happens at `ξt = π/2`.
pub fn conversion_efficiency(p: &SfgParams) -> f64 {
    p.xi_t().sin().powi(2)
}

/// The heralded conversion channel: the state is unchanged (OAM content is
/// transferred intact) and conversion succeeds with probability `eta` for the
/// photon in `converted`.
///
/// The subsystem label feeds bookkeeping only; the post-selected state does
/// not depend on which arm was converted.
pub fn apply_conversion(
    rho: &DensityMatrix,
    eta: f64,
    converted: Subsystem,
) -> Result<(DensityMatrix, f64)> {
    if !(0.0..=1.0).contains(&eta) {
        return Err(Error::InvalidParameter(format!(
            "conversion efficiency {eta} outside [0,1]"
        )));
    }
    let _ = converted;
    Ok((rho.clone(), eta))
}

/// Fraction of source photons inside the crystal acceptance window under a
/// flat-top bandwidth model: `min(1, bw_sfg / bw_source)`.
pub fn spectral_acceptance(w: &SpectralWindows) -> f64 {
    (w.bw_sfg_nm() / w.bw_source_nm()).min(1.0)
}

/// Product of the per-stage efficiencies; 1 for an empty chain.
pub fn efficiency_budget(stages: &[EfficiencyStage]) -> f64 {
    stages.iter().map(EfficiencyStage::eta).product()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::fidelity;
    use crate::states::{bell_state, BellKind};
    use approx::assert_abs_diff_eq;
    use core::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4};

    #[test]
    fn rotation_endpoints_identity_and_swap() {
        let id = sfg_mode_rotation(&SfgParams::new(0.0, 1).unwrap());
        assert_abs_diff_eq!(id.entry(0, 0).re, 1.0);
        assert_abs_diff_eq!(id.entry(0, 1).re, 0.0);

        let swap = sfg_mode_rotation(&SfgParams::new(FRAC_PI_2, 1).unwrap());
        assert_abs_diff_eq!(swap.entry(0, 0).re, 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(swap.entry(1, 0).re, 1.0, epsilon = 1e-15);

        let half = sfg_mode_rotation(&SfgParams::new(FRAC_PI_4, 1).unwrap());
        assert_abs_diff_eq!(half.entry(0, 0).re, FRAC_1_SQRT_2, epsilon = 1e-15);
        assert_abs_diff_eq!(half.entry(1, 1).re, FRAC_1_SQRT_2, epsilon = 1e-15);
    }

    #[test]
    fn rotation_is_orthogonal_for_random_areas() {
        for k in 0..100 {
            let xi_t = k as f64 * 0.137 + 0.01;
            let r = sfg_mode_rotation(&SfgParams::new(xi_t, 1).unwrap());
            // RᵀR = I, i.e. photon number is conserved by the mode rotation.
            for i in 0..2 {
                for j in 0..2 {
                    let mut acc = Complex64::ZERO;
                    for k2 in 0..2 {
                        acc += r.entry(k2, i).conj() * r.entry(k2, j);
                    }
                    let want = if i == j { 1.0 } else { 0.0 };
                    assert_abs_diff_eq!(acc.re, want, epsilon = 1e-12);
                    assert_abs_diff_eq!(acc.im, 0.0, epsilon = 1e-12);
                }
            }
            assert_abs_diff_eq!(
                conversion_efficiency(&SfgParams::new(xi_t, 1).unwrap()) + xi_t.cos().powi(2),
                1.0,
                epsilon = 1e-12
            );
        }
    }

    #[test]
    fn efficiency_endpoints() {
        assert_abs_diff_eq!(
            conversion_efficiency(&SfgParams::new(FRAC_PI_2, 1).unwrap()),
            1.0
        );
        assert_abs_diff_eq!(conversion_efficiency(&SfgParams::new(0.0, 1).unwrap()), 0.0);
        assert_abs_diff_eq!(
            conversion_efficiency(&SfgParams::new(FRAC_PI_4, 1).unwrap()),
            0.5,
            epsilon = 1e-15
        );
    }

    #[test]
    fn conversion_preserves_state_and_reports_probability() {
        let phi = bell_state(BellKind::OamMinus);
        let rho = phi.density();
        let (out, p) = apply_conversion(&rho, 0.002, Subsystem::First).unwrap();
        assert_eq!(out, rho);
        assert_abs_diff_eq!(p, 0.002);
        assert_abs_diff_eq!(fidelity(&out, &phi).unwrap(), fidelity(&rho, &phi).unwrap());

        let mixed = DensityMatrix::maximally_mixed(2).unwrap();
        let (out, p) = apply_conversion(&mixed, 0.5, Subsystem::First).unwrap();
        assert_eq!(out, mixed);
        assert_abs_diff_eq!(p, 0.5);

        assert!(apply_conversion(&mixed, 1.2, Subsystem::First).is_err());
    }

    #[test]
    fn spectral_acceptance_flat_top_ratios() {
        assert_abs_diff_eq!(
            spectral_acceptance(&SpectralWindows::new(2.5, 0.5).unwrap()),
            0.2,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            spectral_acceptance(&SpectralWindows::new(1.0, 1.0).unwrap()),
            1.0
        );
        assert_abs_diff_eq!(
            spectral_acceptance(&SpectralWindows::new(2.5, 1.0).unwrap()),
            0.4,
            epsilon = 1e-15
        );
        // Acceptance wider than the source saturates at 1.
        assert_abs_diff_eq!(
            spectral_acceptance(&SpectralWindows::new(0.5, 2.5).unwrap()),
            1.0
        );
    }

    #[test]
    fn efficiency_budget_reproduces_apparatus_chains() {
        let signal = [
            EfficiencyStage::new("collection", 0.26).unwrap(),
            EfficiencyStage::new("mode conversion", 0.80).unwrap(),
            EfficiencyStage::new("quantum conversion", 0.002).unwrap(),
            EfficiencyStage::new("mode detection", 0.48).unwrap(),
            EfficiencyStage::new("detector", 0.50).unwrap(),
        ];
        let total = efficiency_budget(&signal);
        assert!(
            (total - 1.0e-4).abs() / 1.0e-4 < 0.05,
            "signal chain {total:e}"
        );

        let idler = [
            EfficiencyStage::new("collection", 0.26).unwrap(),
            EfficiencyStage::new("mode converter", 0.40).unwrap(),
            EfficiencyStage::new("mode detection", 0.50).unwrap(),
            EfficiencyStage::new("detector", 0.20).unwrap(),
        ];
        let total = efficiency_budget(&idler);
        assert!((total - 0.01).abs() / 0.01 < 0.05, "idler chain {total:e}");

        assert_abs_diff_eq!(efficiency_budget(&[]), 1.0);
    }

    #[test]
    fn efficiency_budget_is_order_invariant() {
        let stages = [
            EfficiencyStage::new("a", 0.3).unwrap(),
            EfficiencyStage::new("b", 0.7).unwrap(),
            EfficiencyStage::new("c", 0.11).unwrap(),
        ];
        let permuted = [stages[2].clone(), stages[0].clone(), stages[1].clone()];
        assert_abs_diff_eq!(efficiency_budget(&stages), efficiency_budget(&permuted));
    }

    #[test]
    fn stage_rejects_out_of_range_eta() {
        assert!(EfficiencyStage::new("bad", 1.01).is_err());
        assert!(EfficiencyStage::new("bad", -0.01).is_err());
        assert!(SpectralWindows::new(0.0, 1.0).is_err());
    }
}
