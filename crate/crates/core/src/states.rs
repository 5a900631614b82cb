//! Constructors for the named states of the experiment.
//!
//! Single-qubit bases use a fixed ordering: an OAM qubit is spanned by
//! `|R⟩ = |l⟩` and `|L⟩ = |−l⟩` (in that order), a polarization qubit by
//! `|h⟩` and `|v⟩`. The derived bases are
//!
//! | OAM | vector | polarization | vector |
//! |-----|--------|--------------|--------|
//! | `H` | `(1, 1)/√2` | `d` | `(1, 1)/√2` |
//! | `V` | `(1, −1)/√2` | `a` | `(1, −1)/√2` |
//! | `D` | `(1, i)/√2` | `l` | `(1, i)/√2` |
//! | `A` | `(1, −i)/√2` | `r` | `(1, −i)/√2` |
//!
//! Two-photon states compose left-to-right: the first-listed subsystem is the
//! slow Kronecker index, so the hybrid Bell states live in the
//! `(hR, hL, vR, vL)` ordering and the OAM Bell states in `(RR, RL, LR, LL)`.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use core::f64::consts::{FRAC_1_SQRT_2, PI};
use core::str::FromStr;

#[allow(unused_imports)]
use num_traits::Float;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg::Ket;

/// A named single-qubit basis state. Uppercase labels are OAM states over
/// `(R, L)`, lowercase labels polarization states over `(h, v)`; the two
/// vocabularies share amplitude tables but tag different physical carriers.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BasisLabel {
    /// `|R⟩ = |l⟩`, the positive-charge OAM eigenmode.
    OamR,
    /// `|L⟩ = |−l⟩`.
    OamL,
    /// `|H⟩ = (|R⟩ + |L⟩)/√2`.
    OamH,
    /// `|V⟩ = (|R⟩ − |L⟩)/√2`.
    OamV,
    /// `|D⟩ = (|R⟩ + i|L⟩)/√2`.
    OamD,
    /// `|A⟩ = (|R⟩ − i|L⟩)/√2`.
    OamA,
    /// Horizontal polarization `|h⟩`.
    PolH,
    /// Vertical polarization `|v⟩`.
    PolV,
    /// Diagonal `|d⟩ = (|h⟩ + |v⟩)/√2`.
    PolD,
    /// Anti-diagonal `|a⟩ = (|h⟩ − |v⟩)/√2`.
    PolA,
    /// Right circular `|r⟩ = (|h⟩ − i|v⟩)/√2`.
    PolR,
    /// Left circular `|l⟩ = (|h⟩ + i|v⟩)/√2`.
    PolL,
}

impl BasisLabel {
    /// The normalized state vector for this label.
    pub fn ket(self) -> Ket {
        let s = FRAC_1_SQRT_2;
        let (a, b) = match self {
            BasisLabel::OamR | BasisLabel::PolH => (Complex64::new(1.0, 0.0), Complex64::ZERO),
            BasisLabel::OamL | BasisLabel::PolV => (Complex64::ZERO, Complex64::new(1.0, 0.0)),
            BasisLabel::OamH | BasisLabel::PolD => (Complex64::new(s, 0.0), Complex64::new(s, 0.0)),
            BasisLabel::OamV | BasisLabel::PolA => {
                (Complex64::new(s, 0.0), Complex64::new(-s, 0.0))
            }
            BasisLabel::OamD | BasisLabel::PolL => (Complex64::new(s, 0.0), Complex64::new(0.0, s)),
            BasisLabel::OamA | BasisLabel::PolR => {
                (Complex64::new(s, 0.0), Complex64::new(0.0, -s))
            }
        };
        Ket::new(vec![a, b]).expect("basis tables are normalized")
    }

    /// Canonical one-letter text form (case carries the OAM/polarization tag).
    pub fn as_str(self) -> &'static str {
        match self {
            BasisLabel::OamR => "R",
            BasisLabel::OamL => "L",
            BasisLabel::OamH => "H",
            BasisLabel::OamV => "V",
            BasisLabel::OamD => "D",
            BasisLabel::OamA => "A",
            BasisLabel::PolH => "h",
            BasisLabel::PolV => "v",
            BasisLabel::PolD => "d",
            BasisLabel::PolA => "a",
            BasisLabel::PolR => "r",
            BasisLabel::PolL => "l",
        }
    }
}

impl FromStr for BasisLabel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "R" => Ok(BasisLabel::OamR),
            "L" => Ok(BasisLabel::OamL),
            "H" => Ok(BasisLabel::OamH),
            "V" => Ok(BasisLabel::OamV),
            "D" => Ok(BasisLabel::OamD),
            "A" => Ok(BasisLabel::OamA),
            "h" => Ok(BasisLabel::PolH),
            "v" => Ok(BasisLabel::PolV),
            "d" => Ok(BasisLabel::PolD),
            "a" => Ok(BasisLabel::PolA),
            "r" => Ok(BasisLabel::PolR),
            "l" => Ok(BasisLabel::PolL),
            other => Err(Error::UnknownLabel(String::from(other))),
        }
    }
}

/// Amplitudes of an OAM qubit `α|l⟩ + β|−l⟩`.
///
/// The topological charge `l` is carried as metadata only: every process in
/// scope treats `+l` and `−l` symmetrically, so the amplitudes never depend
/// on its magnitude.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QubitSpec {
    alpha: Complex64,
    beta: Complex64,
    l: i32,
}

impl QubitSpec {
    /// Validates `|α|² + |β|² = 1` (within the input tolerance) and stores the
    /// amplitudes renormalized, with topological charge `l = 1`.
    pub fn new(alpha: Complex64, beta: Complex64) -> Result<Self> {
        Self::with_charge(alpha, beta, 1)
    }

    /// Same as [`QubitSpec::new`] with an explicit charge.
    pub fn with_charge(alpha: Complex64, beta: Complex64, l: i32) -> Result<Self> {
        let norm_sqr = alpha.norm_sqr() + beta.norm_sqr();
        if (norm_sqr.sqrt() - 1.0).abs() > crate::linalg::NORM_INPUT_TOL {
            return Err(Error::NotNormalized { norm_sqr });
        }
        if l == 0 {
            return Err(Error::InvalidParameter(String::from(
                "topological charge must be non-zero for an OAM qubit",
            )));
        }
        let norm = norm_sqr.sqrt();
        Ok(Self {
            alpha: alpha / norm,
            beta: beta / norm,
            l,
        })
    }

    /// Amplitude on `|l⟩`.
    pub fn alpha(&self) -> Complex64 {
        self.alpha
    }

    /// Amplitude on `|−l⟩`.
    pub fn beta(&self) -> Complex64 {
        self.beta
    }

    /// Topological charge.
    pub fn charge(&self) -> i32 {
        self.l
    }
}

/// The qubit `α|R⟩ + β|L⟩` described by a spec.
pub fn make_qubit(spec: &QubitSpec) -> Ket {
    Ket::new(vec![spec.alpha(), spec.beta()]).expect("spec amplitudes are normalized")
}

/// A phase-mask rotation angle.
///
/// The resulting state is π-periodic up to global phase, so the angle is
/// stored reduced into `[0, π)` alongside the raw user value for reporting.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThetaSetting {
    raw: f64,
    reduced: f64,
}

impl ThetaSetting {
    /// Wraps an angle in radians.
    pub fn new(theta: f64) -> Self {
        let reduced = theta - PI * (theta / PI).floor();
        Self {
            raw: theta,
            reduced,
        }
    }

    /// The angle exactly as supplied.
    pub fn raw(&self) -> f64 {
        self.raw
    }

    /// The angle reduced into `[0, π)`.
    pub fn reduced(&self) -> f64 {
        self.reduced
    }
}

/// The mask-rotation state `|θ⟩ = (e^{iθ}|R⟩ + e^{−iθ}|L⟩)/√2`.
///
/// `theta_state(0)` is `|H⟩`; the relative phase between the two components
/// is `2θ`, so coincidence fringes have period π.
pub fn theta_state(setting: ThetaSetting) -> Ket {
    let theta = setting.raw();
    let s = FRAC_1_SQRT_2;
    let plus = Complex64::from_polar(s, theta);
    let minus = Complex64::from_polar(s, -theta);
    Ket::new(vec![plus, minus]).expect("construction is normalized")
}

/// The six Bell states used across the three up-conversion experiments.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BellKind {
    /// `(|hv⟩ + |vh⟩)/√2`, polarization entanglement.
    PolPlus,
    /// `(|hv⟩ − |vh⟩)/√2`.
    PolMinus,
    /// `(|h,R⟩ + |v,L⟩)/√2`, polarization–OAM hybrid.
    HybridPlus,
    /// `(|h,R⟩ − |v,L⟩)/√2`.
    HybridMinus,
    /// `(|R,L⟩ + |L,R⟩)/√2`, OAM entanglement.
    OamPlus,
    /// `(|R,L⟩ − |L,R⟩)/√2`.
    OamMinus,
}

impl BellKind {
    /// Canonical text form used in configuration files.
    pub fn as_str(self) -> &'static str {
        match self {
            BellKind::PolPlus => "pol-plus",
            BellKind::PolMinus => "pol-minus",
            BellKind::HybridPlus => "hybrid-plus",
            BellKind::HybridMinus => "hybrid-minus",
            BellKind::OamPlus => "oam-plus",
            BellKind::OamMinus => "oam-minus",
        }
    }
}

impl FromStr for BellKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "pol-plus" => Ok(BellKind::PolPlus),
            "pol-minus" => Ok(BellKind::PolMinus),
            "hybrid-plus" => Ok(BellKind::HybridPlus),
            "hybrid-minus" => Ok(BellKind::HybridMinus),
            "oam-plus" => Ok(BellKind::OamPlus),
            "oam-minus" => Ok(BellKind::OamMinus),
            other => Err(Error::UnknownLabel(String::from(other))),
        }
    }
}

/// The requested Bell state as a normalized 4-dim ket.
pub fn bell_state(kind: BellKind) -> Ket {
    let s = Complex64::new(FRAC_1_SQRT_2, 0.0);
    let z = Complex64::ZERO;
    let amps = match kind {
        BellKind::PolPlus | BellKind::OamPlus => vec![z, s, s, z],
        BellKind::PolMinus | BellKind::OamMinus => vec![z, s, -s, z],
        BellKind::HybridPlus => vec![s, z, z, s],
        BellKind::HybridMinus => vec![s, z, z, -s],
    };
    Ket::new(amps).expect("Bell amplitudes are normalized")
}

/// Gaussian beam waist and the largest mode radius the apparatus overlaps.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamGeometry {
    w0_um: f64,
    w_max_um: f64,
}

impl BeamGeometry {
    /// Validates `w0 > 0` and `w_max ≥ w0` (both in micrometers).
    pub fn new(w0_um: f64, w_max_um: f64) -> Result<Self> {
        if !w0_um.is_finite() || w0_um <= 0.0 {
            return Err(Error::InvalidParameter(format!(
                "beam waist w0 = {w0_um} µm must be > 0"
            )));
        }
        if w_max_um < w0_um {
            return Err(Error::InvalidParameter(format!(
                "aperture w_max = {w_max_um} µm is smaller than the waist w0 = {w0_um} µm"
            )));
        }
        Ok(Self { w0_um, w_max_um })
    }

    /// Gaussian waist in micrometers.
    pub fn w0_um(&self) -> f64 {
        self.w0_um
    }

    /// Overlap limit in micrometers.
    pub fn w_max_um(&self) -> f64 {
        self.w_max_um
    }
}

/// Number of OAM modes that fit inside the overlap radius.
///
/// A charge-`l` ring has radius `w_l = √(l+1)·w₀`, so the largest supported
/// charge is `l_max = ⌊(w_max/w₀)² − 1⌋` and the count spans
/// `l ∈ {−l_max, …, +l_max}` including the Gaussian `l = 0`.
pub fn mode_capacity(g: &BeamGeometry) -> u32 {
    let ratio = g.w_max_um() / g.w0_um();
    let l_max = (ratio * ratio - 1.0).floor().max(0.0) as u32;
    2 * l_max + 1
}
