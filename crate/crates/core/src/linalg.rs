//! Small dense complex linear algebra for 2- and 4-dimensional quantum states.
//!
//! Only the two Hilbert-space sizes that occur in the experiment are supported:
//! a single qubit (dimension 2, either an OAM pair `(|R⟩, |L⟩)` or a
//! polarization pair `(|h⟩, |v⟩)`) and a two-photon pair (dimension 4, first
//! subsystem ⊗ second subsystem in row-major Kronecker order). There is
//! deliberately no general-n machinery.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

#[allow(unused_imports)]
use num_traits::Float;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Hermiticity / trace tolerance for constructed density matrices.
pub const HERMITICITY_TOL: f64 = 1e-12;
/// Eigenvalues above this (slightly negative) floor count as non-negative;
/// likelihood-maximization output sits right at the PSD boundary.
pub const PSD_EIGENVALUE_FLOOR: f64 = -1e-10;
/// How far an input vector's norm may deviate from 1 before construction fails.
pub const NORM_INPUT_TOL: f64 = 1e-9;

fn check_dim(dim: usize) -> Result<()> {
    if dim == 2 || dim == 4 {
        Ok(())
    } else {
        Err(Error::DimensionMismatch {
            expected: 2,
            got: dim,
        })
    }
}

/// Which factor of a two-photon state an operation refers to.
///
/// `First` is the first-listed subsystem of the tensor product (the signal
/// photon unless documented otherwise), `Second` the other one.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subsystem {
    /// First-listed tensor factor.
    First,
    /// Second-listed tensor factor.
    Second,
}

/// A normalized complex state vector of dimension 2 or 4.
#[derive(Debug, Clone, PartialEq)]
pub struct Ket {
    amps: Vec<Complex64>,
}

impl Ket {
    /// Builds a ket from amplitudes that are already normalized to within
    /// [`NORM_INPUT_TOL`]; the stored amplitudes are rescaled so the norm is
    /// exactly 1 in floating point.
    pub fn new(amps: Vec<Complex64>) -> Result<Self> {
        check_dim(amps.len())?;
        let norm_sqr: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if (norm_sqr.sqrt() - 1.0).abs() > NORM_INPUT_TOL {
            return Err(Error::NotNormalized { norm_sqr });
        }
        Ok(Self::normalized(amps).expect("non-zero by the check above"))
    }

    /// Builds a ket from arbitrary non-zero amplitudes, normalizing them.
    pub fn normalized(amps: Vec<Complex64>) -> Result<Self> {
        check_dim(amps.len())?;
        let norm_sqr: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if norm_sqr <= 0.0 {
            return Err(Error::NotNormalized { norm_sqr });
        }
        let norm = norm_sqr.sqrt();
        Ok(Self {
            amps: amps.into_iter().map(|a| a / norm).collect(),
        })
    }

    /// Computational basis vector `e_index` of the given dimension.
    pub fn basis(dim: usize, index: usize) -> Result<Self> {
        check_dim(dim)?;
        if index >= dim {
            return Err(Error::InvalidParameter(format!(
                "basis index {index} out of range for dimension {dim}"
            )));
        }
        let mut amps = vec![Complex64::ZERO; dim];
        amps[index] = Complex64::ONE;
        Ok(Self { amps })
    }

    /// Hilbert-space dimension (2 or 4).
    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    /// The amplitude vector.
    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    /// Inner product ⟨self|other⟩.
    pub fn inner(&self, other: &Ket) -> Result<Complex64> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: other.dim(),
            });
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// Kronecker product |self⟩ ⊗ |other⟩; both operands must be qubits.
    ///
    /// The first operand occupies the slower-varying index, so for basis
    /// labels `(x, y)` the 4-dim ordering is `(x₀y₀, x₀y₁, x₁y₀, x₁y₁)`.
    pub fn tensor(&self, other: &Ket) -> Result<Ket> {
        if self.dim() != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                got: self.dim(),
            });
        }
        if other.dim() != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                got: other.dim(),
            });
        }
        let mut amps = Vec::with_capacity(4);
        for a in &self.amps {
            for b in &other.amps {
                amps.push(a * b);
            }
        }
        Ok(Ket { amps })
    }

    /// The rank-1 projector |self⟩⟨self| as a density matrix.
    pub fn density(&self) -> DensityMatrix {
        density_from_ket(self).expect("a constructed Ket is normalized")
    }
}

/// A Hermitian, unit-trace operator of dimension 2 or 4.
///
/// [`DensityMatrix::new`] additionally requires positive semidefiniteness
/// (eigenvalues ≥ [`PSD_EIGENVALUE_FLOOR`]). Linear tomographic inversion can
/// produce indefinite matrices; those enter through
/// [`DensityMatrix::hermitian_unit_trace`] and advertise their indefiniteness
/// via [`DensityMatrix::min_eigenvalue`].
#[derive(Debug, Clone, PartialEq)]
pub struct DensityMatrix {
    dim: usize,
    entries: Vec<Complex64>, // row-major
}

impl DensityMatrix {
    /// Validates Hermiticity, unit trace, and positive semidefiniteness.
    pub fn new(dim: usize, entries: Vec<Complex64>) -> Result<Self> {
        let rho = Self::hermitian_unit_trace(dim, entries)?;
        let min = rho.min_eigenvalue();
        if min < PSD_EIGENVALUE_FLOOR {
            return Err(Error::InvalidMatrix(format!(
                "not positive semidefinite: smallest eigenvalue {min:e}"
            )));
        }
        Ok(rho)
    }

    /// Validates Hermiticity and unit trace only. Used for linear-inversion
    /// output, which may legitimately be indefinite.
    pub fn hermitian_unit_trace(dim: usize, entries: Vec<Complex64>) -> Result<Self> {
        check_dim(dim)?;
        if entries.len() != dim * dim {
            return Err(Error::InvalidMatrix(format!(
                "expected {} entries for dimension {dim}, got {}",
                dim * dim,
                entries.len()
            )));
        }
        for i in 0..dim {
            for j in i..dim {
                let delta = entries[i * dim + j] - entries[j * dim + i].conj();
                if delta.norm() > HERMITICITY_TOL {
                    return Err(Error::InvalidMatrix(format!(
                        "not Hermitian at ({i},{j}): asymmetry {:e}",
                        delta.norm()
                    )));
                }
            }
        }
        let trace: Complex64 = (0..dim).map(|i| entries[i * dim + i]).sum();
        if (trace.re - 1.0).abs() > HERMITICITY_TOL || trace.im.abs() > HERMITICITY_TOL {
            return Err(Error::InvalidMatrix(format!("trace {trace} is not 1")));
        }
        Ok(Self { dim, entries })
    }

    /// The maximally mixed state I/dim.
    pub fn maximally_mixed(dim: usize) -> Result<Self> {
        check_dim(dim)?;
        let mut entries = vec![Complex64::ZERO; dim * dim];
        for i in 0..dim {
            entries[i * dim + i] = Complex64::new(1.0 / dim as f64, 0.0);
        }
        Ok(Self { dim, entries })
    }

    /// Hilbert-space dimension (2 or 4).
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Row-major entries.
    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    /// Single entry access.
    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.dim + col]
    }

    /// Trace (exactly the diagonal sum; 1 for constructed matrices).
    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.entries[i * self.dim + i]).sum()
    }

    /// Eigenvalues in ascending order (the matrix is Hermitian, so they are real).
    pub fn eigenvalues(&self) -> Vec<f64> {
        hermitian_eigenvalues(self.dim, &self.entries)
    }

    /// Eigenvalues with floating-point negatives in
    /// `(PSD_EIGENVALUE_FLOOR, 0)` clamped to 0, for reporting.
    pub fn eigenvalues_clamped(&self) -> Vec<f64> {
        self.eigenvalues()
            .into_iter()
            .map(|e| {
                if e > PSD_EIGENVALUE_FLOOR && e < 0.0 {
                    0.0
                } else {
                    e
                }
            })
            .collect()
    }

    /// Smallest eigenvalue.
    pub fn min_eigenvalue(&self) -> f64 {
        self.eigenvalues().first().copied().unwrap_or(0.0)
    }

    /// Expectation value tr(ρ·op).
    pub fn expectation(&self, op: &Operator) -> Result<Complex64> {
        if self.dim != op.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: op.dim(),
            });
        }
        let n = self.dim;
        let mut acc = Complex64::ZERO;
        for i in 0..n {
            for k in 0..n {
                acc += self.entries[i * n + k] * op.entries()[k * n + i];
            }
        }
        Ok(acc)
    }

    /// Kronecker product ρ ⊗ σ of two qubit states (first operand = first subsystem).
    pub fn tensor(&self, other: &DensityMatrix) -> Result<DensityMatrix> {
        if self.dim != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                got: self.dim,
            });
        }
        if other.dim != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                got: other.dim,
            });
        }
        let entries = kron(2, &self.entries, 2, &other.entries);
        // Hermiticity, unit trace, and positivity are preserved exactly.
        Ok(DensityMatrix { dim: 4, entries })
    }

    /// Convex combination `v·self + (1−v)·other` of two states of equal dimension.
    pub fn mix(&self, other: &DensityMatrix, v: f64) -> Result<DensityMatrix> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: other.dim,
            });
        }
        if !(0.0..=1.0).contains(&v) {
            return Err(Error::InvalidParameter(format!(
                "mixing weight {v} outside [0,1]"
            )));
        }
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(a, b)| a * v + b * (1.0 - v))
            .collect();
        Ok(DensityMatrix {
            dim: self.dim,
            entries,
        })
    }
}

impl fmt::Display for DensityMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in 0..self.dim {
            for j in 0..self.dim {
                let e = self.entry(i, j);
                write!(f, "{:+.4}{:+.4}i ", e.re, e.im)?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// A general square complex matrix (projector, unitary, witness operator).
///
/// No structure is enforced; producers are responsible for their own
/// guarantees.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    dim: usize,
    entries: Vec<Complex64>, // row-major
}

impl Operator {
    /// Wraps row-major entries; `entries.len()` must equal `dim²`.
    pub fn new(dim: usize, entries: Vec<Complex64>) -> Result<Self> {
        check_dim(dim)?;
        if entries.len() != dim * dim {
            return Err(Error::InvalidMatrix(format!(
                "expected {} entries for dimension {dim}, got {}",
                dim * dim,
                entries.len()
            )));
        }
        Ok(Self { dim, entries })
    }

    /// Identity of the given dimension.
    pub fn identity(dim: usize) -> Result<Self> {
        check_dim(dim)?;
        let mut entries = vec![Complex64::ZERO; dim * dim];
        for i in 0..dim {
            entries[i * dim + i] = Complex64::ONE;
        }
        Ok(Self { dim, entries })
    }

    /// Rank-1 projector |ψ⟩⟨ψ|.
    pub fn projector_onto(psi: &Ket) -> Self {
        let n = psi.dim();
        let a = psi.amplitudes();
        let mut entries = Vec::with_capacity(n * n);
        for i in 0..n {
            for j in 0..n {
                entries.push(a[i] * a[j].conj());
            }
        }
        Self { dim: n, entries }
    }

    /// Hilbert-space dimension.
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Row-major entries.
    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    /// Single entry access.
    pub fn entry(&self, row: usize, col: usize) -> Complex64 {
        self.entries[row * self.dim + col]
    }

    /// Kronecker product self ⊗ other of two qubit operators.
    pub fn tensor(&self, other: &Operator) -> Result<Operator> {
        if self.dim != 2 || other.dim != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                got: if self.dim != 2 { self.dim } else { other.dim },
            });
        }
        Ok(Operator {
            dim: 4,
            entries: kron(2, &self.entries, 2, &other.entries),
        })
    }

    /// `a·self + b·other`, elementwise.
    pub fn linear_combination(&self, a: f64, other: &Operator, b: f64) -> Result<Operator> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: other.dim,
            });
        }
        let entries = self
            .entries
            .iter()
            .zip(&other.entries)
            .map(|(x, y)| x * a + y * b)
            .collect();
        Ok(Operator {
            dim: self.dim,
            entries,
        })
    }
}

/// The outer product |ψ⟩⟨ψ| as a validated density matrix.
///
/// Fails if the input norm deviates from 1 by more than [`NORM_INPUT_TOL`]
/// (constructed [`Ket`]s always pass).
pub fn density_from_ket(psi: &Ket) -> Result<DensityMatrix> {
    let norm_sqr: f64 = psi.amplitudes().iter().map(|a| a.norm_sqr()).sum();
    if (norm_sqr.sqrt() - 1.0).abs() > NORM_INPUT_TOL {
        return Err(Error::NotNormalized { norm_sqr });
    }
    let n = psi.dim();
    let a = psi.amplitudes();
    let mut entries = Vec::with_capacity(n * n);
    for i in 0..n {
        for j in 0..n {
            entries.push(a[i] * a[j].conj() / norm_sqr);
        }
    }
    // Rank-1 projectors are Hermitian PSD with unit trace by construction.
    Ok(DensityMatrix { dim: n, entries })
}

/// Overlap ⟨Φ|ρ|Φ⟩ of a state with a pure target, as a real number in [0, 1].
pub fn fidelity(rho: &DensityMatrix, phi: &Ket) -> Result<f64> {
    if rho.dim() != phi.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            got: phi.dim(),
        });
    }
    let n = rho.dim();
    let a = phi.amplitudes();
    let mut acc = Complex64::ZERO;
    for i in 0..n {
        for j in 0..n {
            acc += a[i].conj() * rho.entry(i, j) * a[j];
        }
    }
    debug_assert!(
        acc.im.abs() <= 1e-10,
        "fidelity picked up imaginary part {:e}",
        acc.im
    );
    Ok(acc.re.clamp(0.0, 1.0))
}

/// Reduced state of one qubit of a two-photon density matrix.
pub fn partial_trace(rho: &DensityMatrix, keep: Subsystem) -> Result<DensityMatrix> {
    if rho.dim() != 4 {
        return Err(Error::DimensionMismatch {
            expected: 4,
            got: rho.dim(),
        });
    }
    let mut entries = vec![Complex64::ZERO; 4];
    for i in 0..2 {
        for j in 0..2 {
            let mut acc = Complex64::ZERO;
            for k in 0..2 {
                let (row, col) = match keep {
                    Subsystem::First => (i * 2 + k, j * 2 + k),
                    Subsystem::Second => (k * 2 + i, k * 2 + j),
                };
                acc += rho.entry(row, col);
            }
            entries[i * 2 + j] = acc;
        }
    }
    // Partial trace of a PSD unit-trace matrix is again PSD with unit trace.
    Ok(DensityMatrix { dim: 2, entries })
}

/// Trace distance ½·Σ|λᵢ(ρ−σ)|.
pub fn trace_distance(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if rho.dim() != sigma.dim() {
        return Err(Error::DimensionMismatch {
            expected: rho.dim(),
            got: sigma.dim(),
        });
    }
    let n = rho.dim();
    let diff: Vec<Complex64> = rho
        .entries()
        .iter()
        .zip(sigma.entries())
        .map(|(a, b)| a - b)
        .collect();
    let eigs = hermitian_eigenvalues(n, &diff);
    Ok(0.5 * eigs.iter().map(|e| e.abs()).sum::<f64>())
}

fn kron(na: usize, a: &[Complex64], nb: usize, b: &[Complex64]) -> Vec<Complex64> {
    let n = na * nb;
    let mut out = vec![Complex64::ZERO; n * n];
    for i in 0..na {
        for j in 0..na {
            for k in 0..nb {
                for l in 0..nb {
                    out[(i * nb + k) * n + (j * nb + l)] = a[i * na + j] * b[k * nb + l];
                }
            }
        }
    }
    out
}

/// Eigenvalues of a Hermitian matrix by cyclic complex Jacobi rotations,
/// returned in ascending order.
///
/// Quadratically convergent for the 2×2 and 4×4 matrices used here; the sweep
/// cap is never reached in practice.
pub fn hermitian_eigenvalues(dim: usize, entries: &[Complex64]) -> Vec<f64> {
    assert_eq!(entries.len(), dim * dim, "matrix shape mismatch");
    let mut a: Vec<Complex64> = entries.to_vec();
    let n = dim;
    let scale: f64 = a.iter().map(|e| e.norm()).fold(0.0, f64::max).max(1.0);
    let tol = 1e-15 * scale;

    for _sweep in 0..64 {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in (p + 1)..n {
                off += a[p * n + q].norm_sqr();
            }
        }
        if off.sqrt() <= tol {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                let m = apq.norm();
                if m <= tol * 1e-2 {
                    continue;
                }
                let app = a[p * n + p].re;
                let aqq = a[q * n + q].re;
                let phase = apq / m; // e^{iφ}
                let theta = 0.5 * (2.0 * m).atan2(app - aqq);
                let c = theta.cos();
                let s = theta.sin();
                // Unitary: column p ← c·p + s·e^{−iφ}·q, column q ← −s·e^{iφ}·p + c·q.
                let s_fwd = phase * s; // s·e^{iφ}
                for r in 0..n {
                    let arp = a[r * n + p];
                    let arq = a[r * n + q];
                    a[r * n + p] = arp * c + arq * s_fwd.conj();
                    a[r * n + q] = -arp * s_fwd + arq * c;
                }
                for r in 0..n {
                    let apr = a[p * n + r];
                    let aqr = a[q * n + r];
                    a[p * n + r] = apr * c + aqr * s_fwd;
                    a[q * n + r] = -apr * s_fwd.conj() + aqr * c;
                }
            }
        }
    }

    let mut eigs: Vec<f64> = (0..n).map(|i| a[i * n + i].re).collect();
    eigs.sort_by(|x, y| x.partial_cmp(y).expect("eigenvalues are finite"));
    eigs
}

/// Rank of a complex square matrix by Gaussian elimination with partial
/// pivoting. Used to check tomographic completeness of projector sets.
pub(crate) fn matrix_rank(n: usize, entries: &[Complex64], tol: f64) -> usize {
    assert_eq!(entries.len(), n * n);
    let mut a = entries.to_vec();
    let mut rank = 0;
    let mut row = 0;
    for col in 0..n {
        let (pivot_row, pivot_norm) =
            (row..n)
                .map(|r| (r, a[r * n + col].norm()))
                .fold(
                    (row, 0.0),
                    |best, cur| if cur.1 > best.1 { cur } else { best },
                );
        if pivot_norm <= tol {
            continue;
        }
        if pivot_row != row {
            for c in 0..n {
                a.swap(row * n + c, pivot_row * n + c);
            }
        }
        let pivot = a[row * n + col];
        for r in (row + 1)..n {
            let factor = a[r * n + col] / pivot;
            for c in col..n {
                let sub = factor * a[row * n + c];
                a[r * n + c] -= sub;
            }
        }
        rank += 1;
        row += 1;
        if row == n {
            break;
        }
    }
    rank
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    const SQRT_HALF: f64 = core::f64::consts::FRAC_1_SQRT_2;

    #[test]
    fn density_of_basis_state_is_diagonal_projector() {
        let r = Ket::basis(2, 0).unwrap();
        let rho = density_from_ket(&r).unwrap();
        assert_eq!(rho.entry(0, 0), c(1.0, 0.0));
        assert_eq!(rho.entry(0, 1), c(0.0, 0.0));
        assert_eq!(rho.entry(1, 0), c(0.0, 0.0));
        assert_eq!(rho.entry(1, 1), c(0.0, 0.0));
    }

    #[test]
    fn density_of_equal_superposition_has_uniform_entries() {
        let h = Ket::new(vec![c(SQRT_HALF, 0.0), c(SQRT_HALF, 0.0)]).unwrap();
        let rho = density_from_ket(&h).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                assert_abs_diff_eq!(rho.entry(i, j).re, 0.5, epsilon = 1e-15);
                assert_abs_diff_eq!(rho.entry(i, j).im, 0.0, epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn density_of_circular_superposition_matches_ideal_matrix() {
        // (|R⟩ + i|L⟩)/√2 → ½ [[1, −i], [i, 1]]
        let d = Ket::new(vec![c(SQRT_HALF, 0.0), c(0.0, SQRT_HALF)]).unwrap();
        let rho = density_from_ket(&d).unwrap();
        assert_abs_diff_eq!(rho.entry(0, 0).re, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(rho.entry(0, 1).im, -0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(rho.entry(1, 0).im, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(rho.entry(1, 1).re, 0.5, epsilon = 1e-15);
        assert_abs_diff_eq!(rho.entry(0, 1).re, 0.0, epsilon = 1e-15);
    }

    #[test]
    fn density_is_idempotent_for_pure_states() {
        let psi = Ket::normalized(vec![c(0.3, 0.4), c(-0.5, 0.7)]).unwrap();
        let rho = density_from_ket(&psi).unwrap();
        let n = 2;
        for i in 0..n {
            for j in 0..n {
                let mut sq = Complex64::ZERO;
                for k in 0..n {
                    sq += rho.entry(i, k) * rho.entry(k, j);
                }
                assert!((sq - rho.entry(i, j)).norm() < 1e-12, "ρ² ≠ ρ at ({i},{j})");
            }
        }
    }

    #[test]
    fn density_from_ket_rejects_unnormalized_input() {
        let psi = Ket {
            amps: vec![c(1.0, 0.0), c(0.5, 0.0)],
        };
        assert!(matches!(
            density_from_ket(&psi),
            Err(Error::NotNormalized { .. })
        ));
    }

    #[test]
    fn tensor_of_basis_kets_is_basis_vector() {
        let r = Ket::basis(2, 0).unwrap();
        let l = Ket::basis(2, 1).unwrap();
        let rl = r.tensor(&l).unwrap();
        assert_eq!(rl.amplitudes(), Ket::basis(4, 1).unwrap().amplitudes());
    }

    #[test]
    fn tensor_of_maximally_mixed_is_maximally_mixed() {
        let half = DensityMatrix::maximally_mixed(2).unwrap();
        let quarter = half.tensor(&half).unwrap();
        assert_eq!(quarter, DensityMatrix::maximally_mixed(4).unwrap());
    }

    #[test]
    fn tensor_rejects_dimension_mismatch() {
        let q = Ket::basis(2, 0).unwrap();
        let pair = q.tensor(&q).unwrap();
        assert!(pair.tensor(&q).is_err());
    }

    #[test]
    fn fidelity_identity_and_mixed_cases() {
        let r = Ket::basis(2, 0).unwrap();
        let rho = density_from_ket(&r).unwrap();
        assert_abs_diff_eq!(fidelity(&rho, &r).unwrap(), 1.0, epsilon = 1e-12);
        let mixed = DensityMatrix::maximally_mixed(2).unwrap();
        assert_abs_diff_eq!(fidelity(&mixed, &r).unwrap(), 0.5, epsilon = 1e-15);
    }

    #[test]
    fn werner_fidelity_matches_analytic_expansion() {
        // V·|Φ⁻⟩⟨Φ⁻| + (1−V)·I/4 against Φ⁻ gives (1+3V)/4.
        let phi_minus = Ket::new(vec![
            c(0.0, 0.0),
            c(SQRT_HALF, 0.0),
            c(-SQRT_HALF, 0.0),
            c(0.0, 0.0),
        ])
        .unwrap();
        let v = 0.845;
        let werner = phi_minus
            .density()
            .mix(&DensityMatrix::maximally_mixed(4).unwrap(), v)
            .unwrap();
        assert_abs_diff_eq!(
            fidelity(&werner, &phi_minus).unwrap(),
            0.88375,
            epsilon = 1e-12
        );
    }

    #[test]
    fn partial_trace_of_entangled_state_is_maximally_mixed() {
        let phi_minus = Ket::new(vec![
            c(0.0, 0.0),
            c(SQRT_HALF, 0.0),
            c(-SQRT_HALF, 0.0),
            c(0.0, 0.0),
        ])
        .unwrap();
        let reduced = partial_trace(&phi_minus.density(), Subsystem::First).unwrap();
        for i in 0..2 {
            for j in 0..2 {
                let want = if i == j { 0.5 } else { 0.0 };
                assert_abs_diff_eq!(reduced.entry(i, j).re, want, epsilon = 1e-12);
                assert_abs_diff_eq!(reduced.entry(i, j).im, 0.0, epsilon = 1e-12);
            }
        }
    }

    #[test]
    fn partial_trace_of_product_state_recovers_factor() {
        let r = Ket::basis(2, 0).unwrap();
        let l = Ket::basis(2, 1).unwrap();
        let pair = r.tensor(&l).unwrap().density();
        let first = partial_trace(&pair, Subsystem::First).unwrap();
        let second = partial_trace(&pair, Subsystem::Second).unwrap();
        assert!(trace_distance(&first, &r.density()).unwrap() < 1e-12);
        assert!(trace_distance(&second, &l.density()).unwrap() < 1e-12);
    }

    #[test]
    fn partial_trace_of_werner_is_maximally_mixed() {
        let phi_minus = Ket::new(vec![
            c(0.0, 0.0),
            c(SQRT_HALF, 0.0),
            c(-SQRT_HALF, 0.0),
            c(0.0, 0.0),
        ])
        .unwrap();
        let werner = phi_minus
            .density()
            .mix(&DensityMatrix::maximally_mixed(4).unwrap(), 0.845)
            .unwrap();
        let reduced = partial_trace(&werner, Subsystem::Second).unwrap();
        assert!(
            trace_distance(&reduced, &DensityMatrix::maximally_mixed(2).unwrap()).unwrap() < 1e-12
        );
    }

    #[test]
    fn eigenvalues_of_known_matrices() {
        let mixed = DensityMatrix::maximally_mixed(4).unwrap();
        for e in mixed.eigenvalues() {
            assert_abs_diff_eq!(e, 0.25, epsilon = 1e-14);
        }
        // σ₂ has eigenvalues ±1.
        let eigs = hermitian_eigenvalues(2, &[c(0.0, 0.0), c(0.0, -1.0), c(0.0, 1.0), c(0.0, 0.0)]);
        assert_abs_diff_eq!(eigs[0], -1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(eigs[1], 1.0, epsilon = 1e-14);
    }

    #[test]
    fn trace_distance_between_orthogonal_pure_states_is_one() {
        let r = Ket::basis(2, 0).unwrap().density();
        let l = Ket::basis(2, 1).unwrap().density();
        assert_abs_diff_eq!(trace_distance(&r, &l).unwrap(), 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(trace_distance(&r, &r).unwrap(), 0.0, epsilon = 1e-14);
    }

    #[test]
    fn rank_detects_degenerate_sets() {
        let id = Operator::identity(2).unwrap();
        assert_eq!(matrix_rank(2, id.entries(), 1e-12), 2);
        let singular = [c(1.0, 0.0), c(2.0, 0.0), c(2.0, 0.0), c(4.0, 0.0)];
        assert_eq!(matrix_rank(2, &singular, 1e-12), 1);
    }

    mod properties {
        use super::*;
        use proptest::prelude::*;

        fn arb_ket(dim: usize) -> impl Strategy<Value = Ket> {
            proptest::collection::vec((-1.0f64..1.0, -1.0f64..1.0), dim).prop_filter_map(
                "non-zero amplitudes",
                |pairs| {
                    let amps: Vec<Complex64> =
                        pairs.into_iter().map(|(re, im)| c(re, im)).collect();
                    Ket::normalized(amps).ok()
                },
            )
        }

        proptest! {
            #[test]
            fn random_mixtures_satisfy_state_invariants(
                a in arb_ket(4),
                b in arb_ket(4),
                weight in 0.0f64..=1.0,
            ) {
                let rho = a.density().mix(&b.density(), weight).unwrap();
                // Hermitian, unit trace, PSD — revalidated by the strict constructor.
                prop_assert!(DensityMatrix::new(4, rho.entries().to_vec()).is_ok());
                prop_assert!(rho.min_eigenvalue() >= PSD_EIGENVALUE_FLOOR);
            }

            #[test]
            fn fidelity_is_a_probability(
                a in arb_ket(2),
                b in arb_ket(2),
                target in arb_ket(2),
                weight in 0.0f64..=1.0,
            ) {
                let rho = a.density().mix(&b.density(), weight).unwrap();
                let f = fidelity(&rho, &target).unwrap();
                prop_assert!((0.0..=1.0).contains(&f));
                let self_overlap = fidelity(&target.density(), &target).unwrap();
                prop_assert!((self_overlap - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn density_matrix_new_rejects_bad_matrices() {
        // Non-Hermitian.
        let bad = vec![c(0.5, 0.0), c(0.1, 0.0), c(0.3, 0.0), c(0.5, 0.0)];
        assert!(DensityMatrix::new(2, bad).is_err());
        // Hermitian, unit trace, but indefinite.
        let indefinite = vec![c(1.2, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(-0.2, 0.0)];
        assert!(DensityMatrix::new(2, indefinite.clone()).is_err());
        assert!(DensityMatrix::hermitian_unit_trace(2, indefinite).is_ok());
    }
}
