//! Finite matrix representations of the deformed ladder algebra.
//!
//! On the truncated space spanned by `|φ_0⟩ … |φ_{n_max−1}⟩` the deformed
//! operators are literal matrix products of the bare ladder matrices with the
//! diagonal `f(N)`:
//!
//! ```text
//! A  = a·f(N)      A|φ_n⟩ = √n f(n) |φ_{n−1}⟩
//! A† = f(N)·a†     A†|φ_n⟩ = √(n+1) f(n+1) |φ_{n+1}⟩
//! A′ = a·f(N)⁻¹    (dual partner, f ↔ 1/f)
//! A′† = f(N)⁻¹·a†
//! ```
//!
//! Truncation policy: pair identities such as `[A, A′†] = I` hold on the
//! leading `(n_max−2)` block; the bottom-right corner carries the defect
//! `1 − n_max` instead of `1`. Every contract check in this module therefore
//! measures defects on a stated leading block, never on the full matrix.

use num_complex::Complex64;

use crate::deformation::DeformationSpec;
use crate::linalg::{self, CMat};
use crate::{Duality, Error, Result};

/// Smallest truncation for which the shift structure and the interior
/// commutator windows are non-degenerate.
pub const MIN_DIM: usize = 4;

/// Which basis an operator's matrix elements refer to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BasisLabel {
    /// The bare deformed Fock basis `|φ_n⟩`.
    Bare,
    /// The displaced basis `|Φ_n⟩ = U|φ_n⟩` of a fermionic configuration.
    Displaced,
    /// The dual displaced basis built with the inverted deformation.
    DisplacedDual,
}

/// A truncated Fock basis: dimension plus the label saying which family of
/// kets the matrix elements are taken in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct FockBasis {
    pub dim: usize,
    pub label: BasisLabel,
}

impl FockBasis {
    pub fn bare(dim: usize) -> Self {
        Self {
            dim,
            label: BasisLabel::Bare,
        }
    }
}

/// A dense operator tagged with the basis it is expressed in.
#[derive(Debug, Clone)]
pub struct OperatorMatrix {
    pub basis: FockBasis,
    pub entries: CMat,
}

impl OperatorMatrix {
    pub fn new(basis: FockBasis, entries: CMat) -> Self {
        debug_assert_eq!(basis.dim, entries.nrows());
        debug_assert_eq!(basis.dim, entries.ncols());
        Self { basis, entries }
    }

    pub fn dim(&self) -> usize {
        self.basis.dim
    }

    /// Hermiticity defect `max |M − M†|`.
    pub fn hermiticity_defect(&self) -> f64 {
        linalg::max_abs(&(&self.entries - self.entries.adjoint()))
    }
}

/// The full set of ladder matrices for one deformation at one truncation.
#[derive(Debug, Clone)]
pub struct LadderOps {
    /// Bare annihilation `a`.
    pub a: OperatorMatrix,
    /// Bare creation `a†`.
    pub a_dag: OperatorMatrix,
    /// Number operator `N = a†a` (diagonal `0..n_max−1`).
    pub number: OperatorMatrix,
    /// Deformed annihilation `A = a f(N)`.
    pub deformed: OperatorMatrix,
    /// Deformed creation `A† = f(N) a†`.
    pub deformed_dag: OperatorMatrix,
    /// Dual annihilation `A′ = a f(N)⁻¹`.
    pub dual: OperatorMatrix,
    /// Dual creation `A′† = f(N)⁻¹ a†`.
    pub dual_dag: OperatorMatrix,
}

impl LadderOps {
    /// Annihilation-side operator for the requested flavour.
    pub fn lowering(&self, variant: Duality) -> &OperatorMatrix {
        match variant {
            Duality::Primal => &self.deformed,
            Duality::Dual => &self.dual,
        }
    }

    /// Creation-side operator for the requested flavour.
    pub fn raising(&self, variant: Duality) -> &OperatorMatrix {
        match variant {
            Duality::Primal => &self.deformed_dag,
            Duality::Dual => &self.dual_dag,
        }
    }
}

fn guard_dims(spec: &DeformationSpec, n_max: usize, context: &'static str) -> Result<()> {
    if n_max < MIN_DIM {
        return Err(Error::DimensionTooSmall {
            dim: n_max,
            min: MIN_DIM,
            context,
        });
    }
    if spec.n_max() < n_max {
        return Err(Error::DimensionMismatch {
            left: spec.n_max(),
            right: n_max,
            context: "deformation table shorter than requested truncation",
        });
    }
    Ok(())
}

fn bare_annihilation(n_max: usize) -> CMat {
    let mut a = CMat::zeros(n_max, n_max);
    for n in 0..n_max - 1 {
        a[(n, n + 1)] = Complex64::new(((n + 1) as f64).sqrt(), 0.0);
    }
    a
}

/// Diagonal `f(N)` (or its inverse). The `n = 0` entry multiplies only
/// structural zeros of `a` and `a†`, so it is pinned to 1 and `f(0)` is never
/// evaluated.
fn f_diagonal(spec: &DeformationSpec, n_max: usize, invert: bool) -> Result<CMat> {
    let mut d = CMat::zeros(n_max, n_max);
    d[(0, 0)] = Complex64::new(1.0, 0.0);
    for n in 1..n_max {
        let f = spec.f_value(n)?;
        let v = if invert { 1.0 / f } else { f };
        d[(n, n)] = Complex64::new(v, 0.0);
    }
    Ok(d)
}

/// Build the bare and deformed ladder matrices on `n_max` levels.
pub fn ladder_matrices(spec: &DeformationSpec, n_max: usize) -> Result<LadderOps> {
    guard_dims(spec, n_max, "ladder matrices")?;
    let a = bare_annihilation(n_max);
    let a_dag = a.adjoint();
    let mut number = CMat::zeros(n_max, n_max);
    for n in 0..n_max {
        number[(n, n)] = Complex64::new(n as f64, 0.0);
    }
    let f_n = f_diagonal(spec, n_max, false)?;
    let f_n_inv = f_diagonal(spec, n_max, true)?;

    let deformed = &a * &f_n;
    let deformed_dag = &f_n * &a_dag;
    let dual = &a * &f_n_inv;
    let dual_dag = &f_n_inv * &a_dag;

    let basis = FockBasis::bare(n_max);
    Ok(LadderOps {
        a: OperatorMatrix::new(basis, a),
        a_dag: OperatorMatrix::new(basis, a_dag),
        number: OperatorMatrix::new(basis, number),
        deformed: OperatorMatrix::new(basis, deformed),
        deformed_dag: OperatorMatrix::new(basis, deformed_dag),
        dual: OperatorMatrix::new(basis, dual),
        dual_dag: OperatorMatrix::new(basis, dual_dag),
    })
}

/// The rescaling diagonals `T = diag t(n)`, `T⁻¹`, and `S = T²` that carry
/// the bare basis into the deformed one.
#[derive(Debug, Clone)]
pub struct RescaleOps {
    pub t: OperatorMatrix,
    pub t_inv: OperatorMatrix,
    pub s: OperatorMatrix,
}

pub fn rescale_operators(spec: &DeformationSpec, n_max: usize) -> Result<RescaleOps> {
    guard_dims(spec, n_max, "rescale operators")?;
    let mut t = CMat::zeros(n_max, n_max);
    let mut t_inv = CMat::zeros(n_max, n_max);
    let mut s = CMat::zeros(n_max, n_max);
    for n in 0..n_max {
        let tn = spec.t_value(n)?;
        t[(n, n)] = Complex64::new(tn, 0.0);
        t_inv[(n, n)] = Complex64::new(1.0 / tn, 0.0);
        s[(n, n)] = Complex64::new(tn * tn, 0.0);
    }
    let basis = FockBasis::bare(n_max);
    Ok(RescaleOps {
        t: OperatorMatrix::new(basis, t),
        t_inv: OperatorMatrix::new(basis, t_inv),
        s: OperatorMatrix::new(basis, s),
    })
}

/// Momentum-like combination for the requested flavour:
///
/// ```text
/// P  = (a f(N)   − f(N)⁻¹ a†) / (i√2)
/// P′ = (a f(N)⁻¹ − f(N) a†)   / (i√2)
/// ```
///
/// For `f ≠ 1` these are *not* Hermitian in finite (or infinite) dimension;
/// downstream users must consult the Gram defect of the exponentials built
/// from them instead of assuming unitarity.
pub fn momentum_matrix(spec: &DeformationSpec, n_max: usize, variant: Duality) -> Result<OperatorMatrix> {
    guard_dims(spec, n_max, "momentum matrix")?;
    let ops = ladder_matrices(spec, n_max)?;
    let (low, raise) = match variant {
        Duality::Primal => (&ops.deformed.entries, &ops.dual_dag.entries),
        Duality::Dual => (&ops.dual.entries, &ops.deformed_dag.entries),
    };
    // 1/(i√2) = −i/√2
    let scale = Complex64::new(0.0, -1.0) / Complex64::new(2.0_f64.sqrt(), 0.0);
    let p = (low - raise).map(|v| v * scale);
    Ok(OperatorMatrix::new(FockBasis::bare(n_max), p))
}

/// Parameters of one bosonic mode coupled to `M` fermionic modes in the
/// configuration `[k] ∈ {0,1}^M`.
#[derive(Debug, Clone)]
pub struct ModeParams {
    /// Frequency ω of this bosonic mode (positive).
    pub omega: f64,
    /// Total number of bosonic modes `N_B`; the fermionic energy is shared
    /// evenly, contributing `ε_[k]/N_B` to each mode Hamiltonian.
    pub n_modes: usize,
    /// Fermionic level energies ε_j, `j = 1..=M`.
    pub eps: Vec<f64>,
    /// Coupling strengths g_j.
    pub g: Vec<f64>,
    /// Occupation pattern `[k]`.
    pub k_config: Vec<bool>,
}

impl ModeParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.omega > 0.0) || !self.omega.is_finite() {
            return Err(Error::invalid_input(format!(
                "mode frequency must be positive, got {}",
                self.omega
            )));
        }
        if self.n_modes == 0 {
            return Err(Error::invalid_input("n_modes must be at least 1"));
        }
        if self.eps.is_empty() {
            return Err(Error::invalid_input("at least one fermionic level required"));
        }
        if self.eps.len() != self.g.len() || self.eps.len() != self.k_config.len() {
            return Err(Error::DimensionMismatch {
                left: self.eps.len(),
                right: self.g.len().max(self.k_config.len()),
                context: "fermionic parameter sequences",
            });
        }
        Ok(())
    }

    /// `g_[k] = Σ_j k_j g_j`.
    pub fn g_k(&self) -> f64 {
        self.g
            .iter()
            .zip(&self.k_config)
            .filter(|(_, &k)| k)
            .map(|(g, _)| g)
            .sum()
    }

    /// `ε_[k] = Σ_j k_j ε_j`.
    pub fn eps_k(&self) -> f64 {
        self.eps
            .iter()
            .zip(&self.k_config)
            .filter(|(_, &k)| k)
            .map(|(e, _)| e)
            .sum()
    }

    /// Constant energy shift `ε_[k]/N_B − g_[k]²/ω` of the mode Hamiltonian.
    pub fn energy_shift(&self) -> f64 {
        let g_k = self.g_k();
        self.eps_k() / self.n_modes as f64 - g_k * g_k / self.omega
    }
}

/// The displacement-type exponential `U = exp(i√2 (g_[k]/ω) P)` together
/// with its unitarity diagnostics.
#[derive(Debug, Clone)]
pub struct DisplacementShift {
    pub matrix: OperatorMatrix,
    /// `max |U†U − I|` over the leading `(n_max−2)` block. Zero (to rounding)
    /// when `f ≡ 1`; genuinely nonzero otherwise, because `P ≠ P†`.
    pub gram_defect: f64,
}

pub fn displacement_shift(
    spec: &DeformationSpec,
    n_max: usize,
    params: &ModeParams,
    variant: Duality,
) -> Result<DisplacementShift> {
    params.validate()?;
    let p = momentum_matrix(spec, n_max, variant)?;
    let beta = params.g_k() / params.omega;
    let scale = Complex64::new(0.0, 2.0_f64.sqrt() * beta);
    let u = linalg::expm(&p.entries.map(|v| v * scale));
    let gram = &u.adjoint() * &u - linalg::eye(n_max);
    let gram_defect = linalg::max_abs_leading(&gram, n_max.saturating_sub(2));
    let label = match variant {
        Duality::Primal => BasisLabel::Displaced,
        Duality::Dual => BasisLabel::DisplacedDual,
    };
    Ok(DisplacementShift {
        matrix: OperatorMatrix::new(
            FockBasis {
                dim: n_max,
                label,
            },
            u,
        ),
        gram_defect,
    })
}

/// The shifted quadratic mode Hamiltonian for one fermionic configuration:
///
/// ```text
/// B_[k] = ω·A_[k]† A_[k] + (ε_[k]/N_B − g_[k]²/ω)·I,
/// A_[k] = U (a f(N)) U⁻¹
/// ```
///
/// with closed-form spectrum `E_n = ω n f²(n) + ε_[k]/N_B − g_[k]²/ω`
/// (the dual flavour uses `1/f` throughout and `f⁻²` in the spectrum).
#[derive(Debug, Clone)]
pub struct BkOperator {
    pub matrix: OperatorMatrix,
    /// Closed-form eigenvalue ladder `E_n`, `n = 0..n_max−1`.
    pub spectrum: Vec<f64>,
    /// Gram defect of the similarity transform `U`; eigenvalue comparisons
    /// are only meaningful while this is small.
    pub gram_defect: f64,
}

pub fn bk_operator(
    spec: &DeformationSpec,
    n_max: usize,
    params: &ModeParams,
    variant: Duality,
) -> Result<BkOperator> {
    params.validate()?;
    let ops = ladder_matrices(spec, n_max)?;
    let shift = displacement_shift(spec, n_max, params, variant)?;
    let u = &shift.matrix.entries;
    let u_inv = linalg::inverse(u, "displacement exponential")?;
    let a_k = u * &ops.lowering(variant).entries * &u_inv;
    let omega = Complex64::new(params.omega, 0.0);
    let shift_c = Complex64::new(params.energy_shift(), 0.0);
    let b = (a_k.adjoint() * &a_k).map(|v| v * omega) + linalg::eye(n_max).map(|v| v * shift_c);

    let spectrum = (0..n_max)
        .map(|n| {
            spec.n_f_squared(n, variant)
                .map(|nf2| params.omega * nf2 + params.energy_shift())
        })
        .collect::<Result<Vec<f64>>>()?;

    Ok(BkOperator {
        matrix: OperatorMatrix::new(shift.matrix.basis, b),
        spectrum,
        gram_defect: shift.gram_defect,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::{assert_abs_diff_eq, assert_relative_eq};
    use crate::linalg::{commutator, eye, max_abs, max_abs_leading};

    fn specs_for_commutator_sweep() -> Vec<DeformationSpec> {
        let tabulated: Vec<f64> = (1..=32)
            .map(|n| ((n + 1) as f64 / n as f64).sqrt())
            .collect();
        vec![
            DeformationSpec::identity(32).unwrap(),
            DeformationSpec::q_deformed(0.5, 32).unwrap(),
            DeformationSpec::tabulated(&tabulated).unwrap(),
        ]
    }

    #[test]
    fn identity_deformation_gives_standard_annihilation() {
        let spec = DeformationSpec::identity(4).unwrap();
        let ops = ladder_matrices(&spec, 4).unwrap();
        let a = &ops.deformed.entries;
        assert_abs_diff_eq!(a[(0, 1)].re, 1.0, epsilon = 0.0);
        assert_abs_diff_eq!(a[(1, 2)].re, 2.0_f64.sqrt(), epsilon = 0.0);
        assert_abs_diff_eq!(a[(2, 3)].re, 3.0_f64.sqrt(), epsilon = 0.0);
        // everything else vanishes
        let mut expect = CMat::zeros(4, 4);
        expect[(0, 1)] = a[(0, 1)];
        expect[(1, 2)] = a[(1, 2)];
        expect[(2, 3)] = a[(2, 3)];
        assert_abs_diff_eq!(max_abs(&(a - expect)), 0.0, epsilon = 0.0);
    }

    #[test]
    fn canonical_pairing_holds_on_leading_block_with_known_corner() {
        for spec in specs_for_commutator_sweep() {
            let n = spec.n_max();
            let ops = ladder_matrices(&spec, n).unwrap();
            let c = commutator(&ops.deformed.entries, &ops.dual_dag.entries);
            let defect = max_abs_leading(&(&c - eye(n)), n - 2);
            assert!(defect <= 1e-12, "defect {defect:.3e} for {:?}", spec.kind());
            // the truncation corner carries 1 − n_max
            assert_relative_eq!(c[(n - 1, n - 1)].re, 1.0 - n as f64, max_relative = 1e-12);
            // mirrored pairing
            let c2 = commutator(&ops.dual.entries, &ops.deformed_dag.entries);
            let defect2 = max_abs_leading(&(&c2 - eye(n)), n - 2);
            assert!(defect2 <= 1e-12);
        }
    }

    #[test]
    fn deformed_commutator_diagonal_matches_level_difference() {
        for spec in specs_for_commutator_sweep() {
            let n = spec.n_max();
            let ops = ladder_matrices(&spec, n).unwrap();
            let c = commutator(&ops.deformed.entries, &ops.deformed_dag.entries);
            for i in 0..n - 1 {
                let expect = spec.n_f_squared(i + 1, Duality::Primal).unwrap()
                    - spec.n_f_squared(i, Duality::Primal).unwrap();
                assert_abs_diff_eq!(c[(i, i)].re, expect, epsilon = 1e-12);
                assert_abs_diff_eq!(c[(i, i)].im, 0.0, epsilon = 1e-14);
            }
        }
    }

    #[test]
    fn rescaling_diagonals_conjugate_bare_into_deformed() {
        let spec = DeformationSpec::q_deformed(0.5, 16).unwrap();
        let ops = ladder_matrices(&spec, 16).unwrap();
        let r = rescale_operators(&spec, 16).unwrap();
        let conj = &r.t_inv.entries * &ops.a.entries * &r.t.entries;
        assert!(max_abs(&(&conj - &ops.deformed.entries)) < 1e-13);
        let conj_dual = &r.t.entries * &ops.a.entries * &r.t_inv.entries;
        assert!(max_abs(&(&conj_dual - &ops.dual.entries)) < 1e-13);
        // S = T² entrywise
        let t2 = &r.t.entries * &r.t.entries;
        assert!(max_abs(&(&t2 - &r.s.entries)) == 0.0);
    }

    #[test]
    fn momentum_closes_canonical_commutator_on_interior() {
        for spec in specs_for_commutator_sweep() {
            let n = spec.n_max();
            let ops = ladder_matrices(&spec, n).unwrap();
            let p = momentum_matrix(&spec, n, Duality::Primal).unwrap();
            let sqrt2p = p.entries.map(|v| v * Complex64::new(2.0_f64.sqrt(), 0.0));
            let c = commutator(&ops.deformed.entries, &sqrt2p);
            let target = eye(n).map(|v| v * Complex64::i());
            let defect = max_abs_leading(&(&c - &target), n - 2);
            assert!(defect <= 1e-12, "defect {defect:.3e}");
        }
    }

    #[test]
    fn momentum_hermiticity_reflects_deformation() {
        let id = DeformationSpec::identity(16).unwrap();
        let p_id = momentum_matrix(&id, 16, Duality::Primal).unwrap();
        assert!(p_id.hermiticity_defect() < 1e-15);

        let q = DeformationSpec::q_deformed(0.5, 16).unwrap();
        let p_q = momentum_matrix(&q, 16, Duality::Primal).unwrap();
        assert!(p_q.hermiticity_defect() > 1e-3, "deformed P must fail Hermiticity");
    }

    fn single_fermion_params(omega: f64, eps: f64, g: f64) -> ModeParams {
        ModeParams {
            omega,
            n_modes: 1,
            eps: vec![eps],
            g: vec![g],
            k_config: vec![true],
        }
    }

    #[test]
    fn undeformed_displacement_is_unitary() {
        let spec = DeformationSpec::identity(32).unwrap();
        let params = single_fermion_params(1.0, 0.5, 0.3);
        let d = displacement_shift(&spec, 32, &params, Duality::Primal).unwrap();
        assert!(d.gram_defect < 1e-10, "gram defect {:.3e}", d.gram_defect);
    }

    #[test]
    fn deformed_displacement_reports_honest_gram_defect() {
        let spec = DeformationSpec::q_deformed(0.5, 32).unwrap();
        let params = single_fermion_params(1.0, 0.5, 0.3);
        let d = displacement_shift(&spec, 32, &params, Duality::Primal).unwrap();
        assert!(d.gram_defect > 1e-8, "non-Hermitian P cannot exponentiate to a unitary");
    }

    #[test]
    fn undeformed_similarity_equals_additive_shift_on_leading_block() {
        // For f ≡ 1 the displacement acts as a ladder shift:
        // U (a) U⁻¹ = a + (g/ω)·I. The coincidence degrades near the
        // truncation edge, so it is asserted on the leading half.
        let n = 32;
        let spec = DeformationSpec::identity(n).unwrap();
        let params = single_fermion_params(1.0, 0.5, 0.3);
        let ops = ladder_matrices(&spec, n).unwrap();
        let d = displacement_shift(&spec, n, &params, Duality::Primal).unwrap();
        let u_inv = linalg::inverse(&d.matrix.entries, "test").unwrap();
        let a_k = &d.matrix.entries * &ops.deformed.entries * &u_inv;
        let beta = params.g_k() / params.omega;
        let shifted = &ops.deformed.entries + eye(n).map(|v| v * Complex64::new(beta, 0.0));
        let defect = max_abs_leading(&(&a_k - &shifted), n / 2);
        assert!(defect < 1e-10, "defect {defect:.3e}");
    }

    #[test]
    fn bk_closed_form_spectrum_matches_worked_example() {
        // ω = 1, ε_[k] = 0.5, g_[k] = 0.3 → E_2 = 2 + 0.5 − 0.09 = 2.41
        let spec = DeformationSpec::identity(32).unwrap();
        let params = single_fermion_params(1.0, 0.5, 0.3);
        let bk = bk_operator(&spec, 32, &params, Duality::Primal).unwrap();
        assert_relative_eq!(bk.spectrum[2], 2.41, max_relative = 1e-14);
        // numerical eigenvalues of the leading block reproduce the low ladder
        let m = 28;
        let block = bk.matrix.entries.view((0, 0), (m, m)).into_owned();
        let eig = linalg::hermitian_eigenvalues(&block, 1e-8).unwrap();
        for n in 0..m / 2 {
            assert_abs_diff_eq!(eig[n], bk.spectrum[n], epsilon = 1e-9);
        }
    }

    #[test]
    fn bk_diagonal_when_uncoupled() {
        // g_[k] = 0 → U = I and B is diagonal with the closed-form ladder.
        let spec = DeformationSpec::q_deformed(0.5, 16).unwrap();
        let params = ModeParams {
            omega: 2.0,
            n_modes: 2,
            eps: vec![0.4, 0.6],
            g: vec![0.0, 0.0],
            k_config: vec![true, false],
        };
        for variant in [Duality::Primal, Duality::Dual] {
            let bk = bk_operator(&spec, 16, &params, variant).unwrap();
            for n in 0..16 {
                assert_relative_eq!(
                    bk.matrix.entries[(n, n)].re,
                    bk.spectrum[n],
                    max_relative = 1e-12,
                    epsilon = 1e-12
                );
            }
            let mut off = bk.matrix.entries.clone();
            for n in 0..16 {
                off[(n, n)] = Complex64::new(0.0, 0.0);
            }
            assert!(max_abs(&off) < 1e-13);
        }
        // ε_[k]/N_B picks out only the occupied level: 0.4/2 = 0.2
        assert_relative_eq!(params.energy_shift(), 0.2, max_relative = 1e-15);
    }

    #[test]
    fn mode_params_validation_catches_shape_errors() {
        let mut p = single_fermion_params(1.0, 0.5, 0.3);
        p.g = vec![0.3, 0.1];
        assert!(p.validate().is_err());
        let mut p2 = single_fermion_params(-1.0, 0.5, 0.3);
        assert!(p2.validate().is_err());
        p2.omega = 1.0;
        p2.n_modes = 0;
        assert!(p2.validate().is_err());
    }

    #[test]
    fn dimension_guards() {
        let spec = DeformationSpec::identity(8).unwrap();
        assert!(matches!(
            ladder_matrices(&spec, 3),
            Err(Error::DimensionTooSmall { .. })
        ));
        assert!(matches!(
            ladder_matrices(&spec, 9),
            Err(Error::DimensionMismatch { .. })
        ));
    }
}
