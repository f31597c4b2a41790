//! Quantum-optics diagnostics of the coherent family: signal-to-noise ratio,
//! Mandel parameter / Fano factor, and the two-mode su(1,1)-type quadrature
//! squeezing test.
//!
//! All single-mode quantities ride on the quadrature machinery of
//! [`crate::quantize`] and inherit its convention: series expressions are the
//! primary route, literal matrix sandwiches the cross-check.
//!
//! ```text
//! snr    = ⟨Q⟩²/(ΔQ)²          = 2|z|²cos²φ / (−|z|²/2 + 𝒢(|z|²))
//! mandel = (Δ𝒩)²/⟨𝒩⟩ − 1       = 𝒩(u)⁻¹ Σ_m {m+1} uᵐ/{m}! − (u + 1)
//! ```
//!
//! with `𝒩 = A†A` the deformed level operator (eigenvalues `{n} = n f(n)²`)
//! and `φ = arg z`. The two-mode system couples a pair of deformed modes
//! through
//!
//! ```text
//! K₋ = A_l A_k     K₊ = A′†_l A′†_k     K₀ = (𝒩_l + 𝒩_k + 1)/2
//! ```
//!
//! where `𝒩 = A′†A` is the *undeformed* level counter; the mixed primal/dual
//! pairing closes the algebra `[K₊, K₋] = −2K₀`, `[K₀, K₊] = K₊` for every
//! deformation, while `K₊ = K₋†` only when `f ≡ 1`.

use num_complex::Complex64;

use crate::deformation::DeformationSpec;
use crate::fock_ops::{self, FockBasis, OperatorMatrix};
use crate::linalg::{self, CMat, CVec};
use crate::quantize::{self, Symbol, DIVISION_FLOOR};
use crate::states::CoherentState;
use crate::{Duality, Error, Result};

/// Budget for series vs matrix routes, matching the dispersion cross-check.
pub const OPTICS_CROSS_TOL: f64 = 1e-8;

/// Norm window within which a raw amplitude vector counts as a state.
pub const STATE_NORM_TOL: f64 = 1e-8;

/// Signal-to-noise ratio ⟨Q⟩²/(ΔQ)² of a plane-labelled coherent state.
///
/// The signal is the squared position coordinate `q² = 2|z|²cos²φ = 2(Re z)²`;
/// the noise is the quadrature dispersion (already cross-checked inside
/// [`quantize::dispersions`]). Action-angle labels have no closed signal and
/// are refused.
pub fn snr(spec: &DeformationSpec, state: &CoherentState) -> Result<f64> {
    if state.modes() != 1 {
        return Err(Error::DimensionMismatch {
            left: state.modes(),
            right: 1,
            context: "signal-to-noise ratio is single-mode",
        });
    }
    let z = match &state.param {
        crate::states::CoherentParameter::Plain { z } => z[0],
        crate::states::CoherentParameter::ActionAngle { .. } => {
            return Err(Error::FormMismatch {
                context: "signal-to-noise ratio",
                required: "plain",
            })
        }
    };
    let report = quantize::dispersions(spec, state)?;
    if report.dq2 < DIVISION_FLOOR {
        return Err(Error::DivisionDegenerate {
            context: "quadrature dispersion in the signal-to-noise ratio",
            magnitude: report.dq2,
        });
    }
    Ok(2.0 * z.re * z.re / report.dq2)
}

/// Level statistics of a coherent state.
#[derive(Debug, Clone, Copy)]
pub struct MandelReport {
    /// (Δ𝒩)²/⟨𝒩⟩ − 1; negative for narrower-than-reference statistics.
    pub q_mandel: f64,
    /// Fano factor (Δ𝒩)²/⟨𝒩⟩ = q_mandel + 1.
    pub fano: f64,
    /// True when the ratio was removable only in the limit (label at the
    /// origin) and the analytic limit {1} − 1 = f(1)² − 1 was returned.
    pub at_zero_limit: bool,
}

/// Mandel parameter of `state` w.r.t. the deformed level operator `A†A`.
///
/// Computed from the reduced series `𝒩(u)⁻¹ Σ_m {m+1} uᵐ/{m}! − (u+1)` and
/// cross-checked against the matrix sandwich of `(A†A)` and `(A†A)²`.
pub fn mandel(spec: &DeformationSpec, state: &CoherentState) -> Result<MandelReport> {
    if state.modes() != 1 {
        return Err(Error::DimensionMismatch {
            left: state.modes(),
            right: 1,
            context: "Mandel parameter is single-mode",
        });
    }
    let variant = state.variant;
    let u = state.param.modulus_squared(0);
    if u == 0.0 {
        let first = spec.n_f_squared(1, variant)?;
        return Ok(MandelReport {
            q_mandel: first - 1.0,
            fano: first,
            at_zero_limit: true,
        });
    }
    let report = quantize::dispersions(spec, state)?;
    // 𝒩⁻¹Σ{m+1}uᵐ/{m}! = 2𝒢, already series/matrix cross-checked there.
    let q_series = 2.0 * report.g_value - (u + 1.0);

    // Independent matrix route through ordered ladder products.
    let dim = state.dim_per_mode;
    let z = quantize::quantize(spec, dim, Symbol::Z, variant)?;
    let zbar = quantize::quantize(spec, dim, Symbol::ZBar, variant)?;
    let n_mean = quantize::expectation(&[&zbar, &z], state)?.re;
    let n2_mean = quantize::expectation(&[&zbar, &z, &zbar, &z], state)?.re;
    if n_mean.abs() < DIVISION_FLOOR {
        return Err(Error::DivisionDegenerate {
            context: "mean level value in the Mandel ratio",
            magnitude: n_mean,
        });
    }
    let q_matrix = (n2_mean - n_mean * n_mean) / n_mean - 1.0;
    let defect = (q_series - q_matrix).abs();
    if defect > OPTICS_CROSS_TOL {
        return Err(Error::CrossCheckFailure {
            context: "Mandel parameter: series vs matrix route",
            defect,
            tolerance: OPTICS_CROSS_TOL,
        });
    }
    Ok(MandelReport {
        q_mandel: q_series,
        fano: q_series + 1.0,
        at_zero_limit: false,
    })
}

/// The two-mode ladder triple and its verified commutation table.
#[derive(Debug, Clone)]
pub struct Su11System {
    /// K₋ = A_l ⊗ A_k (deformed lowering on both modes).
    pub kminus: OperatorMatrix,
    /// K₊ = A′†_l ⊗ A′†_k (dual raising on both modes).
    pub kplus: OperatorMatrix,
    /// K₀ = (𝒩_l + 𝒩_k + 1)/2 with 𝒩 = A′†A (plain level counter).
    pub k0: OperatorMatrix,
    /// max |[K₊,K₋] + 2K₀| over the interior block.
    pub ladder_defect: f64,
    /// max |[K₀,K₊] − K₊| over the interior block.
    pub raising_defect: f64,
    dim_per_mode: usize,
    /// Exact diagonal of [K₋, K₋†]: {n_l+1}{n_k+1} − {n_l}{n_k}.
    comm_diag: Vec<f64>,
}

/// Squeezing verdict of a two-mode state against the X/Y quadratures of K₋.
#[derive(Debug, Clone, Copy)]
pub struct SqueezingReport {
    pub dx2: f64,
    pub dy2: f64,
    /// ¼|⟨[K₋, K₋†]⟩|, the squeezing threshold.
    pub comm_bound: f64,
    pub x_squeezed: bool,
    pub y_squeezed: bool,
}

/// max |M(r,c)| over multi-indices whose mode components all stay ≤ `hi`.
fn interior_max(m: &CMat, dim_per_mode: usize, hi: usize) -> f64 {
    let mut worst = 0.0_f64;
    for rl in 0..=hi {
        for rk in 0..=hi {
            for cl in 0..=hi {
                for ck in 0..=hi {
                    let r = rl * dim_per_mode + rk;
                    let c = cl * dim_per_mode + ck;
                    worst = worst.max(m[(r, c)].norm());
                }
            }
        }
    }
    worst
}

/// Build the two-mode ladder triple on `n_max` levels per mode and measure
/// its commutation defects on the interior block (all mode indices
/// ≤ n_max − 3, so no product reaches the truncation edge).
pub fn su_f11(
    spec_l: &DeformationSpec,
    spec_k: &DeformationSpec,
    n_max: usize,
) -> Result<Su11System> {
    let ops_l = fock_ops::ladder_matrices(spec_l, n_max)?;
    let ops_k = fock_ops::ladder_matrices(spec_k, n_max)?;

    let kminus = linalg::kron(&ops_l.deformed.entries, &ops_k.deformed.entries);
    let kplus = linalg::kron(&ops_l.dual_dag.entries, &ops_k.dual_dag.entries);

    let number_l = &ops_l.dual_dag.entries * &ops_l.deformed.entries;
    let number_k = &ops_k.dual_dag.entries * &ops_k.deformed.entries;
    let eye = linalg::eye(n_max);
    let dim = n_max * n_max;
    let total = linalg::kron(&number_l, &eye) + linalg::kron(&eye, &number_k) + linalg::eye(dim);
    let k0 = total.map(|v| v * Complex64::new(0.5, 0.0));

    let ladder = linalg::commutator(&kplus, &kminus) + k0.map(|v| v * Complex64::new(2.0, 0.0));
    let raising = linalg::commutator(&k0, &kplus) - &kplus;
    let hi = n_max - 3;
    let ladder_defect = interior_max(&ladder, n_max, hi);
    let raising_defect = interior_max(&raising, n_max, hi);

    let mut comm_diag = Vec::with_capacity(dim);
    for nl in 0..n_max {
        for nk in 0..n_max {
            let up = spec_l.n_f_squared(nl + 1, Duality::Primal)?
                * spec_k.n_f_squared(nk + 1, Duality::Primal)?;
            let down = spec_l.n_f_squared(nl, Duality::Primal)?
                * spec_k.n_f_squared(nk, Duality::Primal)?;
            comm_diag.push(up - down);
        }
    }

    let basis = FockBasis::bare(dim);
    Ok(Su11System {
        kminus: OperatorMatrix::new(basis, kminus),
        kplus: OperatorMatrix::new(basis, kplus),
        k0: OperatorMatrix::new(basis, k0),
        ladder_defect,
        raising_defect,
        dim_per_mode: n_max,
        comm_diag,
    })
}

impl Su11System {
    pub fn dim_per_mode(&self) -> usize {
        self.dim_per_mode
    }

    /// Exact diagonal of [K₋, K₋†] in multi-index order (mode l slowest).
    pub fn commutator_diag(&self) -> &[f64] {
        &self.comm_diag
    }

    /// Quadratures X = (K₋† + K₋)/2 and Y = i(K₋† − K₋)/2 — Hermitian by
    /// construction (note: built from K₋†, not K₊; the two differ for f ≠ 1).
    pub fn xy_quadratures(&self) -> (OperatorMatrix, OperatorMatrix) {
        let kdag = self.kminus.entries.adjoint();
        let x = (&kdag + &self.kminus.entries).map(|v| v * Complex64::new(0.5, 0.0));
        let y = (&kdag - &self.kminus.entries).map(|v| v * Complex64::new(0.0, 0.5));
        let basis = self.kminus.basis;
        (
            OperatorMatrix::new(basis, x),
            OperatorMatrix::new(basis, y),
        )
    }

    /// Dispersions of X and Y in the given two-mode amplitude vector
    /// (flattened, mode l slowest), against the threshold ¼|⟨[K₋,K₋†]⟩|.
    ///
    /// The threshold uses the exact commutator diagonal, so it carries no
    /// truncation error; the dispersions are honest matrix sandwiches and
    /// assume the state keeps negligible mass at the top levels.
    pub fn squeezing(&self, amplitudes: &[Complex64]) -> Result<SqueezingReport> {
        let dim = self.kminus.dim();
        if amplitudes.len() != dim {
            return Err(Error::DimensionMismatch {
                left: amplitudes.len(),
                right: dim,
                context: "amplitude vector vs two-mode operator dimension",
            });
        }
        let norm: f64 = amplitudes.iter().map(|c| c.norm_sqr()).sum();
        if (norm - 1.0).abs() > STATE_NORM_TOL {
            return Err(Error::invalid_input(format!(
                "amplitude vector has norm² = {norm:.12}, expected 1 within {STATE_NORM_TOL:.0e}"
            )));
        }
        let v = CVec::from_iterator(dim, amplitudes.iter().copied());
        let (x, y) = self.xy_quadratures();
        let disp = |m: &CMat| -> f64 {
            // m is Hermitian: ⟨M²⟩ = ‖Mv‖², ⟨M⟩ = Re v†(Mv).
            let w = m * &v;
            let mean: Complex64 = v.iter().zip(w.iter()).map(|(a, b)| a.conj() * b).sum();
            w.norm_squared() - mean.re * mean.re
        };
        let dx2 = disp(&x.entries);
        let dy2 = disp(&y.entries);
        let comm_expect: f64 = amplitudes
            .iter()
            .zip(&self.comm_diag)
            .map(|(a, d)| a.norm_sqr() * d)
            .sum();
        let comm_bound = 0.25 * comm_expect.abs();
        Ok(SqueezingReport {
            dx2,
            dy2,
            comm_bound,
            x_squeezed: dx2 < comm_bound,
            y_squeezed: dy2 < comm_bound,
        })
    }
}
