//! Density matrices in one fermion-configuration block: diagonal
//! P-representation synthesis, photon statistics, Husimi values, projector
//! reconstruction by radial derivatives, and the self-reproduction
//! diagnostics of the coherent-state matrix elements ρ(z,z′) = ⟨η_z|ρ|η_{z′}⟩.
//!
//! Two P-representation conventions are supported and never mixed. Writing
//! the radial measure as dμ = 𝒩(r²) dλ(r) dθ, a weight P(r²) synthesizes
//!
//! ```text
//! with 𝒩:     ρ = ∫ dμ P |η_z⟩⟨η_z|        ρ(n,n) = 2π Σ_i w_i P_i u_iⁿ / {n}!
//! without 𝒩:  ρ = ∫ dλ dθ P |η_z⟩⟨η_z|     ρ(n,n) = 2π Σ_i w_i P_i u_iⁿ / ({n}! 𝒩(u_i))
//! ```
//!
//! (u_i = r_i² with r_i the quadrature nodes). Each convention carries its
//! unit-trace condition — `2π Σ w_i 𝒩(u_i) P_i = 1` with the measure's 𝒩,
//! `2π Σ w_i P_i = 1` without — and `p_to_rho` rejects a weight that is not
//! normalized for the convention it is used under; nothing is rescaled
//! silently. Note that both conditions evaluate 𝒩 at the nodes, so they
//! require a deformation table deep enough for the normalization series to
//! converge at the largest node.

use num_complex::Complex64;

use crate::deformation::{DeformationSpec, FactorialVariant};

use crate::fock_ops::{FockBasis, ModeParams, OperatorMatrix};
use crate::linalg::{self, CMat};
use crate::measure::RadialQuadrature;
use crate::states::{self, CoherentParameter};
use crate::{Duality, Error, Result};

/// Largest derivative order `n + m` accepted by [`projector_reconstruct`].
/// The reconstruction is exact at any order; the cap bounds the factorial
/// growth of the prefactors so everything stays well inside f64 range.
pub const DERIVATIVE_CAP: usize = 12;

/// Largest number of fermionic levels, hence at most 2⁴ = 16 configuration
/// blocks in [`multimode_blocks`].
pub const FERMION_MODES_CAP: usize = 4;

/// Hermiticity gate for density-matrix entries.
pub const HERMITICITY_TOL: f64 = 1e-12;

/// Unit-trace gate for density matrices.
pub const TRACE_TOL: f64 = 1e-10;

/// Eigenvalues may dip this far below zero before a matrix is rejected.
pub const EIGENVALUE_FLOOR: f64 = -1e-10;

/// Tolerance on the P-weight normalization integral.
pub const P_NORMALIZATION_TOL: f64 = 1e-8;

/// Agreement required between projector synthesis and direct assembly.
pub const SYNTHESIS_MATCH_TOL: f64 = 1e-9;

/// Slack on the weighted global trace across configuration blocks; looser
/// than [`TRACE_TOL`] because up to 2⁴ per-block deviations may add up.
pub const GLOBAL_TRACE_TOL: f64 = 1e-8;

/// A validated density matrix on the truncated deformed Fock basis of one
/// configuration block.
///
/// Construction enforces the defining properties — Hermitian to
/// [`HERMITICITY_TOL`], unit trace to [`TRACE_TOL`], eigenvalues not below
/// [`EIGENVALUE_FLOOR`] — so every value of this type is usable as a state.
#[derive(Debug, Clone)]
pub struct DensityMatrix {
    entries: CMat,
    block_label: Vec<u8>,
}

impl DensityMatrix {
    /// Validate `entries` and wrap them. `block_label` is the fermionic
    /// occupation pattern this block belongs to; leave it empty when only a
    /// single block is in play.
    pub fn new(entries: CMat, block_label: Vec<u8>) -> Result<Self> {
        if entries.nrows() != entries.ncols() {
            return Err(Error::DimensionMismatch {
                left: entries.nrows(),
                right: entries.ncols(),
                context: "density matrix shape",
            });
        }
        if entries.nrows() == 0 {
            return Err(Error::invalid_input("density matrix needs at least one level"));
        }
        let herm = linalg::max_abs(&(&entries - entries.adjoint()));
        if !(herm <= HERMITICITY_TOL) {
            return Err(Error::invalid_input(format!(
                "density matrix hermiticity defect {herm:.3e} exceeds {HERMITICITY_TOL:.1e}"
            )));
        }
        let trace: Complex64 = entries.diagonal().iter().sum();
        if !((trace.re - 1.0).abs() <= TRACE_TOL && trace.im.abs() <= HERMITICITY_TOL) {
            return Err(Error::invalid_input(format!(
                "density matrix trace {} deviates from 1 beyond {TRACE_TOL:.1e}",
                trace.re
            )));
        }
        let eigs = linalg::hermitian_eigenvalues(&entries, HERMITICITY_TOL)?;
        let min_eig = eigs.iter().cloned().fold(f64::INFINITY, f64::min);
        if !(min_eig >= EIGENVALUE_FLOOR) {
            return Err(Error::invalid_input(format!(
                "density matrix has eigenvalue {min_eig:.3e} below {EIGENVALUE_FLOOR:.1e}"
            )));
        }
        Ok(Self {
            entries,
            block_label,
        })
    }

    /// Diagonal mixture with the given level populations.
    pub fn diagonal(populations: &[f64], block_label: Vec<u8>) -> Result<Self> {
        let dim = populations.len();
        let mut entries = CMat::zeros(dim, dim);
        for (n, &p) in populations.iter().enumerate() {
            entries[(n, n)] = Complex64::new(p, 0.0);
        }
        Self::new(entries, block_label)
    }

    pub fn entries(&self) -> &CMat {
        &self.entries
    }

    pub fn dim(&self) -> usize {
        self.entries.nrows()
    }

    pub fn block_label(&self) -> &[u8] {
        &self.block_label
    }

    /// Real part of the trace (the imaginary part is zero by construction).
    pub fn trace(&self) -> f64 {
        self.entries.diagonal().iter().map(|c| c.re).sum()
    }
}

/// Which unit-trace convention a P-weight is normalized under; see the
/// module docs for the two synthesis formulas.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PConvention {
    /// The measure's normalization factor stays with the measure.
    WithN,
    /// The flat radial measure, with 𝒩⁻¹ moved into the matrix elements.
    WithoutN,
}

/// How a radial P-weight is described.
pub enum PRepresentation {
    /// A callable weight u ↦ P(u) of the squared radius.
    AnalyticRadial(Box<dyn Fn(f64) -> f64 + Send + Sync>),
    /// Values on the nodes of the quadrature that will consume the weight.
    Sampled(Vec<f64>),
}

impl std::fmt::Debug for PRepresentation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::AnalyticRadial(_) => f.write_str("AnalyticRadial(..)"),
            Self::Sampled(values) => f.debug_tuple("Sampled").field(values).finish(),
        }
    }
}

/// A radial P-weight together with the convention it has been checked under.
#[derive(Debug)]
pub struct PFunction {
    representation: PRepresentation,
    checked_for: Option<PConvention>,
}

impl PFunction {
    /// Wrap a callable weight of the squared radius.
    pub fn analytic(weight: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            representation: PRepresentation::AnalyticRadial(Box::new(weight)),
            checked_for: None,
        }
    }

    /// Wrap node samples (one value per quadrature node).
    pub fn sampled(values: Vec<f64>) -> Self {
        Self {
            representation: PRepresentation::Sampled(values),
            checked_for: None,
        }
    }

    pub fn normalization_checked(&self) -> bool {
        self.checked_for.is_some()
    }

    /// The weight evaluated on the quadrature nodes. Analytic weights are
    /// functions of u = r², so they are evaluated at the squared radii.
    pub fn values_on(&self, quad: &RadialQuadrature) -> Result<Vec<f64>> {
        let values = match &self.representation {
            PRepresentation::AnalyticRadial(weight) => {
                quad.nodes().iter().map(|&r| weight(r * r)).collect::<Vec<_>>()
            }
            PRepresentation::Sampled(values) => {
                if values.len() != quad.order() {
                    return Err(Error::DimensionMismatch {
                        left: values.len(),
                        right: quad.order(),
                        context: "sampled P values vs quadrature nodes",
                    });
                }
                values.clone()
            }
        };
        if let Some(bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::invalid_input(format!("non-finite P value {bad}")));
        }
        Ok(values)
    }

    /// The unit-trace integral of this weight under `convention`.
    pub fn normalization_integral(
        &self,
        spec: &DeformationSpec,
        quad: &RadialQuadrature,
        convention: PConvention,
    ) -> Result<f64> {
        let values = self.values_on(quad)?;
        let mut integral = 0.0;
        for (i, &r) in quad.nodes().iter().enumerate() {
            // Nodes with zero weight contribute nothing, and skipping them
            // keeps 𝒩 away from nodes where its series does not converge
            // (the edge of a bounded label disc sits on the node set).
            if values[i] == 0.0 {
                continue;
            }
            let factor = match convention {
                PConvention::WithN => normalization_at(spec, r * r)?,
                PConvention::WithoutN => 1.0,
            };
            integral += std::f64::consts::TAU * quad.weights()[i] * factor * values[i];
        }
        Ok(integral)
    }

    /// Verify the unit-trace condition under `convention` and record it.
    pub fn checked(
        mut self,
        spec: &DeformationSpec,
        quad: &RadialQuadrature,
        convention: PConvention,
    ) -> Result<Self> {
        let integral = self.normalization_integral(spec, quad, convention)?;
        if !((integral - 1.0).abs() <= P_NORMALIZATION_TOL) {
            return Err(Error::UnnormalizedP {
                integral,
                tolerance: P_NORMALIZATION_TOL,
            });
        }
        self.checked_for = Some(convention);
        Ok(self)
    }
}

/// `𝒩(u)` evaluated through the primal normalization series.
fn normalization_at(spec: &DeformationSpec, u: f64) -> Result<f64> {
    Ok(states::normalization_series(spec, Complex64::new(u, 0.0), Duality::Primal)?.re)
}

/// Amplitudes ⟨Φ_n|η_z⟩ = 𝒩(|z|²)^{−1/2} zⁿ/√({n}!) for n < dim, with the
/// usual domain and convergence checks. The normalization uses the full
/// series, so the vector's norm is the retained fraction of the state.
fn ncs_amplitudes(
    spec: &DeformationSpec,
    z: Complex64,
    dim: usize,
    variant: Duality,
) -> Result<Vec<Complex64>> {
    let param = CoherentParameter::plain(z);
    let norm = states::normalization(&[spec], &param, variant)?;
    let fact = FactorialVariant::from(variant);
    let scale = norm.sqrt();
    let mut amps = Vec::with_capacity(dim);
    for n in 0..dim {
        let denom = spec.deformed_factorial(n, fact)?.sqrt() * scale;
        amps.push(z.powu(n as u32) / denom);
    }
    Ok(amps)
}

/// `⟨l|M|r⟩` for explicit coefficient vectors.
fn sandwich(left: &[Complex64], matrix: &CMat, right: &[Complex64]) -> Complex64 {
    let mut acc = Complex64::new(0.0, 0.0);
    for (i, l) in left.iter().enumerate() {
        let mut row = Complex64::new(0.0, 0.0);
        for (j, r) in right.iter().enumerate() {
            row += matrix[(i, j)] * r;
        }
        acc += l.conj() * row;
    }
    acc
}

/// Rank-1 density matrix |η_z⟩⟨η_z| truncated to `dim` levels.
///
/// The truncated trace is the retained norm of the state, so the unit-trace
/// gate doubles as a check that `dim` actually holds the state.
pub fn coherent_projector(spec: &DeformationSpec, z: Complex64, dim: usize) -> Result<DensityMatrix> {
    let amps = ncs_amplitudes(spec, z, dim, Duality::Primal)?;
    let mut entries = CMat::zeros(dim, dim);
    for (n, a) in amps.iter().enumerate() {
        for (m, b) in amps.iter().enumerate() {
            entries[(n, m)] = a * b.conj();
        }
    }
    DensityMatrix::new(entries, Vec::new())
}

/// Synthesize the diagonal density matrix of a radial P-weight.
///
/// The weight must be normalized under `convention` (verified here unless
/// [`PFunction::checked`] already recorded it); the unit-trace gate of
/// [`DensityMatrix`] then also confirms that the truncated basis holds the
/// synthesized state, i.e. that P puts no weight where the level ladder ends.
pub fn p_to_rho(
    spec: &DeformationSpec,
    quad: &RadialQuadrature,
    p: &PFunction,
    convention: PConvention,
) -> Result<DensityMatrix> {
    if p.checked_for != Some(convention) {
        let integral = p.normalization_integral(spec, quad, convention)?;
        if !((integral - 1.0).abs() <= P_NORMALIZATION_TOL) {
            return Err(Error::UnnormalizedP {
                integral,
                tolerance: P_NORMALIZATION_TOL,
            });
        }
    }
    let values = p.values_on(quad)?;
    let dim = spec.n_max();
    let mut scaled = Vec::with_capacity(quad.order());
    for (i, &r) in quad.nodes().iter().enumerate() {
        if values[i] == 0.0 {
            scaled.push(0.0);
            continue;
        }
        let factor = match convention {
            PConvention::WithN => 1.0,
            PConvention::WithoutN => 1.0 / normalization_at(spec, r * r)?,
        };
        scaled.push(std::f64::consts::TAU * quad.weights()[i] * values[i] * factor);
    }
    let mut entries = CMat::zeros(dim, dim);
    for n in 0..dim {
        let fact = spec.deformed_factorial(n, FactorialVariant::Braced)?;
        let mut diag = 0.0;
        for (i, &r) in quad.nodes().iter().enumerate() {
            diag += scaled[i] * (r * r).powi(n as i32);
        }
        entries[(n, n)] = Complex64::new(diag / fact, 0.0);
    }
    DensityMatrix::new(entries, Vec::new())
}

/// Level occupation law 𝒫(n) = 𝒩(|z|²)⁻¹ |z|^{2n}/{n}! of the coherent
/// state labelled by `param`, for n = 0..n_max−1. Reduces to the Poisson
/// distribution with mean |z|² when the deformation is trivial.
pub fn photon_distribution(spec: &DeformationSpec, param: &CoherentParameter) -> Result<Vec<f64>> {
    if param.modes() != 1 {
        return Err(Error::DimensionMismatch {
            left: param.modes(),
            right: 1,
            context: "photon distribution is single-mode",
        });
    }
    let norm = states::normalization(&[spec], param, Duality::Primal)?;
    let w = param.modulus_squared(0);
    let mut dist = Vec::with_capacity(spec.n_max());
    for n in 0..spec.n_max() {
        dist.push(w.powi(n as i32) / (spec.deformed_factorial(n, FactorialVariant::Braced)? * norm));
    }
    Ok(dist)
}

/// Husimi values ⟨η_z|ρ|η_z⟩ on a grid of coherent labels. Nonnegative and
/// at most 1 because ρ is positive with unit trace and |η_z⟩ is normalized.
pub fn husimi(spec: &DeformationSpec, rho: &DensityMatrix, grid: &[Complex64]) -> Result<Vec<f64>> {
    let mut values = Vec::with_capacity(grid.len());
    for &z in grid {
        let amps = ncs_amplitudes(spec, z, rho.dim(), Duality::Primal)?;
        values.push(sandwich(&amps, rho.entries(), &amps).re);
    }
    Ok(values)
}

/// Plain integer factorial, used for the derivative prefactor. Safe for the
/// capped orders (12! ≈ 4.8e8).
fn integer_factorial(n: usize) -> f64 {
    (1..=n).fold(1.0, |acc, k| acc * k as f64)
}

/// Reconstruct the matrix unit |Φ_n⟩⟨Φ_m| from angular filtering and radial
/// derivatives of the coherent-state dyad.
///
/// The reconstruction evaluates
///
/// ```text
/// |Φ_n⟩⟨Φ_m| = (√({n}!{m}!)/(m+n)!) (d/dr)^{m+n} ∮(dθ/2π) e^{i(m−n)θ} 𝒩(r²)|re^{iθ}⟩⟨re^{iθ}| at r = 0
/// ```
///
/// in three honest steps: the θ-integral keeps exactly the dyad terms
/// |Φ_j⟩⟨Φ_k| with j − k = n − m (angular selection), what remains is a
/// finite matrix-valued polynomial in r whose coefficients are collected
/// degree by degree, and the derivative at r = 0 picks the degree-(m+n)
/// coefficient times (m+n)!. No finite differences are involved.
///
/// `variant` selects which deformed factorials weight the dyad (the dual
/// family replaces {n}! by {n}_d! throughout, and reconstructs the same
/// matrix unit).
pub fn projector_reconstruct(
    spec: &DeformationSpec,
    n: usize,
    m: usize,
    variant: Duality,
) -> Result<OperatorMatrix> {
    if n + m > DERIVATIVE_CAP {
        return Err(Error::CapExceeded {
            what: "radial derivative order n + m",
            got: n + m,
            cap: DERIVATIVE_CAP,
        });
    }
    let fact = FactorialVariant::from(variant);
    let dim = spec.n_max().min(spec.factorial_limit(fact) + 1);
    if n >= dim || m >= dim {
        return Err(Error::IndexOutOfRange {
            index: n.max(m),
            n_max: dim - 1,
        });
    }

    // Angular selection followed by coefficient collection: degree d holds
    // Σ_{j−k = n−m, j+k = d} |Φ_j⟩⟨Φ_k| / √({j}!{k}!).
    let mut coefficients = vec![CMat::zeros(dim, dim); 2 * dim - 1];
    for j in 0..dim {
        for k in 0..dim {
            if j as i64 - k as i64 != n as i64 - m as i64 {
                continue;
            }
            let weight = (spec.deformed_factorial(j, fact)? * spec.deformed_factorial(k, fact)?)
                .sqrt()
                .recip();
            coefficients[j + k][(j, k)] += Complex64::new(weight, 0.0);
        }
    }

    let derivative_order = n + m;
    let derivative = integer_factorial(derivative_order);
    let prefactor =
        (spec.deformed_factorial(n, fact)? * spec.deformed_factorial(m, fact)?).sqrt() / derivative;
    let entries = &coefficients[derivative_order] * Complex64::new(prefactor * derivative, 0.0);
    Ok(OperatorMatrix::new(FockBasis::bare(dim), entries))
}

/// Build a density matrix from a coefficient table by summing reconstructed
/// matrix units, and cross-check the sum against direct assembly.
///
/// The table must be Hermitian with unit trace, and small enough that every
/// (n, m) stays within [`DERIVATIVE_CAP`]. The returned matrix embeds the
/// table in the `dim`-level basis; the synthesis route must agree with it to
/// [`SYNTHESIS_MATCH_TOL`] entrywise or the call fails.
pub fn glauber_sudarshan_rho(
    spec: &DeformationSpec,
    coefficients: &CMat,
    variant: Duality,
) -> Result<DensityMatrix> {
    if coefficients.nrows() != coefficients.ncols() {
        return Err(Error::DimensionMismatch {
            left: coefficients.nrows(),
            right: coefficients.ncols(),
            context: "coefficient table shape",
        });
    }
    let levels = coefficients.nrows();
    if levels == 0 {
        return Err(Error::invalid_input("coefficient table needs at least one level"));
    }
    if 2 * (levels - 1) > DERIVATIVE_CAP {
        return Err(Error::CapExceeded {
            what: "coefficient table levels",
            got: levels,
            cap: DERIVATIVE_CAP / 2 + 1,
        });
    }
    let herm = linalg::max_abs(&(coefficients - coefficients.adjoint()));
    if !(herm <= HERMITICITY_TOL) {
        return Err(Error::invalid_input(format!(
            "coefficient table hermiticity defect {herm:.3e} exceeds {HERMITICITY_TOL:.1e}"
        )));
    }
    let trace: Complex64 = coefficients.diagonal().iter().sum();
    if !((trace.re - 1.0).abs() <= TRACE_TOL && trace.im.abs() <= HERMITICITY_TOL) {
        return Err(Error::invalid_input(format!(
            "coefficient table trace {} deviates from 1 beyond {TRACE_TOL:.1e}",
            trace.re
        )));
    }

    let probe = projector_reconstruct(spec, 0, 0, variant)?;
    let dim = probe.dim();
    let mut synthesized = CMat::zeros(dim, dim);
    let mut direct = CMat::zeros(dim, dim);
    for n in 0..levels {
        for m in 0..levels {
            let unit = projector_reconstruct(spec, n, m, variant)?;
            synthesized += unit.entries * coefficients[(n, m)];
            direct[(n, m)] = coefficients[(n, m)];
        }
    }
    let defect = linalg::max_abs(&(&synthesized - &direct));
    if !(defect <= SYNTHESIS_MATCH_TOL) {
        return Err(Error::CrossCheckFailure {
            context: "projector synthesis vs direct assembly",
            defect,
            tolerance: SYNTHESIS_MATCH_TOL,
        });
    }
    DensityMatrix::new(direct, Vec::new())
}

/// Diagnostics of the coherent-state matrix elements ρ(z,z′) = ⟨η_z|ρ|η_{z′}⟩.
#[derive(Debug, Clone, Copy)]
pub struct RhoKernelReport {
    /// max |ρ(z,z′) − conj(ρ(z′,z))| over the probe pairs.
    pub herm_defect: f64,
    /// min ρ(z,z) over every probe point.
    pub min_diag: f64,
    /// max |∫dμ(z″) 𝒦(z,z″) ρ(z″,z′) − ρ(z,z′)| over the probe pairs: the
    /// self-reproduction defect under the quadrature measure.
    pub idem_defect: f64,
}

/// Resolution diagonal R_n = 2π Σ_i w_i u_iⁿ/{n}! of the quadrature: the
/// matrix of ∫dμ |η⟩⟨η| in the level basis, which multiplies level n of
/// anything the measure is wrapped around.
fn resolution_diagonal(spec: &DeformationSpec, quad: &RadialQuadrature, dim: usize) -> Result<Vec<f64>> {
    let mut diag = Vec::with_capacity(dim);
    for n in 0..dim {
        diag.push(
            std::f64::consts::TAU * quad.radial_moment(n)
                / spec.deformed_factorial(n, FactorialVariant::Braced)?,
        );
    }
    Ok(diag)
}

/// Evaluate the Hermiticity, diagonal positivity and self-reproduction of
/// ρ(z,z′) on the given probe pairs.
///
/// The reported `idem_defect` measures ∫dμ(z″) 𝒦(z,z″) ρ(z″,z′) − ρ(z,z′):
/// reproduction of ρ under one application of the overlap kernel, the form
/// that holds for every unit-trace ρ. The θ-integral is taken analytically
/// (it enforces level matching); the radial part uses the quadrature, so the
/// defect honestly reflects how well the discrete measure resolves the
/// levels ρ occupies. The companion check
/// [`rho_double_composition_defect`] composes ρ with itself instead, which
/// collapses to ρ only for projection-valued (pure) states.
pub fn rho_kernel_properties(
    spec: &DeformationSpec,
    quad: &RadialQuadrature,
    rho: &DensityMatrix,
    pairs: &[(Complex64, Complex64)],
) -> Result<RhoKernelReport> {
    if pairs.is_empty() {
        return Err(Error::invalid_input("at least one probe pair required"));
    }
    let dim = rho.dim();
    let resolution = resolution_diagonal(spec, quad, dim)?;
    let mut herm_defect: f64 = 0.0;
    let mut min_diag = f64::INFINITY;
    let mut idem_defect: f64 = 0.0;
    for &(a, b) in pairs {
        let va = ncs_amplitudes(spec, a, dim, Duality::Primal)?;
        let vb = ncs_amplitudes(spec, b, dim, Duality::Primal)?;
        let e_ab = sandwich(&va, rho.entries(), &vb);
        let e_ba = sandwich(&vb, rho.entries(), &va);
        herm_defect = herm_defect.max((e_ab - e_ba.conj()).norm());
        min_diag = min_diag.min(sandwich(&va, rho.entries(), &va).re);
        min_diag = min_diag.min(sandwich(&vb, rho.entries(), &vb).re);
        // Kernel insertion: resolve the identity between ⟨η_z| and ρ.
        let mut reproduced = Complex64::new(0.0, 0.0);
        for i in 0..dim {
            let mut row = Complex64::new(0.0, 0.0);
            for j in 0..dim {
                row += rho.entries()[(i, j)] * vb[j];
            }
            reproduced += va[i].conj() * resolution[i] * row;
        }
        idem_defect = idem_defect.max((reproduced - e_ab).norm());
    }
    Ok(RhoKernelReport {
        herm_defect,
        min_diag,
        idem_defect,
    })
}

/// max |∫dμ(z″) ρ(z,z″) ρ(z″,z′) − ρ(z,z′)| over the probe pairs: the
/// literal composition of ρ(·,·) with itself under the measure.
///
/// Resolving the identity shows the integral equals ⟨η_z|ρ²|η_{z′}⟩, so the
/// defect vanishes precisely when ρ is a projection — rank-1 states pass at
/// quadrature accuracy, while any genuine mixture is off by O(1 − tr ρ²).
pub fn rho_double_composition_defect(
    spec: &DeformationSpec,
    quad: &RadialQuadrature,
    rho: &DensityMatrix,
    pairs: &[(Complex64, Complex64)],
) -> Result<f64> {
    if pairs.is_empty() {
        return Err(Error::invalid_input("at least one probe pair required"));
    }
    let dim = rho.dim();
    let resolution = resolution_diagonal(spec, quad, dim)?;
    let mut defect: f64 = 0.0;
    for &(a, b) in pairs {
        let va = ncs_amplitudes(spec, a, dim, Duality::Primal)?;
        let vb = ncs_amplitudes(spec, b, dim, Duality::Primal)?;
        let e_ab = sandwich(&va, rho.entries(), &vb);
        // ρ (measure insertion) ρ: scale the inner index by the resolution.
        let mut rho_vb = vec![Complex64::new(0.0, 0.0); dim];
        for i in 0..dim {
            for j in 0..dim {
                rho_vb[i] += rho.entries()[(i, j)] * vb[j];
            }
            rho_vb[i] *= resolution[i];
        }
        let mut composed = Complex64::new(0.0, 0.0);
        for i in 0..dim {
            let mut row = Complex64::new(0.0, 0.0);
            for j in 0..dim {
                row += rho.entries()[(i, j)] * rho_vb[j];
            }
            composed += va[i].conj() * row;
        }
        defect = defect.max((composed - e_ab).norm());
    }
    Ok(defect)
}

/// Summary of the block-diagonal state over all fermionic configurations.
#[derive(Debug, Clone)]
pub struct BlockReport {
    /// Occupation patterns in ladder order: bit j of entry k is (k >> j) & 1,
    /// so the first level flips fastest.
    pub labels: Vec<Vec<u8>>,
    /// Σ_k weight_k · trace(ρ_k), validated against 1.
    pub global_trace: f64,
    /// Husimi value of each block at its probe label.
    pub block_husimi: Vec<f64>,
    /// Constant energy offset ε_\[k\] − g²_\[k\] Σ_l 1/ω_l of each block.
    pub energy_shifts: Vec<f64>,
}

/// Assemble the bookkeeping for a block-diagonal density matrix over the 2^M
/// fermionic configurations.
///
/// `specs` holds either one deformation shared by all blocks or one per
/// block; `probes`, `blocks` and `weights` are per-block in ladder order.
/// The fermionic sector enters only through the summed couplings
/// g_\[k\] = Σ_j k_j g_j and ε_\[k\] = Σ_j k_j ε_j of each occupation pattern;
/// the block weights are caller input and must sum to 1.
pub fn multimode_blocks(
    specs: &[&DeformationSpec],
    probes: &[Complex64],
    blocks: &[&DensityMatrix],
    weights: &[f64],
    fermion_eps: &[f64],
    fermion_g: &[f64],
    omegas: &[f64],
) -> Result<BlockReport> {
    let modes = fermion_eps.len();
    if fermion_g.len() != modes {
        return Err(Error::DimensionMismatch {
            left: modes,
            right: fermion_g.len(),
            context: "fermionic level parameters",
        });
    }
    if modes == 0 || modes > FERMION_MODES_CAP {
        return Err(Error::CapExceeded {
            what: "fermionic levels",
            got: modes,
            cap: FERMION_MODES_CAP,
        });
    }
    if omegas.is_empty() || omegas.iter().any(|&w| !(w > 0.0) || !w.is_finite()) {
        return Err(Error::invalid_input("mode frequencies must be positive and finite"));
    }
    let expected = 1usize << modes;
    if blocks.len() != expected {
        return Err(Error::BlockCountMismatch {
            expected,
            got: blocks.len(),
        });
    }
    if specs.len() != 1 && specs.len() != expected {
        return Err(Error::DimensionMismatch {
            left: specs.len(),
            right: expected,
            context: "deformation specs vs configuration blocks",
        });
    }
    for (name, len) in [("probes", probes.len()), ("weights", weights.len())] {
        if len != expected {
            return Err(Error::DimensionMismatch {
                left: len,
                right: expected,
                context: match name {
                    "probes" => "probe labels vs configuration blocks",
                    _ => "block weights vs configuration blocks",
                },
            });
        }
    }
    if weights.iter().any(|&w| !w.is_finite() || w < 0.0) {
        return Err(Error::invalid_input("block weights must be finite and nonnegative"));
    }
    let weight_sum: f64 = weights.iter().sum();
    if !((weight_sum - 1.0).abs() <= GLOBAL_TRACE_TOL) {
        return Err(Error::invalid_input(format!(
            "block weights sum to {weight_sum}, expected 1"
        )));
    }

    let inverse_omega_sum: f64 = omegas.iter().map(|w| 1.0 / w).sum();
    let mut labels = Vec::with_capacity(expected);
    let mut block_husimi = Vec::with_capacity(expected);
    let mut energy_shifts = Vec::with_capacity(expected);
    let mut global_trace = 0.0;
    for k in 0..expected {
        let label: Vec<u8> = (0..modes).map(|j| ((k >> j) & 1) as u8).collect();
        let block = blocks[k];
        if !block.block_label().is_empty() && block.block_label() != label.as_slice() {
            return Err(Error::invalid_input(format!(
                "block {k} is labelled {:?} but sits at configuration {:?}",
                block.block_label(),
                label
            )));
        }
        let spec = if specs.len() == 1 { specs[0] } else { specs[k] };
        global_trace += weights[k] * block.trace();
        block_husimi.push(husimi(spec, block, &[probes[k]])?[0]);
        let eps_k: f64 = label
            .iter()
            .zip(fermion_eps)
            .filter(|(&bit, _)| bit == 1)
            .map(|(_, &e)| e)
            .sum();
        let g_k: f64 = label
            .iter()
            .zip(fermion_g)
            .filter(|(&bit, _)| bit == 1)
            .map(|(_, &g)| g)
            .sum();
        energy_shifts.push(eps_k - g_k * g_k * inverse_omega_sum);
        labels.push(label);
    }
    if !((global_trace - 1.0).abs() <= GLOBAL_TRACE_TOL) {
        return Err(Error::invalid_input(format!(
            "weighted global trace {global_trace} deviates from 1"
        )));
    }
    Ok(BlockReport {
        labels,
        global_trace,
        block_husimi,
        energy_shifts,
    })
}

/// Per-mode oracle for the block energy shift: summing the per-mode constants
/// of [`ModeParams`] over all bosonic modes reproduces ε_\[k\] − g²_\[k\] Σ 1/ω.
pub fn energy_shift_from_mode_params(
    fermion_eps: &[f64],
    fermion_g: &[f64],
    k_config: &[bool],
    omegas: &[f64],
) -> Result<f64> {
    let mut total = 0.0;
    for &omega in omegas {
        let params = ModeParams {
            omega,
            n_modes: omegas.len(),
            eps: fermion_eps.to_vec(),
            g: fermion_g.to_vec(),
            k_config: k_config.to_vec(),
        };
        params.validate()?;
        total += params.energy_shift();
    }
    Ok(total)
}
