//! Nonlinear coherent states, their overlap kernel and spectral evolution.
//!
//! A (primal) coherent state on one mode is
//!
//! ```text
//! |η_z⟩ = 𝒩(|z|²)^{−1/2} Σ_n zⁿ/√({n}!) |Φ_n⟩,      𝒩(w) = Σ_n wⁿ/{n}!
//! ```
//!
//! with the dual family obtained by `{n}! → {n}_d!`. Multimode states are
//! plain tensor products; normalizations multiply and kernels factorize, so
//! everything is stored per mode.
//!
//! Amplitudes exist in two parametrizations: the `plain` complex label `z`,
//! and the `action-angle` pair `(J, γ)` where the n-th "power" of the label
//! is `J^{n/2}·e^{−i ε_n γ}` with `ε_n = n f(n)`. For `f ≡ 1` the two agree
//! under `J = |z|²`, `γ = −arg z`; for general `f` the action-angle family is
//! the one whose time evolution is a pure angle shift `γ → γ + ωt`.

use num_complex::Complex64;

use crate::deformation::{DeformationSpec, FactorialVariant, Radius};
use crate::{Duality, Error, Result};

/// Per-mode truncation cap once more than one mode is in play.
pub const MULTIMODE_DIM_CAP: usize = 32;
/// Cap on the number of bosonic modes.
pub const MODES_CAP: usize = 3;
/// Relative tail bound demanded of every normalization-type series; matches
/// the probability-mass budget of state truncation below.
pub const SERIES_TAIL_TOL: f64 = 1e-10;
/// Probability mass the truncation is allowed to drop from a built state.
pub const TAIL_MASS_LIMIT: f64 = 1e-10;

/// Coherent-state label, one entry per mode.
#[derive(Debug, Clone, PartialEq)]
pub enum CoherentParameter {
    /// The complex amplitude `z_l` per mode.
    Plain { z: Vec<Complex64> },
    /// Action-angle form `(J_l, γ_l)`; the label's n-th power is
    /// `J^{n/2} e^{−i n f(n) γ}`.
    ActionAngle { action: Vec<f64>, angle: Vec<f64> },
}

impl CoherentParameter {
    pub fn plain(z: Complex64) -> Self {
        CoherentParameter::Plain { z: vec![z] }
    }

    pub fn action_angle(action: f64, angle: f64) -> Self {
        CoherentParameter::ActionAngle {
            action: vec![action],
            angle: vec![angle],
        }
    }

    pub fn modes(&self) -> usize {
        match self {
            CoherentParameter::Plain { z } => z.len(),
            CoherentParameter::ActionAngle { action, .. } => action.len(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        let modes = self.modes();
        if modes == 0 {
            return Err(Error::invalid_input("coherent parameter needs at least one mode"));
        }
        if modes > MODES_CAP {
            return Err(Error::CapExceeded {
                what: "bosonic mode count",
                got: modes,
                cap: MODES_CAP,
            });
        }
        match self {
            CoherentParameter::Plain { z } => {
                if z.iter().any(|v| !v.re.is_finite() || !v.im.is_finite()) {
                    return Err(Error::invalid_input("non-finite coherent amplitude"));
                }
            }
            CoherentParameter::ActionAngle { action, angle } => {
                if action.len() != angle.len() {
                    return Err(Error::DimensionMismatch {
                        left: action.len(),
                        right: angle.len(),
                        context: "action vs angle sequences",
                    });
                }
                if action.iter().any(|j| !(*j >= 0.0) || !j.is_finite())
                    || angle.iter().any(|g| !g.is_finite())
                {
                    return Err(Error::invalid_input(
                        "actions must be finite and non-negative, angles finite",
                    ));
                }
            }
        }
        Ok(())
    }

    /// Squared modulus `|z_l|²` (= `J_l`) of one mode's label.
    pub fn modulus_squared(&self, mode: usize) -> f64 {
        match self {
            CoherentParameter::Plain { z } => z[mode].norm_sqr(),
            CoherentParameter::ActionAngle { action, .. } => action[mode],
        }
    }

    /// The n-th power of mode `mode`'s label under the parametrization's own
    /// convention (see module docs). `spec` supplies `f(n)` for the
    /// action-angle phases.
    pub fn power(&self, spec: &DeformationSpec, mode: usize, n: usize, variant: Duality) -> Result<Complex64> {
        match self {
            CoherentParameter::Plain { z } => {
                Ok(z[mode].powu(n as u32))
            }
            CoherentParameter::ActionAngle { action, angle } => {
                if n == 0 {
                    return Ok(Complex64::new(1.0, 0.0));
                }
                let j = action[mode];
                let modulus = j.powf(n as f64 / 2.0);
                let f = spec.f_value(n)?;
                let eps_n = match variant {
                    Duality::Primal => n as f64 * f,
                    Duality::Dual => n as f64 / f,
                };
                Ok(Complex64::from_polar(modulus, -eps_n * angle[mode]))
            }
        }
    }
}

/// A built (normalized, truncated) multimode coherent state.
#[derive(Debug, Clone)]
pub struct CoherentState {
    pub param: CoherentParameter,
    pub variant: Duality,
    pub dim_per_mode: usize,
    mode_amplitudes: Vec<Vec<Complex64>>,
    norm_product: f64,
}

impl CoherentState {
    pub fn modes(&self) -> usize {
        self.mode_amplitudes.len()
    }

    pub fn mode_amplitudes(&self, mode: usize) -> &[Complex64] {
        &self.mode_amplitudes[mode]
    }

    /// Product of the per-mode normalization sums `Π_l 𝒩_l`.
    pub fn normalization_product(&self) -> f64 {
        self.norm_product
    }

    /// Flattened tensor amplitudes, mode 0 slowest (matching the Kronecker
    /// order used for operators).
    pub fn amplitudes(&self) -> Vec<Complex64> {
        let mut flat = vec![Complex64::new(1.0, 0.0)];
        for mode in &self.mode_amplitudes {
            let mut next = Vec::with_capacity(flat.len() * mode.len());
            for &lead in &flat {
                for &c in mode {
                    next.push(lead * c);
                }
            }
            flat = next;
        }
        flat
    }

    /// Total squared norm of the truncated amplitude tensor.
    pub fn norm_sqr(&self) -> f64 {
        self.mode_amplitudes
            .iter()
            .map(|m| m.iter().map(|c| c.norm_sqr()).sum::<f64>())
            .product()
    }
}

/// Normalization-type series `Σ_n wⁿ/{n}!` at a complex argument, with a
/// geometric tail bound enforced at the truncation order.
pub fn normalization_series(spec: &DeformationSpec, w: Complex64, variant: Duality) -> Result<Complex64> {
    let fact = FactorialVariant::from(variant);
    let n_hi = spec.factorial_limit(fact);
    let mut sum = Complex64::new(0.0, 0.0);
    let mut term = Complex64::new(1.0, 0.0);
    let mut prev_mag = 0.0_f64;
    for n in 0..=n_hi {
        if n > 0 {
            // term_n = term_{n−1} · w · {n−1}!/{n}!
            let ratio = spec.deformed_factorial(n - 1, fact)? / spec.deformed_factorial(n, fact)?;
            term *= w * ratio;
        }
        sum += term;
        if n == n_hi {
            prev_mag = term.norm();
        }
    }
    // Geometric tail estimate: bound the remaining terms by the worst
    // term-to-term ratio seen near the truncation (the families here have
    // eventually monotone ratios, so the recent ones dominate the tail).
    let scale = sum.norm().max(1.0);
    if prev_mag > 0.0 {
        let mut r: f64 = 0.0;
        for n in n_hi.saturating_sub(4).max(1)..=n_hi {
            let ratio = spec.deformed_factorial(n - 1, fact)?
                / spec.deformed_factorial(n, fact)?;
            r = r.max(w.norm() * ratio);
        }
        let tail = if r < 0.999 {
            prev_mag * r / (1.0 - r)
        } else {
            f64::INFINITY
        };
        if tail / scale > SERIES_TAIL_TOL {
            return Err(Error::SeriesNotConverged {
                n_max: n_hi,
                tail_bound: tail / scale,
                tolerance: SERIES_TAIL_TOL,
            });
        }
    }
    Ok(sum)
}

fn domain_check(spec: &DeformationSpec, modulus: f64, variant: Duality) -> Result<()> {
    if let Some(Radius::Bounded(l)) = spec.radius(variant) {
        let limit = 0.9 * l;
        if modulus > limit {
            return Err(Error::OutsideDomain { modulus, limit });
        }
    }
    Ok(())
}

fn check_specs(specs: &[&DeformationSpec], param: &CoherentParameter) -> Result<()> {
    param.validate()?;
    if specs.len() != param.modes() {
        return Err(Error::DimensionMismatch {
            left: specs.len(),
            right: param.modes(),
            context: "deformation specs vs coherent-parameter modes",
        });
    }
    Ok(())
}

/// Product normalization `Π_l 𝒩_l(|z_l|²)` with domain and tail checks.
pub fn normalization(specs: &[&DeformationSpec], param: &CoherentParameter, variant: Duality) -> Result<f64> {
    check_specs(specs, param)?;
    let mut product = 1.0;
    for (mode, spec) in specs.iter().enumerate() {
        let w = param.modulus_squared(mode);
        domain_check(spec, w.sqrt(), variant)?;
        let n = normalization_series(spec, Complex64::new(w, 0.0), variant)?;
        product *= n.re;
    }
    Ok(product)
}

/// Build the truncated, normalized coherent state with `dim` levels per mode.
pub fn build_ncs(
    specs: &[&DeformationSpec],
    dim: usize,
    param: &CoherentParameter,
    variant: Duality,
) -> Result<CoherentState> {
    check_specs(specs, param)?;
    if param.modes() > 1 && dim > MULTIMODE_DIM_CAP {
        return Err(Error::CapExceeded {
            what: "per-mode truncation for a multimode state",
            got: dim,
            cap: MULTIMODE_DIM_CAP,
        });
    }
    let fact = FactorialVariant::from(variant);
    let mut mode_amplitudes = Vec::with_capacity(param.modes());
    let mut norm_product = 1.0;
    for (mode, spec) in specs.iter().enumerate() {
        if spec.factorial_limit(fact) + 1 < dim {
            return Err(Error::DimensionMismatch {
                left: spec.factorial_limit(fact) + 1,
                right: dim,
                context: "deformation table vs state dimension",
            });
        }
        let w = param.modulus_squared(mode);
        domain_check(spec, w.sqrt(), variant)?;
        let norm = normalization_series(spec, Complex64::new(w, 0.0), variant)?.re;
        let inv_sqrt_norm = 1.0 / norm.sqrt();
        let mut amps = Vec::with_capacity(dim);
        for n in 0..dim {
            let p = param.power(spec, mode, n, variant)?;
            let c = p / spec.deformed_factorial(n, fact)?.sqrt() * inv_sqrt_norm;
            amps.push(c);
        }
        let kept: f64 = amps.iter().map(|c| c.norm_sqr()).sum();
        let tail = 1.0 - kept;
        if tail > TAIL_MASS_LIMIT {
            return Err(Error::TailTooHeavy {
                tail_mass: tail,
                limit: TAIL_MASS_LIMIT,
                n_max: dim,
            });
        }
        norm_product *= norm;
        mode_amplitudes.push(amps);
    }
    Ok(CoherentState {
        param: param.clone(),
        variant,
        dim_per_mode: dim,
        mode_amplitudes,
        norm_product,
    })
}

/// Overlap kernel `𝒦(a, b) = ⟨η_b|η_a⟩`, factorized over modes:
///
/// ```text
/// 𝒦(a, b) = Π_l  Σ_n a_lⁿ (b̄_l)ⁿ/{n}!  /  √(𝒩(|a_l|²) 𝒩(|b_l|²))
/// ```
///
/// where the "powers" follow each parametrization's convention, so plain and
/// action-angle labels can be mixed freely.
pub fn overlap_kernel(
    specs: &[&DeformationSpec],
    a: &CoherentParameter,
    b: &CoherentParameter,
    variant: Duality,
) -> Result<Complex64> {
    check_specs(specs, a)?;
    check_specs(specs, b)?;
    let fact = FactorialVariant::from(variant);
    let mut kernel = Complex64::new(1.0, 0.0);
    for (mode, spec) in specs.iter().enumerate() {
        domain_check(spec, a.modulus_squared(mode).sqrt(), variant)?;
        domain_check(spec, b.modulus_squared(mode).sqrt(), variant)?;
        let mut s = Complex64::new(0.0, 0.0);
        for n in 0..=spec.factorial_limit(fact) {
            let pa = a.power(spec, mode, n, variant)?;
            let pb = b.power(spec, mode, n, variant)?;
            s += pa * pb.conj() / spec.deformed_factorial(n, fact)?;
        }
        let na = normalization_series(spec, Complex64::new(a.modulus_squared(mode), 0.0), variant)?.re;
        let nb = normalization_series(spec, Complex64::new(b.modulus_squared(mode), 0.0), variant)?.re;
        kernel *= s / (na * nb).sqrt();
    }
    Ok(kernel)
}

/// Probability density `|𝒦(probe, center)|²` of finding `center` at `probe`.
pub fn probability_density(
    specs: &[&DeformationSpec],
    probe: &CoherentParameter,
    center: &CoherentParameter,
    variant: Duality,
) -> Result<f64> {
    Ok(overlap_kernel(specs, probe, center, variant)?.norm_sqr())
}

/// Coefficient-space overlap `⟨a|b⟩` of two built states on equal footing.
pub fn state_overlap(a: &CoherentState, b: &CoherentState) -> Result<Complex64> {
    if a.variant != b.variant {
        return Err(Error::invalid_input(
            "overlap across primal/dual families is not a coefficient dot product",
        ));
    }
    if a.modes() != b.modes() || a.dim_per_mode != b.dim_per_mode {
        return Err(Error::DimensionMismatch {
            left: a.dim_per_mode * a.modes(),
            right: b.dim_per_mode * b.modes(),
            context: "state overlap shapes",
        });
    }
    let mut total = Complex64::new(1.0, 0.0);
    for mode in 0..a.modes() {
        let s: Complex64 = a
            .mode_amplitudes(mode)
            .iter()
            .zip(b.mode_amplitudes(mode))
            .map(|(x, y)| x.conj() * y)
            .sum();
        total *= s;
    }
    Ok(total)
}

/// Spectral evolution: the angle of each mode advances linearly,
/// `γ_l → γ_l + ω_l t`, which multiplies the n-th amplitude by
/// `e^{−i ω_l n f_l(n) t}`. Defined on the action-angle form only.
pub fn evolve(
    specs: &[&DeformationSpec],
    state: &CoherentState,
    omegas: &[f64],
    t: f64,
) -> Result<CoherentState> {
    let (action, angle) = match &state.param {
        CoherentParameter::ActionAngle { action, angle } => (action.clone(), angle),
        CoherentParameter::Plain { .. } => {
            return Err(Error::FormMismatch {
                required: "action-angle",
                context: "spectral evolution",
            })
        }
    };
    if omegas.len() != state.modes() {
        return Err(Error::DimensionMismatch {
            left: omegas.len(),
            right: state.modes(),
            context: "frequencies vs modes",
        });
    }
    let shifted = CoherentParameter::ActionAngle {
        action,
        angle: angle
            .iter()
            .zip(omegas)
            .map(|(g, w)| g + w * t)
            .collect(),
    };
    build_ncs(specs, state.dim_per_mode, &shifted, state.variant)
}

/// Evolved probability density by the closed kernel formula — an evaluation
/// route independent of [`evolve`]'s amplitude re-phasing:
///
/// ```text
/// ϱ(probe; J₀, γ₀; t) = Π_l |Σ_n p̄ⁿ J₀^{n/2} e^{−i n f(n)(γ₀+ω_l t)}/{n}!|²
///                        / (𝒩(|p|²) 𝒩(J₀))
/// ```
pub fn evolved_density(
    specs: &[&DeformationSpec],
    probe: &CoherentParameter,
    center: &CoherentParameter,
    omegas: &[f64],
    t: f64,
    variant: Duality,
) -> Result<f64> {
    let (action, angle) = match center {
        CoherentParameter::ActionAngle { action, angle } => (action, angle),
        CoherentParameter::Plain { .. } => {
            return Err(Error::FormMismatch {
                required: "action-angle",
                context: "evolved density center",
            })
        }
    };
    if omegas.len() != center.modes() {
        return Err(Error::DimensionMismatch {
            left: omegas.len(),
            right: center.modes(),
            context: "frequencies vs modes",
        });
    }
    let moved = CoherentParameter::ActionAngle {
        action: action.clone(),
        angle: angle.iter().zip(omegas).map(|(g, w)| g + w * t).collect(),
    };
    probability_density(specs, probe, &moved, variant)
}
