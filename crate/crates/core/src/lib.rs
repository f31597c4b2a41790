//! Numerical realization of f-deformed oscillator algebras and their
//! nonlinear coherent states on truncated Fock spaces.
//!
//! The crate is organized bottom-up:
//!
//! * [`deformation`] — the deformation function `f`, its running products
//!   `t(n) = f(n)!`, deformed factorials and series radii;
//! * [`fock_ops`] — finite matrix representations of the deformed ladder
//!   operators, momentum-like combinations, displacement-type exponentials and
//!   the shifted quadratic mode Hamiltonians built from them;
//! * [`measure`] — Gauss quadratures realizing the radial measure that makes
//!   the coherent-state family resolve the identity;
//! * [`states`] — nonlinear coherent states, overlap kernels and their time
//!   evolution;
//! * [`density`] — density matrices, phase-space distributions and the
//!   projector reconstruction from radial derivatives of coherent projectors;
//! * [`quantize`] / [`optics`] — anti-normal symbol quantization maps,
//!   quadrature dispersions and the standard quantum-optics diagnostics
//!   (signal-to-noise ratio, Mandel parameter, two-mode su(1,1) quadratures).

// Tolerance gates are written `!(defect <= tol)` on purpose: a NaN defect
// must fail the gate, which the un-negated `defect > tol` would not do.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// Index loops follow the level-indexed recurrences they implement.
#![allow(clippy::needless_range_loop)]

pub mod deformation;
pub mod density;
pub mod error;
pub mod fock_ops;
pub mod linalg;
pub mod measure;
pub mod optics;
pub mod quantize;
pub mod states;

pub use error::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Selects between the primal operator family (built with `f`) and the dual
/// family (built with `1/f`). Every series, operator and quadrature in the
/// crate exists in both flavours.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Duality {
    Primal,
    Dual,
}

impl Duality {
    /// The flavour obtained by swapping `f ↔ 1/f`.
    pub fn flipped(self) -> Self {
        match self {
            Duality::Primal => Duality::Dual,
            Duality::Dual => Duality::Primal,
        }
    }
}

impl std::fmt::Display for Duality {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Duality::Primal => write!(f, "primal"),
            Duality::Dual => write!(f, "dual"),
        }
    }
}
