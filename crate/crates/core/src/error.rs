use thiserror::Error;

/// Everything that can go wrong while building or evaluating the deformed
/// algebra, its states, measures and observables.
///
/// The variants are deliberately specific: callers (in particular the CLI)
/// map them to distinct report lines, and the tests assert on the exact
/// failure mode rather than on a stringly-typed message.
#[derive(Debug, Error)]
pub enum Error {
    /// A level index outside the materialized table `0..=n_max`.
    #[error("level index {index} outside the materialized range 0..={n_max}")]
    IndexOutOfRange { index: usize, n_max: usize },

    /// `f(n)` must be evaluated at `n >= 1`; `f(0)` is never defined.
    #[error("the deformation function is defined for n >= 1 only")]
    DeformationAtZero,

    /// Deformation parameters that violate their stated domain
    /// (non-positive `q`, `q >= 1`, a non-positive tabulated value, ...).
    #[error("invalid deformation parameter: {reason}")]
    InvalidDeformation { reason: String },

    /// Radius estimation saw a tail whose ratio estimates neither settle on a
    /// limit nor decay; no radius can be quoted at this truncation.
    #[error(
        "series-radius estimate did not converge: last-quartile relative spread {spread:.3e} \
         exceeds {tolerance:.3e} without a decaying trend"
    )]
    NonConvergentTail { spread: f64, tolerance: f64 },

    /// Operations that need a minimum truncation size (shift structure,
    /// interior commutator windows, radius estimation, ...).
    #[error("truncation dimension {dim} too small: {context} needs at least {min}")]
    DimensionTooSmall {
        dim: usize,
        min: usize,
        context: &'static str,
    },

    /// A coherent amplitude outside the safe fraction of the convergence disk.
    #[error(
        "coherent amplitude |z| = {modulus:.6} outside the accepted domain |z| <= {limit:.6}"
    )]
    OutsideDomain { modulus: f64, limit: f64 },

    /// A normalization-type series whose tail bound is still above tolerance
    /// at the truncation order.
    #[error(
        "series not converged at n_max = {n_max}: tail bound {tail_bound:.3e} > {tolerance:.3e}"
    )]
    SeriesNotConverged {
        n_max: usize,
        tail_bound: f64,
        tolerance: f64,
    },

    /// The truncated state drops more probability than the build policy allows.
    #[error("truncated tail mass {tail_mass:.3e} exceeds {limit:.3e} at n_max = {n_max}")]
    TailTooHeavy {
        tail_mass: f64,
        limit: f64,
        n_max: usize,
    },

    /// An operation that requires a specific coherent-parameter form
    /// (e.g. evolution is defined on the action-angle form).
    #[error("coherent parameter has the wrong form: {context} requires the {required} form")]
    FormMismatch {
        required: &'static str,
        context: &'static str,
    },

    /// The Hankel form of the moment sequence stopped being positive definite:
    /// no positive measure matches these moments at the requested order.
    #[error(
        "moment matrix not positive definite at order {failed_at}: \
         the sequence is realizable only up to {realizable} quadrature nodes"
    )]
    MomentMatrixNotPositive { failed_at: usize, realizable: usize },

    /// More quadrature nodes requested than the moment table can support.
    #[error("quadrature order {order} too large: {available} moments support at most {max_order} nodes")]
    OrderTooLarge {
        order: usize,
        available: usize,
        max_order: usize,
    },

    /// A constructed quadrature node escaped the support implied by the
    /// series radius; the measure realization is unusable as built.
    #[error("quadrature node r = {node:.6} outside the support radius {limit:.6}")]
    NodeOutsideSupport { node: f64, limit: f64 },

    /// A phase-space quasi-distribution that fails its normalization check.
    #[error("P distribution not normalized: integral = {integral:.12} (tolerance {tolerance:.1e})")]
    UnnormalizedP { integral: f64, tolerance: f64 },

    /// Desk-scale caps (mode counts, per-mode truncations, derivative orders).
    #[error("{what} = {got} exceeds the supported cap {cap}")]
    CapExceeded {
        what: &'static str,
        got: usize,
        cap: usize,
    },

    /// Multimode block bookkeeping got the wrong number of blocks.
    #[error("expected {expected} configuration blocks, got {got}")]
    BlockCountMismatch { expected: usize, got: usize },

    /// Two objects that must share a dimension do not.
    #[error("dimension mismatch: {context} ({left} vs {right})")]
    DimensionMismatch {
        left: usize,
        right: usize,
        context: &'static str,
    },

    /// A denominator (dispersion, normalization, mean) too close to zero for
    /// the quotient to mean anything.
    #[error("degenerate division in {context}: |denominator| = {magnitude:.3e}")]
    DivisionDegenerate {
        context: &'static str,
        magnitude: f64,
    },

    /// Two independent evaluation routes disagreed beyond the contract bound.
    #[error("cross-check failure in {context}: defect {defect:.3e} > {tolerance:.3e}")]
    CrossCheckFailure {
        context: &'static str,
        defect: f64,
        tolerance: f64,
    },

    /// A matrix that was required to be (numerically) invertible is not.
    #[error("matrix inversion failed in {context}")]
    SingularMatrix { context: &'static str },

    /// Catch-all for malformed caller input that has no more specific variant.
    #[error("invalid input: {reason}")]
    InvalidInput { reason: String },
}

impl Error {
    pub(crate) fn invalid_input(reason: impl Into<String>) -> Self {
        Error::InvalidInput {
            reason: reason.into(),
        }
    }
}
