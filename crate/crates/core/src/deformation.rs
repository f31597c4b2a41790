//! The deformation function `f` and everything derived from it alone.
//!
//! A deformation is specified by the values `f(1), f(2), …, f(n_max)`; all
//! higher-level objects consume the running products `t(n) = f(1)⋯f(n)`
//! (with `t(0) = 1`), the deformed factorials
//!
//! ```text
//! {n}!   = n! · t(n)²        (primal series weights)
//! {n}_d! = n! / t(n)²        (dual series weights)
//! ```
//!
//! and the convergence radii of the associated exponential-type series.
//! `f(0)` is never defined and never evaluated; operator constructions that
//! formally touch index 0 multiply it against a structural zero.

use crate::{Duality, Error, Result};

/// Desk-scale cap on the truncation order. Far above this the f64 factorial
/// table overflows anyway (170! is the hard end of f64).
pub const N_MAX_CAP: usize = 128;

/// Minimum table length for the tail-ratio radius estimator.
pub const RADIUS_MIN_TABLE: usize = 16;

/// Relative-spread gate for the last-quartile ratio estimates.
pub const RADIUS_SPREAD_TOL: f64 = 1e-3;

/// A settled ratio limit below this floor is reported as an unbounded radius.
pub const RADIUS_FLOOR: f64 = 1e-9;

/// Which deformed factorial to evaluate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FactorialVariant {
    /// `{n}! = n!·t(n)²` — weights of the primal coherent series.
    Braced,
    /// `{n}_d! = n!/t(n)²` — weights of the dual coherent series.
    BracedDual,
}

impl From<Duality> for FactorialVariant {
    fn from(d: Duality) -> Self {
        match d {
            Duality::Primal => FactorialVariant::Braced,
            Duality::Dual => FactorialVariant::BracedDual,
        }
    }
}

/// Convergence radius of an exponential-type series: either a finite `L`
/// (the series lives on the disk `|z| < L`) or unbounded (entire).
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Radius {
    Bounded(f64),
    Unbounded,
}

impl Radius {
    /// The largest modulus the domain policy accepts: 90% of a finite radius,
    /// infinity otherwise.
    pub fn policy_limit(&self) -> f64 {
        match self {
            Radius::Bounded(l) => 0.9 * l,
            Radius::Unbounded => f64::INFINITY,
        }
    }

    pub fn is_unbounded(&self) -> bool {
        matches!(self, Radius::Unbounded)
    }
}

/// How the deformation values were produced.
#[derive(Debug, Clone, PartialEq)]
pub enum DeformationKind {
    /// `f ≡ 1`: the ordinary oscillator, every deformed quantity collapses to
    /// its textbook value.
    Identity,
    /// `f(n) = sqrt([n]_q / n)` with `0 < q < 1`; the deformed factorial
    /// becomes the q-factorial `[n]_q!`.
    QDeformed { q: f64 },
    /// Values supplied directly by the caller.
    Tabulated,
}

/// A deformation together with every table derived from it.
///
/// Construction materializes `t(n)`, `n!`, `{n}!` and `{n}_d!` for
/// `n = 0..=n_max` once; all accessors are table lookups.
#[derive(Debug, Clone)]
pub struct DeformationSpec {
    kind: DeformationKind,
    n_max: usize,
    t: Vec<f64>,
    factorial: Vec<f64>,
    braced: Vec<f64>,
    braced_dual: Vec<f64>,
    radius_primal: Option<Radius>,
    radius_dual: Option<Radius>,
}

impl DeformationSpec {
    /// The undeformed oscillator, `f(n) = 1` for every level.
    pub fn identity(n_max: usize) -> Result<Self> {
        Self::from_f_values(DeformationKind::Identity, vec![1.0; n_max])
    }

    /// q-number deformation, `f(n) = sqrt([n]_q/n)` with `[n]_q = (qⁿ−1)/(q−1)`, `q ∈ (0,1)`.
    pub fn q_deformed(q: f64, n_max: usize) -> Result<Self> {
        if !(q > 0.0 && q < 1.0) || !q.is_finite() {
            return Err(Error::InvalidDeformation {
                reason: format!("q = {q} outside the open interval (0,1)"),
            });
        }
        let ctx = QNumberContext::new(q)?;
        let values = (1..=n_max)
            .map(|n| (ctx.value(n) / n as f64).sqrt())
            .collect();
        Self::from_f_values(DeformationKind::QDeformed { q }, values)
    }

    /// A deformation given by its raw values `f(1), …, f(n_max)`.
    pub fn tabulated(values: &[f64]) -> Result<Self> {
        Self::from_f_values(DeformationKind::Tabulated, values.to_vec())
    }

    fn from_f_values(kind: DeformationKind, values: Vec<f64>) -> Result<Self> {
        let n_max = values.len();
        if n_max == 0 {
            return Err(Error::invalid_input("deformation table must not be empty"));
        }
        if n_max > N_MAX_CAP {
            return Err(Error::CapExceeded {
                what: "deformation table length",
                got: n_max,
                cap: N_MAX_CAP,
            });
        }
        for (i, &v) in values.iter().enumerate() {
            if !(v > 0.0) || !v.is_finite() {
                return Err(Error::InvalidDeformation {
                    reason: format!("f({}) = {v} is not a positive finite number", i + 1),
                });
            }
        }

        let mut t = Vec::with_capacity(n_max + 1);
        t.push(1.0);
        for &v in &values {
            let prev = *t.last().expect("t starts with t(0)");
            t.push(prev * v);
        }

        let mut factorial = Vec::with_capacity(n_max + 1);
        factorial.push(1.0);
        for n in 1..=n_max {
            factorial.push(factorial[n - 1] * n as f64);
        }

        let braced: Vec<f64> = (0..=n_max).map(|n| factorial[n] * t[n] * t[n]).collect();
        for (n, &b) in braced.iter().enumerate() {
            if !b.is_finite() {
                return Err(Error::InvalidDeformation {
                    reason: format!("deformed factorial overflows f64 at n = {n}"),
                });
            }
        }
        // The dual product (n!)²/{n}! can overflow f64 long before the
        // primal does (near n ≈ 100 for q-type deformations); keep the
        // finite prefix so deep primal tables stay usable, and let dual
        // accessors report the shorter reach.
        let mut braced_dual: Vec<f64> = (0..=n_max).map(|n| factorial[n] / (t[n] * t[n])).collect();
        if let Some(cut) = braced_dual.iter().position(|b| !b.is_finite()) {
            if cut < 2 {
                return Err(Error::InvalidDeformation {
                    reason: format!("dual deformed factorial overflows f64 already at n = {cut}"),
                });
            }
            braced_dual.truncate(cut);
        }

        let radius_primal = estimate_radius(&t, Duality::Primal).ok();
        let radius_dual = estimate_radius(&t, Duality::Dual).ok();

        Ok(Self {
            kind,
            n_max,
            t,
            factorial,
            braced,
            braced_dual,
            radius_primal,
            radius_dual,
        })
    }

    pub fn kind(&self) -> &DeformationKind {
        &self.kind
    }

    pub fn n_max(&self) -> usize {
        self.n_max
    }

    pub fn is_identity(&self) -> bool {
        matches!(self.kind, DeformationKind::Identity)
    }

    /// `f(n) = t(n)/t(n−1)`, defined for `1 <= n <= n_max`.
    pub fn f_value(&self, n: usize) -> Result<f64> {
        if n == 0 {
            return Err(Error::DeformationAtZero);
        }
        if n > self.n_max {
            return Err(Error::IndexOutOfRange {
                index: n,
                n_max: self.n_max,
            });
        }
        Ok(self.t[n] / self.t[n - 1])
    }

    /// Running product `t(n) = f(1)⋯f(n)`, `t(0) = 1`.
    pub fn t_value(&self, n: usize) -> Result<f64> {
        self.t
            .get(n)
            .copied()
            .ok_or(Error::IndexOutOfRange {
                index: n,
                n_max: self.n_max,
            })
    }

    /// Plain factorial `n!` from the materialized table.
    pub fn factorial(&self, n: usize) -> Result<f64> {
        self.factorial
            .get(n)
            .copied()
            .ok_or(Error::IndexOutOfRange {
                index: n,
                n_max: self.n_max,
            })
    }

    /// `{n}!` or `{n}_d!` depending on the variant.
    pub fn deformed_factorial(&self, n: usize, variant: FactorialVariant) -> Result<f64> {
        let table = match variant {
            FactorialVariant::Braced => &self.braced,
            FactorialVariant::BracedDual => &self.braced_dual,
        };
        table.get(n).copied().ok_or(Error::IndexOutOfRange {
            index: n,
            n_max: self.factorial_limit(variant),
        })
    }

    /// Largest `n` with a finite deformed factorial of the given variant.
    /// Primal always reaches `n_max`; the dual table may stop earlier when
    /// `(n!)²/{n}!` overflows `f64`.
    pub fn factorial_limit(&self, variant: FactorialVariant) -> usize {
        match variant {
            FactorialVariant::Braced => self.n_max,
            FactorialVariant::BracedDual => self.braced_dual.len() - 1,
        }
    }

    /// `n f²(n)` — the eigenvalue of the deformed number-like product A†A —
    /// with the `n = 0` value pinned to 0 so that `f(0)` is never consulted.
    pub fn n_f_squared(&self, n: usize, variant: Duality) -> Result<f64> {
        if n == 0 {
            return Ok(0.0);
        }
        let f = self.f_value(n)?;
        Ok(match variant {
            Duality::Primal => n as f64 * f * f,
            Duality::Dual => n as f64 / (f * f),
        })
    }

    /// Cached radius estimate (None when the table is too short or the tail
    /// never settled). Use [`DeformationSpec::convergence_radius`] for the
    /// full diagnostic path.
    pub fn radius(&self, variant: Duality) -> Option<Radius> {
        match variant {
            Duality::Primal => self.radius_primal,
            Duality::Dual => self.radius_dual,
        }
    }

    /// Estimate the convergence radius of the (primal or dual) coherent
    /// series from the tail of the `t` table.
    ///
    /// The primal estimate targets `ρ = lim (t(n)/t(n+1))²/(n+1)` and returns
    /// `L = 1/√ρ`; the dual inverts the `t` ratio. A last quartile that keeps
    /// decaying without settling is classified as unbounded — see the module
    /// tests for the families that motivate this (the undeformed oscillator
    /// decays like `1/(n+1)`).
    pub fn convergence_radius(&self, variant: Duality) -> Result<Radius> {
        estimate_radius(&self.t, variant)
    }
}

fn estimate_radius(t: &[f64], variant: Duality) -> Result<Radius> {
    let n_max = t.len() - 1;
    if n_max < RADIUS_MIN_TABLE {
        return Err(Error::DimensionTooSmall {
            dim: n_max,
            min: RADIUS_MIN_TABLE,
            context: "series-radius estimation",
        });
    }
    let ratio = |n: usize| -> f64 {
        let r = match variant {
            Duality::Primal => t[n] / t[n + 1],
            Duality::Dual => t[n + 1] / t[n],
        };
        r * r / (n + 1) as f64
    };
    let start = n_max - n_max / 4;
    let estimates: Vec<f64> = (start..n_max).map(ratio).collect();

    let mut sorted = estimates.clone();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("ratio estimates are finite"));
    let median = sorted[sorted.len() / 2];
    if median < RADIUS_FLOOR {
        return Ok(Radius::Unbounded);
    }
    let spread = (sorted[sorted.len() - 1] - sorted[0]) / median;
    if spread <= RADIUS_SPREAD_TOL {
        return Ok(Radius::Bounded(1.0 / median.sqrt()));
    }
    let strictly_decreasing = estimates.windows(2).all(|w| w[1] < w[0]);
    if strictly_decreasing {
        return Ok(Radius::Unbounded);
    }
    Err(Error::NonConvergentTail {
        spread,
        tolerance: RADIUS_SPREAD_TOL,
    })
}

/// Evaluator of q-numbers `[n]_q = (qⁿ − 1)/(q − 1)` for `q ∈ (0, 1]`.
///
/// Values are produced by the forward recurrence `[n+1]_q = 1 + q·[n]_q`,
/// which is exact at `q = 1` (plain integers) and avoids the `qⁿ − 1`
/// cancellation near `q = 1`.
#[derive(Debug, Clone, Copy)]
pub struct QNumberContext {
    q: f64,
}

impl QNumberContext {
    pub fn new(q: f64) -> Result<Self> {
        if !(q > 0.0 && q <= 1.0) || !q.is_finite() {
            return Err(Error::InvalidDeformation {
                reason: format!("q = {q} outside the half-open interval (0,1]"),
            });
        }
        Ok(Self { q })
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    /// `[n]_q` by the stable forward recurrence.
    pub fn value(&self, n: usize) -> f64 {
        let mut x = 0.0;
        for _ in 0..n {
            x = 1.0 + self.q * x;
        }
        x
    }
}
