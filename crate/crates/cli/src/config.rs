//! Run-configuration schema. One JSON file describes a whole batch run;
//! every key is checked (unknown keys are rejected, not warned about) and
//! the structural invariants are enforced before any task starts.

use serde::{Deserialize, Serialize};

/// Task names accepted in `tasks`. `mandel` is also accepted as an alias
/// that canonicalizes to `optics` (the optics report carries the Mandel
/// sweep table).
pub const SUPPORTED_TASKS: [&str; 10] = [
    "ops",
    "spectrum",
    "kernel",
    "resolve",
    "density",
    "projector",
    "quantize",
    "optics",
    "su11",
    "evolve",
];

/// Largest label-disc fraction a grid may request.
pub const RADIUS_FRACTION_MAX: f64 = 0.95;

/// Smallest truncation the tasks operate on (keeps spectral comparison
/// blocks and two-mode interior blocks non-trivial).
pub const TRUNCATION_MIN: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Task {
    Ops,
    Spectrum,
    Kernel,
    Resolve,
    Density,
    Projector,
    Quantize,
    Optics,
    Su11,
    Evolve,
}

impl Task {
    pub fn parse(name: &str) -> Option<Self> {
        Some(match name {
            "ops" => Task::Ops,
            "spectrum" => Task::Spectrum,
            "kernel" => Task::Kernel,
            "resolve" => Task::Resolve,
            "density" => Task::Density,
            "projector" => Task::Projector,
            "quantize" => Task::Quantize,
            "optics" | "mandel" => Task::Optics,
            "su11" => Task::Su11,
            "evolve" => Task::Evolve,
            _ => return None,
        })
    }

    /// Canonical name; also the report file stem (`<name>.csv`).
    pub fn name(self) -> &'static str {
        match self {
            Task::Ops => "ops",
            Task::Spectrum => "spectrum",
            Task::Kernel => "kernel",
            Task::Resolve => "resolve",
            Task::Density => "density",
            Task::Projector => "projector",
            Task::Quantize => "quantize",
            Task::Optics => "optics",
            Task::Su11 => "su11",
            Task::Evolve => "evolve",
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub deformation: DeformationConfig,
    /// Working number of ladder levels for states and operators.
    pub truncation: usize,
    pub modes: ModesConfig,
    pub z_grid: ZGridConfig,
    /// Order m of the radial Gauss rule used by measure-backed tasks.
    pub quadrature_order: usize,
    pub tolerances: Tolerances,
    pub tasks: Vec<String>,
    pub output: OutputConfig,
}

/// Deformation family. `kind` selects which other keys are meaningful:
/// `identity` and `q` take `n_max` (and `q` takes `q`), `tabulated` takes
/// the raw ladder values `f_values` = f(1), …, f(n_max).
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeformationConfig {
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub q: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_max: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f_values: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModesConfig {
    /// N_B, the number of bosonic modes (each gets its own frequency).
    pub n_bosonic: usize,
    /// Frequencies ω_1..ω_{N_B}.
    pub omega: Vec<f64>,
    /// M, the number of fermionic levels.
    pub m_fermionic: usize,
    /// Level energies ε_1..ε_M.
    pub eps: Vec<f64>,
    /// Coupling strengths g_1..g_M.
    pub g: Vec<f64>,
    /// Either the string "all" (sweep every occupation pattern) or one
    /// explicit pattern as a 0/1 list of length M.
    pub selected: Selected,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Selected {
    All(String),
    Pattern(Vec<u8>),
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ZGridConfig {
    /// Number of radii.
    pub radial: usize,
    /// Number of angles per radius.
    pub angular: usize,
    /// Fraction of the usable label disc the largest radius reaches; the
    /// usable disc is 0.9·L for a bounded family and √truncation/3 for an
    /// unbounded one (the largest label whose truncated state keeps its
    /// tail below the library's mass budget).
    pub radius_fraction: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    /// Requested series-tail accuracy. The engine sums every series to a
    /// fixed relative tail of 1e−10, so this must not be tighter than that.
    pub series_tail: f64,
    /// Budget for every two-route comparison a task performs.
    pub cross_check: f64,
    /// Budget for measure-backed idempotence/reproduction defects.
    pub idempotence: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    /// Report directory (used when neither `--out` nor the environment
    /// variable overrides it).
    pub path: String,
    /// Only "csv" is supported.
    pub format: String,
}

impl RunConfig {
    /// Full structural validation; returns the first violation found.
    pub fn validate(&self) -> Result<(), String> {
        self.deformation.validate()?;
        let table_depth = self.deformation.table_depth();
        if self.truncation < TRUNCATION_MIN {
            return Err(format!(
                "truncation must be at least {TRUNCATION_MIN}, got {}",
                self.truncation
            ));
        }
        if self.truncation > table_depth {
            return Err(format!(
                "truncation {} exceeds the deformation table depth {}",
                self.truncation, table_depth
            ));
        }
        self.modes.validate()?;
        self.z_grid.validate()?;
        if self.quadrature_order == 0 {
            return Err("quadrature_order must be at least 1".into());
        }
        if 2 * self.quadrature_order > table_depth {
            return Err(format!(
                "quadrature_order {} needs a deformation table of depth ≥ {}, got {}",
                self.quadrature_order,
                2 * self.quadrature_order,
                table_depth
            ));
        }
        self.tolerances.validate()?;
        for name in &self.tasks {
            if Task::parse(name).is_none() {
                return Err(format!(
                    "unknown task {name:?}; supported: {} (plus the alias \"mandel\" for \"optics\")",
                    SUPPORTED_TASKS.join(", ")
                ));
            }
        }
        if self.output.format != "csv" {
            return Err(format!(
                "output format {:?} is not supported (only \"csv\")",
                self.output.format
            ));
        }
        if self.output.path.is_empty() {
            return Err("output path must not be empty".into());
        }
        Ok(())
    }

    /// Parsed task list with aliases resolved and duplicates dropped
    /// (first occurrence wins; execution order follows the config).
    pub fn canonical_tasks(&self) -> Vec<Task> {
        let mut seen = Vec::new();
        for name in &self.tasks {
            let task = Task::parse(name).expect("task names validated");
            if !seen.contains(&task) {
                seen.push(task);
            }
        }
        seen
    }
}

impl DeformationConfig {
    fn validate(&self) -> Result<(), String> {
        let forbid = |key: &str, present: bool| {
            if present {
                Err(format!(
                    "deformation kind {:?} does not take the key {key:?}",
                    self.kind
                ))
            } else {
                Ok(())
            }
        };
        match self.kind.as_str() {
            "identity" => {
                forbid("q", self.q.is_some())?;
                forbid("f_values", self.f_values.is_some())?;
                self.require_n_max()?;
            }
            "q" => {
                forbid("f_values", self.f_values.is_some())?;
                self.require_n_max()?;
                let q = self
                    .q
                    .ok_or_else(|| "deformation kind \"q\" requires the key \"q\"".to_string())?;
                if !(q > 0.0 && q < 1.0) || !q.is_finite() {
                    return Err(format!("q must lie in the open interval (0,1), got {q}"));
                }
            }
            "tabulated" => {
                forbid("q", self.q.is_some())?;
                forbid("n_max", self.n_max.is_some())?;
                let values = self
                    .f_values
                    .as_ref()
                    .ok_or_else(|| "deformation kind \"tabulated\" requires \"f_values\"".to_string())?;
                if values.is_empty() {
                    return Err("f_values must not be empty".into());
                }
                for (i, &v) in values.iter().enumerate() {
                    if !(v > 0.0) || !v.is_finite() {
                        return Err(format!(
                            "f_values[{i}] = {v} is not a positive finite number"
                        ));
                    }
                }
            }
            other => {
                return Err(format!(
                    "unknown deformation kind {other:?}; expected \"identity\", \"q\" or \"tabulated\""
                ))
            }
        }
        Ok(())
    }

    fn require_n_max(&self) -> Result<usize, String> {
        match self.n_max {
            Some(n) if n > 0 => Ok(n),
            Some(_) => Err("n_max must be positive".into()),
            None => Err(format!(
                "deformation kind {:?} requires the key \"n_max\"",
                self.kind
            )),
        }
    }

    /// Depth of the ladder table this config describes.
    pub fn table_depth(&self) -> usize {
        self.n_max
            .or_else(|| self.f_values.as_ref().map(Vec::len))
            .unwrap_or(0)
    }
}

impl ModesConfig {
    fn validate(&self) -> Result<(), String> {
        if self.n_bosonic == 0 {
            return Err("n_bosonic must be at least 1".into());
        }
        if self.omega.len() != self.n_bosonic {
            return Err(format!(
                "omega lists {} frequencies for {} bosonic modes",
                self.omega.len(),
                self.n_bosonic
            ));
        }
        for (i, &w) in self.omega.iter().enumerate() {
            if !(w > 0.0) || !w.is_finite() {
                return Err(format!("omega[{i}] = {w} must be positive and finite"));
            }
        }
        if self.m_fermionic == 0 || self.m_fermionic > 4 {
            return Err(format!(
                "m_fermionic must lie in 1..=4, got {}",
                self.m_fermionic
            ));
        }
        if self.eps.len() != self.m_fermionic || self.g.len() != self.m_fermionic {
            return Err(format!(
                "eps ({}) and g ({}) must both list {} fermionic levels",
                self.eps.len(),
                self.g.len(),
                self.m_fermionic
            ));
        }
        match &self.selected {
            Selected::All(word) => {
                if word != "all" {
                    return Err(format!(
                        "selected must be \"all\" or a 0/1 pattern, got {word:?}"
                    ));
                }
            }
            Selected::Pattern(bits) => {
                if bits.len() != self.m_fermionic {
                    return Err(format!(
                        "selected pattern has {} bits for {} fermionic levels",
                        bits.len(),
                        self.m_fermionic
                    ));
                }
                if bits.iter().any(|&b| b > 1) {
                    return Err("selected pattern entries must be 0 or 1".into());
                }
            }
        }
        Ok(())
    }

    /// Occupation patterns to sweep, in ladder order (first level is the
    /// fastest-flipping bit when sweeping "all").
    pub fn patterns(&self) -> Vec<Vec<bool>> {
        match &self.selected {
            Selected::All(_) => (0..(1_usize << self.m_fermionic))
                .map(|k| (0..self.m_fermionic).map(|j| (k >> j) & 1 == 1).collect())
                .collect(),
            Selected::Pattern(bits) => vec![bits.iter().map(|&b| b == 1).collect()],
        }
    }
}

impl ZGridConfig {
    fn validate(&self) -> Result<(), String> {
        if self.radial == 0 || self.angular == 0 {
            return Err("z_grid counts must be at least 1".into());
        }
        if !(self.radius_fraction > 0.0 && self.radius_fraction <= RADIUS_FRACTION_MAX) {
            return Err(format!(
                "radius_fraction must lie in (0, {RADIUS_FRACTION_MAX}], got {}",
                self.radius_fraction
            ));
        }
        Ok(())
    }
}

impl Tolerances {
    fn validate(&self) -> Result<(), String> {
        for (name, value) in [
            ("series_tail", self.series_tail),
            ("cross_check", self.cross_check),
            ("idempotence", self.idempotence),
        ] {
            if !(value > 0.0) || !value.is_finite() {
                return Err(format!("tolerance {name} must be positive, got {value}"));
            }
        }
        if self.series_tail < fockforge_core::states::SERIES_TAIL_TOL {
            return Err(format!(
                "series_tail {} is tighter than the engine's fixed summation policy {}",
                self.series_tail,
                fockforge_core::states::SERIES_TAIL_TOL
            ));
        }
        Ok(())
    }
}
