//! Task implementations. Each task consumes the shared run context, emits a
//! CSV table (fixed, documented column set) and a list of named assertions;
//! the driver never interprets rows, only assertions.

use num_complex::Complex64;
use rayon::prelude::*;

use fockforge_core::deformation::{DeformationSpec, FactorialVariant, Radius};
use fockforge_core::density::{coherent_projector, husimi, rho_kernel_properties};
use fockforge_core::fock_ops::{bk_operator, ladder_matrices, ModeParams};
use fockforge_core::linalg::{commutator, eye, hermitian_eigenvalues, max_abs, max_abs_leading};
use fockforge_core::measure::{
    kernel_idempotence_check, quadrature_from_moments, verify_resolution_identity,
};
use fockforge_core::optics::{mandel, snr, su_f11};
use fockforge_core::quantize::{dispersions, expectation, quantize, Symbol};
use fockforge_core::states::{
    build_ncs, evolve, evolved_density, overlap_kernel, state_overlap, CoherentParameter,
};
use fockforge_core::Duality;

use crate::config::{RunConfig, Task};
use crate::report::{Assertion, TaskReport};

/// Everything tasks share: the validated config, the materialized
/// deformation table and the label grid.
pub struct RunContext<'a> {
    pub config: &'a RunConfig,
    pub spec: DeformationSpec,
    /// Radii of the label grid (ascending).
    pub radii: Vec<f64>,
    /// Full grid, radial-major then angular; angle 0 comes first.
    pub grid: Vec<Complex64>,
    /// Largest grid radius = fraction × usable disc.
    pub r_max: f64,
}

impl<'a> RunContext<'a> {
    pub fn new(config: &'a RunConfig) -> Result<Self, String> {
        let d = &config.deformation;
        let spec = match d.kind.as_str() {
            "identity" => DeformationSpec::identity(d.n_max.expect("validated")),
            "q" => DeformationSpec::q_deformed(d.q.expect("validated"), d.n_max.expect("validated")),
            "tabulated" => DeformationSpec::tabulated(d.f_values.as_ref().expect("validated")),
            _ => unreachable!("kinds validated"),
        }
        .map_err(|e| format!("deformation table: {e}"))?;

        let base = match spec.radius(Duality::Primal) {
            Some(Radius::Bounded(l)) => 0.9 * l,
            _ => (config.truncation as f64).sqrt() / 3.0,
        };
        let r_max = config.z_grid.radius_fraction * base;
        let radial = config.z_grid.radial;
        let angular = config.z_grid.angular;
        let mut radii = Vec::with_capacity(radial);
        let mut grid = Vec::with_capacity(radial * angular);
        for i in 1..=radial {
            let r = r_max * i as f64 / radial as f64;
            radii.push(r);
            for j in 0..angular {
                let theta = std::f64::consts::TAU * j as f64 / angular as f64;
                grid.push(Complex64::from_polar(r, theta));
            }
        }
        Ok(RunContext {
            config,
            spec,
            radii,
            grid,
            r_max,
        })
    }

    fn cross_check(&self) -> f64 {
        self.config.tolerances.cross_check
    }

    fn idempotence(&self) -> f64 {
        self.config.tolerances.idempotence
    }

    /// Deterministic probe pairs drawn from the grid (used by the
    /// measure-backed reproduction checks).
    fn probe_pairs(&self) -> Vec<(Complex64, Complex64)> {
        let n = self.grid.len();
        let mut pairs = vec![(self.grid[0], self.grid[n - 1])];
        if n >= 2 {
            pairs.push((self.grid[1], self.grid[n / 2]));
        }
        pairs.push((self.grid[0], self.grid[0]));
        pairs
    }
}

/// Exponential shortest-roundtrip formatting: deterministic and compact.
fn fmt(v: f64) -> String {
    format!("{v:e}")
}

pub fn execute(task: Task, ctx: &RunContext) -> Result<TaskReport, String> {
    match task {
        Task::Ops => ops(ctx),
        Task::Spectrum => spectrum(ctx),
        Task::Kernel => kernel(ctx),
        Task::Resolve => resolve(ctx),
        Task::Density => density(ctx),
        Task::Projector => projector(ctx),
        Task::Quantize => quantize_task(ctx),
        Task::Optics => optics(ctx),
        Task::Su11 => su11(ctx),
        Task::Evolve => evolve_task(ctx),
    }
}

/// Ladder table plus the defining commutation checks at the working
/// truncation.
fn ops(ctx: &RunContext) -> Result<TaskReport, String> {
    let n = ctx.config.truncation;
    let spec = &ctx.spec;
    let ops = ladder_matrices(spec, n).map_err(|e| e.to_string())?;

    let pairing = commutator(&ops.deformed.entries, &ops.dual_dag.entries);
    let pairing_defect = max_abs_leading(&(&pairing - eye(n)), n - 2);

    let deformed = commutator(&ops.deformed.entries, &ops.deformed_dag.entries);
    let mut diagonal_defect = 0.0_f64;
    for i in 0..n - 1 {
        let expected = spec
            .n_f_squared(i + 1, Duality::Primal)
            .and_then(|up| spec.n_f_squared(i, Duality::Primal).map(|lo| up - lo))
            .map_err(|e| e.to_string())?;
        diagonal_defect =
            diagonal_defect.max((deformed[(i, i)] - Complex64::new(expected, 0.0)).norm());
    }

    let q_matrix = quantize(spec, n, Symbol::Q, Duality::Primal).map_err(|e| e.to_string())?;
    let herm = q_matrix.matrix.hermiticity_defect();

    let dual_limit = spec.factorial_limit(FactorialVariant::BracedDual);
    let mut rows = Vec::with_capacity(n);
    for level in 1..=n {
        let f = spec.f_value(level).map_err(|e| e.to_string())?;
        let braced = spec
            .deformed_factorial(level, FactorialVariant::Braced)
            .map_err(|e| e.to_string())?;
        let dual = if level <= dual_limit {
            fmt(spec
                .deformed_factorial(level, FactorialVariant::BracedDual)
                .map_err(|e| e.to_string())?)
        } else {
            String::new()
        };
        rows.push(format!("{level},{},{},{dual}", fmt(f), fmt(braced)));
    }

    Ok(TaskReport {
        columns: "level,f,braced_factorial,braced_dual_factorial",
        rows,
        assertions: vec![
            Assertion::at_most("pairing_identity", pairing_defect, ctx.cross_check()),
            Assertion::at_most("deformed_diagonal", diagonal_defect, ctx.cross_check()),
            Assertion::at_most("quadrature_hermiticity", herm, ctx.cross_check()),
        ],
    })
}

/// Closed-form mode spectra against the numerical eigenvalues of the
/// displaced quadratic form, one sweep per (bosonic mode, occupation
/// pattern).
fn spectrum(ctx: &RunContext) -> Result<TaskReport, String> {
    let n = ctx.config.truncation;
    let block = n - 4;
    let compare = block / 2;
    let modes = &ctx.config.modes;
    let mut rows = Vec::new();
    let mut assertions = Vec::new();
    for (l, &omega) in modes.omega.iter().enumerate() {
        for pattern in modes.patterns() {
            let bits: String = pattern.iter().map(|&b| if b { '1' } else { '0' }).collect();
            let params = ModeParams {
                omega,
                n_modes: modes.n_bosonic,
                eps: modes.eps.clone(),
                g: modes.g.clone(),
                k_config: pattern,
            };
            let bk = bk_operator(&ctx.spec, n, &params, Duality::Primal)
                .map_err(|e| e.to_string())?;
            let leading = bk.matrix.entries.view((0, 0), (block, block)).into_owned();
            let eig =
                hermitian_eigenvalues(&leading, ctx.cross_check()).map_err(|e| e.to_string())?;
            let mut ladder = bk.spectrum.clone();
            ladder.sort_by(|a, b| a.partial_cmp(b).expect("finite energies"));
            let mut worst = 0.0_f64;
            for level in 0..n {
                let defect = if level < compare {
                    let d = (eig[level] - ladder[level]).abs();
                    worst = worst.max(d);
                    fmt(d)
                } else {
                    String::new()
                };
                rows.push(format!(
                    "{l},{bits},{level},{},{defect}",
                    fmt(bk.spectrum[level])
                ));
            }
            assertions.push(Assertion::at_most(
                &format!("eigen_match_mode{l}_config{bits}"),
                worst,
                ctx.cross_check(),
            ));
        }
    }
    Ok(TaskReport {
        columns: "mode,config,level,energy,eigen_defect",
        rows,
        assertions,
    })
}

/// Overlap kernel on every ordered grid pair, with hermiticity, unit
/// diagonal and measure-idempotence checks.
fn kernel(ctx: &RunContext) -> Result<TaskReport, String> {
    let pts = &ctx.grid;
    let count = pts.len();
    let spec = &ctx.spec;
    let pairs: Vec<(usize, usize)> = (0..count)
        .flat_map(|i| (0..count).map(move |j| (i, j)))
        .collect();
    let values: Vec<Complex64> = pairs
        .par_iter()
        .map(|&(i, j)| {
            overlap_kernel(
                &[spec],
                &CoherentParameter::plain(pts[i]),
                &CoherentParameter::plain(pts[j]),
                Duality::Primal,
            )
        })
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;

    let at = |i: usize, j: usize| values[i * count + j];
    let mut herm = 0.0_f64;
    let mut diag = 0.0_f64;
    for i in 0..count {
        diag = diag.max((at(i, i) - Complex64::new(1.0, 0.0)).norm());
        for j in 0..count {
            herm = herm.max((at(i, j) - at(j, i).conj()).norm());
        }
    }

    let quad = quadrature_from_moments(spec, ctx.config.quadrature_order, Duality::Primal)
        .map_err(|e| e.to_string())?;
    let idem = kernel_idempotence_check(spec, &quad, &ctx.probe_pairs())
        .map_err(|e| e.to_string())?;

    let rows = pairs
        .iter()
        .map(|&(i, j)| {
            let k = at(i, j);
            format!(
                "{},{},{},{},{},{}",
                fmt(pts[i].re),
                fmt(pts[i].im),
                fmt(pts[j].re),
                fmt(pts[j].im),
                fmt(k.re),
                fmt(k.im)
            )
        })
        .collect();

    Ok(TaskReport {
        columns: "z1_re,z1_im,z2_re,z2_im,kernel_re,kernel_im",
        rows,
        assertions: vec![
            Assertion::at_most("hermiticity", herm, ctx.cross_check()),
            Assertion::at_most("unit_diagonal", diag, ctx.cross_check()),
            Assertion::at_most("idempotence", idem, ctx.idempotence()),
        ],
    })
}

/// Level-by-level resolution-of-identity defects of the radial rule.
fn resolve(ctx: &RunContext) -> Result<TaskReport, String> {
    let quad = quadrature_from_moments(&ctx.spec, ctx.config.quadrature_order, Duality::Primal)
        .map_err(|e| e.to_string())?;
    let report = verify_resolution_identity(&ctx.spec, &quad, ctx.config.truncation);
    let rows = report
        .per_level
        .iter()
        .enumerate()
        .map(|(level, d)| format!("{level},{}", fmt(d.abs())))
        .collect();
    Ok(TaskReport {
        columns: "level,defect",
        rows,
        assertions: vec![Assertion::at_most(
            "max_level_defect",
            report.max_defect,
            ctx.cross_check(),
        )],
    })
}

/// Husimi table of a coherent projector plus its kernel-reproduction
/// diagnostics.
fn density(ctx: &RunContext) -> Result<TaskReport, String> {
    let spec = &ctx.spec;
    let center = Complex64::new(ctx.r_max, 0.0);
    let rho =
        coherent_projector(spec, center, ctx.config.truncation).map_err(|e| e.to_string())?;
    let values = husimi(spec, &rho, &ctx.grid).map_err(|e| e.to_string())?;
    let rows = ctx
        .grid
        .iter()
        .zip(&values)
        .map(|(z, h)| format!("{},{},{}", fmt(z.re), fmt(z.im), fmt(*h)))
        .collect();

    let quad = quadrature_from_moments(spec, ctx.config.quadrature_order, Duality::Primal)
        .map_err(|e| e.to_string())?;
    let props = rho_kernel_properties(spec, &quad, &rho, &ctx.probe_pairs())
        .map_err(|e| e.to_string())?;
    let trace_defect = (rho.trace() - 1.0).abs();

    Ok(TaskReport {
        columns: "z_re,z_im,husimi",
        rows,
        assertions: vec![
            Assertion::at_most("hermiticity", props.herm_defect, ctx.cross_check()),
            Assertion::at_most("unit_trace", trace_defect, ctx.cross_check()),
            Assertion::above("min_diagonal", props.min_diag, 0.0),
            Assertion::at_most("idempotence", props.idem_defect, ctx.idempotence()),
        ],
    })
}

/// Matrix-unit reconstruction from radial derivatives of the projector
/// family, for every order n + m the derivative cap admits.
fn projector(ctx: &RunContext) -> Result<TaskReport, String> {
    let spec = &ctx.spec;
    let dim = spec
        .n_max()
        .min(spec.factorial_limit(FactorialVariant::Braced) + 1);
    let cap = fockforge_core::density::DERIVATIVE_CAP.min(dim - 1);
    let mut rows = Vec::new();
    let mut worst = 0.0_f64;
    for n in 0..=cap {
        for m in 0..=cap - n {
            let unit = fockforge_core::density::projector_reconstruct(spec, n, m, Duality::Primal)
                .map_err(|e| e.to_string())?;
            let mut defect = 0.0_f64;
            for r in 0..unit.dim() {
                for c in 0..unit.dim() {
                    let expected = if (r, c) == (n, m) { 1.0 } else { 0.0 };
                    defect =
                        defect.max((unit.entries[(r, c)] - Complex64::new(expected, 0.0)).norm());
                }
            }
            worst = worst.max(defect);
            rows.push(format!("{n},{m},{}", fmt(defect)));
        }
    }
    Ok(TaskReport {
        columns: "n,m,defect",
        rows,
        assertions: vec![Assertion::at_most(
            "unit_reconstruction",
            worst,
            ctx.cross_check(),
        )],
    })
}

/// Quadrature dispersions and label-recovery defects across the grid.
fn quantize_task(ctx: &RunContext) -> Result<TaskReport, String> {
    let spec = &ctx.spec;
    let dim = ctx.config.truncation;
    let z_op = quantize(spec, dim, Symbol::Z, Duality::Primal).map_err(|e| e.to_string())?;
    let zbar_op = quantize(spec, dim, Symbol::ZBar, Duality::Primal).map_err(|e| e.to_string())?;
    let q_op = quantize(spec, dim, Symbol::Q, Duality::Primal).map_err(|e| e.to_string())?;

    struct Point {
        row: String,
        label: f64,
        saturation: f64,
        equality: f64,
    }

    let points: Vec<Point> = ctx
        .grid
        .par_iter()
        .map(|&z| -> Result<Point, fockforge_core::Error> {
            let state = build_ncs(
                &[spec],
                dim,
                &CoherentParameter::plain(z),
                Duality::Primal,
            )?;
            let mean_z = expectation(&[&z_op], &state)?;
            let ordered = expectation(&[&zbar_op, &z_op], &state)?;
            let mean_q = expectation(&[&q_op], &state)?;
            let label = (mean_z - z)
                .norm()
                .max((ordered - Complex64::new(z.norm_sqr(), 0.0)).norm())
                .max((mean_q - Complex64::new(std::f64::consts::SQRT_2 * z.re, 0.0)).norm());
            let disp = dispersions(spec, &state)?;
            let saturation =
                (disp.dq2 * disp.dp2 - 0.25 * disp.comm_expect.norm_sqr()).abs();
            let equality = (disp.dq2 - disp.dp2).abs();
            let row = format!(
                "{},{},{},{},{},{},{}",
                fmt(z.re),
                fmt(z.im),
                fmt(disp.dq2),
                fmt(disp.dp2),
                fmt(disp.comm_expect.im),
                fmt(label),
                fmt(saturation)
            );
            Ok(Point {
                row,
                label,
                saturation,
                equality,
            })
        })
        .collect::<Result<_, _>>()
        .map_err(|e| e.to_string())?;

    let worst = |f: fn(&Point) -> f64| points.iter().map(f).fold(0.0_f64, f64::max);
    Ok(TaskReport {
        columns: "z_re,z_im,dq2,dp2,comm_im,label_defect,saturation_defect",
        rows: points.iter().map(|p| p.row.clone()).collect(),
        assertions: vec![
            Assertion::at_most("label_recovery", worst(|p| p.label), ctx.cross_check()),
            Assertion::at_most(
                "dispersion_equality",
                worst(|p| p.equality),
                ctx.cross_check(),
            ),
            Assertion::at_most(
                "intelligent_saturation",
                worst(|p| p.saturation),
                ctx.cross_check(),
            ),
        ],
    })
}

/// Mandel/Fano/SNR sweep over a doubling ladder of |z|² ending at the
/// grid's largest modulus squared.
fn optics(ctx: &RunContext) -> Result<TaskReport, String> {
    let spec = &ctx.spec;
    let dim = ctx.config.truncation;
    let u_max = ctx.r_max * ctx.r_max;
    let count = ctx.config.z_grid.radial;
    let z_op = quantize(spec, dim, Symbol::Z, Duality::Primal).map_err(|e| e.to_string())?;
    let zbar_op = quantize(spec, dim, Symbol::ZBar, Duality::Primal).map_err(|e| e.to_string())?;

    let mut rows = Vec::with_capacity(count);
    let mut routes = 0.0_f64;
    let mut min_fano = f64::INFINITY;
    for k in 0..count {
        let u = u_max * 2.0_f64.powi(-((count - 1 - k) as i32));
        let z = Complex64::new(u.sqrt(), 0.0);
        let state = build_ncs(&[spec], dim, &CoherentParameter::plain(z), Duality::Primal)
            .map_err(|e| e.to_string())?;
        let report = mandel(spec, &state).map_err(|e| e.to_string())?;
        let ratio = snr(spec, &state).map_err(|e| e.to_string())?;

        // Independent matrix sandwich of the level operator and its square.
        let n1 = expectation(&[&zbar_op, &z_op], &state)
            .map_err(|e| e.to_string())?
            .re;
        let n2 = expectation(&[&zbar_op, &z_op, &zbar_op, &z_op], &state)
            .map_err(|e| e.to_string())?
            .re;
        let matrix_q = (n2 - n1 * n1) / n1 - 1.0;
        routes = routes.max((report.q_mandel - matrix_q).abs());
        min_fano = min_fano.min(report.fano);

        rows.push(format!(
            "{},{},{},{}",
            fmt(u),
            fmt(report.q_mandel),
            fmt(report.fano),
            fmt(ratio)
        ));
    }

    Ok(TaskReport {
        columns: "modulus_squared,q_mandel,fano,snr",
        rows,
        assertions: vec![
            Assertion::at_most("mandel_two_routes", routes, ctx.cross_check()),
            Assertion::at_least("fano_nonnegative", min_fano, 0.0),
        ],
    })
}

/// Two-mode ladder triple: interior commutation defects and the exact
/// commutator diagonal.
fn su11(ctx: &RunContext) -> Result<TaskReport, String> {
    let spec = &ctx.spec;
    // Kronecker products square the dimension; 12 levels per mode keeps the
    // verification block meaningful at interactive cost.
    let d = ctx.config.truncation.min(12);
    let sys = su_f11(spec, spec, d).map_err(|e| e.to_string())?;
    let hi = d - 3;
    let mut rows = Vec::new();
    for nl in 0..=hi {
        for nk in 0..=hi {
            let value = sys.commutator_diag()[nl * d + nk];
            rows.push(format!("{nl},{nk},{}", fmt(value)));
        }
    }
    let mut assertions = vec![
        Assertion::at_most("ladder_closure", sys.ladder_defect, ctx.cross_check()),
        Assertion::at_most("raising_action", sys.raising_defect, ctx.cross_check()),
    ];
    if spec.is_identity() {
        let contraction = max_abs(&(&sys.kplus.entries - sys.kminus.entries.adjoint()));
        assertions.push(Assertion::at_most(
            "contraction_adjoint",
            contraction,
            ctx.cross_check(),
        ));
    }
    Ok(TaskReport {
        columns: "n_l,n_k,comm_diag",
        rows,
        assertions,
    })
}

/// One period of spectral evolution, evaluated by amplitude re-phasing and
/// by the closed kernel route.
fn evolve_task(ctx: &RunContext) -> Result<TaskReport, String> {
    let spec = &ctx.spec;
    let specs = [spec];
    let dim = ctx.config.truncation;
    let omega = ctx.config.modes.omega[0];
    let period = std::f64::consts::TAU / omega;
    let steps = ctx.config.z_grid.angular;

    let action = (0.6 * ctx.r_max) * (0.6 * ctx.r_max);
    let center = CoherentParameter::action_angle(action, 0.0);
    let probe_label = Complex64::from_polar(0.5 * ctx.r_max, std::f64::consts::FRAC_PI_4);
    let probe = CoherentParameter::plain(probe_label);

    let state = build_ncs(&specs, dim, &center, Duality::Primal).map_err(|e| e.to_string())?;
    let probe_state = build_ncs(&specs, dim, &probe, Duality::Primal).map_err(|e| e.to_string())?;

    let mut rows = Vec::with_capacity(steps);
    let mut route_defect = 0.0_f64;
    let mut norm_defect = 0.0_f64;
    for j in 0..steps {
        let t = period * j as f64 / steps as f64;
        let evolved = evolve(&specs, &state, &[omega], t).map_err(|e| e.to_string())?;
        let rephased = state_overlap(&probe_state, &evolved)
            .map_err(|e| e.to_string())?
            .norm_sqr();
        let kernel_route = evolved_density(&specs, &probe, &center, &[omega], t, Duality::Primal)
            .map_err(|e| e.to_string())?;
        let defect = (rephased - kernel_route).abs();
        route_defect = route_defect.max(defect);
        norm_defect = norm_defect.max((evolved.norm_sqr() - state.norm_sqr()).abs());
        rows.push(format!(
            "{},{},{},{}",
            fmt(t),
            fmt(rephased),
            fmt(kernel_route),
            fmt(defect)
        ));
    }

    Ok(TaskReport {
        columns: "t,density_rephased,density_kernel,defect",
        rows,
        assertions: vec![
            Assertion::at_most("route_agreement", route_defect, ctx.cross_check()),
            Assertion::at_most("norm_preservation", norm_defect, ctx.cross_check()),
        ],
    })
}
