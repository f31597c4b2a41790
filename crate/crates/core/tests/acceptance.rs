//! End-to-end acceptance gate. Each test is one numbered criterion with its
//! pinned tolerances and a wall-clock budget; the harness line per test is
//! the pass/fail record, and each body prints its worst measured defects
//! (visible with `--nocapture`).

use std::time::{Duration, Instant};

use num_complex::Complex64;

use fockforge_core::deformation::{DeformationSpec, Radius};
use fockforge_core::density::{
    coherent_projector, glauber_sudarshan_rho, projector_reconstruct, rho_kernel_properties,
    DensityMatrix,
};
use fockforge_core::fock_ops::{bk_operator, ladder_matrices, ModeParams};
use fockforge_core::linalg::{self, commutator, eye, max_abs, max_abs_leading, CMat};
use fockforge_core::measure::{
    kernel_idempotence_check, quadrature_from_moments, verify_resolution_identity,
};
use fockforge_core::optics::{mandel, snr, su_f11};
use fockforge_core::quantize::{dispersions, expectation, quantize, Symbol};
use fockforge_core::states::{
    build_ncs, evolve, evolved_density, overlap_kernel, state_overlap, CoherentParameter,
};
use fockforge_core::Duality;

fn budget(clock: Instant, limit: Duration, label: &str) {
    let took = clock.elapsed();
    assert!(
        took < limit,
        "{label}: took {took:.2?}, budget {limit:.2?}"
    );
}

fn family_sweep(n_max: usize) -> Vec<(&'static str, DeformationSpec)> {
    let tabulated: Vec<f64> = (1..=n_max)
        .map(|n| ((n + 1) as f64 / n as f64).sqrt())
        .collect();
    vec![
        ("identity", DeformationSpec::identity(n_max).unwrap()),
        ("q=0.3", DeformationSpec::q_deformed(0.3, n_max).unwrap()),
        ("q=0.5", DeformationSpec::q_deformed(0.5, n_max).unwrap()),
        ("q=0.9", DeformationSpec::q_deformed(0.9, n_max).unwrap()),
        (
            "tabulated",
            DeformationSpec::tabulated(&tabulated).unwrap(),
        ),
    ]
}

#[test]
fn criterion_01_algebra_identities() {
    let clock = Instant::now();
    let n = 32;
    let mut worst_pairing = 0.0_f64;
    let mut worst_diag = 0.0_f64;
    for (label, spec) in family_sweep(n) {
        let ops = ladder_matrices(&spec, n).unwrap();
        let pairing = commutator(&ops.deformed.entries, &ops.dual_dag.entries);
        let defect = max_abs_leading(&(&pairing - eye(n)), 30);
        assert!(defect <= 1e-12, "{label}: pairing defect {defect:.3e}");
        worst_pairing = worst_pairing.max(defect);

        let deformed = commutator(&ops.deformed.entries, &ops.deformed_dag.entries);
        for i in 0..n - 1 {
            let expected = spec.n_f_squared(i + 1, Duality::Primal).unwrap()
                - spec.n_f_squared(i, Duality::Primal).unwrap();
            let d = (deformed[(i, i)] - Complex64::new(expected, 0.0)).norm();
            assert!(d <= 1e-12, "{label}: diagonal defect {d:.3e} at level {i}");
            worst_diag = worst_diag.max(d);
        }
    }
    println!(
        "criterion 01 algebra identities: PASS (pairing {worst_pairing:.2e}, diagonal {worst_diag:.2e})"
    );
    budget(clock, Duration::from_secs(1), "criterion 01");
}

#[test]
fn criterion_02_convergence_radius() {
    let clock = Instant::now();
    let q_spec = DeformationSpec::q_deformed(0.5, 32).unwrap();
    let radius = q_spec.radius(Duality::Primal).expect("estimator ran");
    let l = match radius {
        Radius::Bounded(l) => l,
        Radius::Unbounded => panic!("q = 0.5 must have a bounded label disc"),
    };
    let err = (l - std::f64::consts::SQRT_2).abs();
    assert!(err <= 1e-3, "radius error {err:.3e}");

    let identity = DeformationSpec::identity(32).unwrap();
    let flat = identity.radius(Duality::Primal).expect("estimator ran");
    assert!(flat.is_unbounded(), "identity must be flagged unbounded");
    println!("criterion 02 convergence radius: PASS (|L − √2| = {err:.2e}, identity unbounded)");
    budget(clock, Duration::from_secs(1), "criterion 02");
}

#[test]
fn criterion_03_resolution_of_identity() {
    let clock = Instant::now();
    let identity = DeformationSpec::identity(32).unwrap();
    let quad = quadrature_from_moments(&identity, 16, Duality::Primal).unwrap();
    let report = verify_resolution_identity(&identity, &quad, 32);
    assert_eq!(report.per_level.len(), 32, "levels n ≤ 31 must be covered");
    assert!(
        report.max_defect <= 1e-9,
        "identity defect {:.3e}",
        report.max_defect
    );
    let identity_defect = report.max_defect;

    let q_spec = DeformationSpec::q_deformed(0.5, 32).unwrap();
    let q_quad = quadrature_from_moments(&q_spec, 16, Duality::Primal).unwrap();
    let q_report = verify_resolution_identity(&q_spec, &q_quad, 32);
    assert!(
        q_report.max_defect <= 1e-8,
        "q defect {:.3e}",
        q_report.max_defect
    );
    println!(
        "criterion 03 resolution of identity: PASS (identity {identity_defect:.2e}, q = 0.5 {:.2e})",
        q_report.max_defect
    );
    budget(clock, Duration::from_secs(1), "criterion 03");
}

#[test]
fn criterion_04_kernel_structure() {
    let clock = Instant::now();

    // 9×9 label grids: hermiticity over every pair, unit value on the
    // diagonal. The q-family grid stays inside its 0.9·L policy disc.
    let grid = |half: f64| -> Vec<Complex64> {
        let step = half / 4.0;
        let mut zs = Vec::with_capacity(81);
        for j in -4_i32..=4 {
            for k in -4_i32..=4 {
                zs.push(Complex64::new(j as f64 * step, k as f64 * step));
            }
        }
        zs
    };

    let mut worst_herm = 0.0_f64;
    let mut worst_diag = 0.0_f64;
    let cases = [
        (DeformationSpec::identity(96).unwrap(), 2.0),
        (DeformationSpec::q_deformed(0.5, 120).unwrap(), 0.84),
    ];
    for (spec, half) in &cases {
        let specs = [spec];
        let zs = grid(*half);
        let mut kernel = vec![vec![Complex64::new(0.0, 0.0); zs.len()]; zs.len()];
        for (j, &zj) in zs.iter().enumerate() {
            for (k, &zk) in zs.iter().enumerate() {
                kernel[j][k] = overlap_kernel(
                    &specs,
                    &CoherentParameter::plain(zj),
                    &CoherentParameter::plain(zk),
                    Duality::Primal,
                )
                .unwrap();
            }
        }
        for (j, row) in kernel.iter().enumerate() {
            let diag = (row[j] - Complex64::new(1.0, 0.0)).norm();
            assert!(diag <= 1e-12, "unit diagonal defect {diag:.3e}");
            worst_diag = worst_diag.max(diag);
            for (k, other) in kernel.iter().enumerate() {
                let herm = (row[k] - other[j].conj()).norm();
                assert!(herm <= 1e-12, "hermiticity defect {herm:.3e}");
                worst_herm = worst_herm.max(herm);
            }
        }
    }

    // Idempotence under the coherent measure at order m = 24.
    let identity = &cases[0].0;
    let quad = quadrature_from_moments(identity, 24, Duality::Primal).unwrap();
    let pairs = [
        (Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0)),
        (Complex64::new(2.0, 0.0), Complex64::new(0.0, -2.0)),
        (Complex64::new(1.3, 1.1), Complex64::new(-0.7, 0.9)),
    ];
    let id_defect = kernel_idempotence_check(identity, &quad, &pairs).unwrap();
    assert!(id_defect <= 1e-8, "identity idempotence {id_defect:.3e}");

    let q_spec = &cases[1].0;
    let q_quad = quadrature_from_moments(q_spec, 24, Duality::Primal).unwrap();
    let lim = 0.9 * std::f64::consts::SQRT_2 * 0.999;
    let q_pairs = [
        (Complex64::new(lim, 0.0), Complex64::from_polar(lim, 2.3)),
        (Complex64::new(0.4, 0.3), Complex64::new(-0.2, 0.9)),
    ];
    let q_defect = kernel_idempotence_check(q_spec, &q_quad, &q_pairs).unwrap();
    assert!(q_defect <= 1e-6, "q idempotence {q_defect:.3e}");

    println!(
        "criterion 04 kernel structure: PASS (herm {worst_herm:.2e}, diag {worst_diag:.2e}, idem id {id_defect:.2e} / q {q_defect:.2e})"
    );
    budget(clock, Duration::from_secs(10), "criterion 04");
}

#[test]
fn criterion_05_p_representation_round_trip() {
    let clock = Instant::now();
    let specs = [
        DeformationSpec::identity(32).unwrap(),
        DeformationSpec::q_deformed(0.5, 32).unwrap(),
    ];
    let mut worst_unit = 0.0_f64;
    for spec in &specs {
        for n in 0..=12_usize {
            for m in 0..=12 - n {
                let unit = projector_reconstruct(spec, n, m, Duality::Primal).unwrap();
                let dim = unit.dim();
                let mut expected = CMat::zeros(dim, dim);
                expected[(n, m)] = Complex64::new(1.0, 0.0);
                let defect = max_abs(&(&unit.entries - expected));
                assert!(
                    defect <= 1e-10,
                    "unit ({n},{m}) defect {defect:.3e} for {:?}",
                    spec.kind()
                );
                worst_unit = worst_unit.max(defect);
            }
        }
    }

    // Coefficient-table synthesis: the builder enforces the two-route
    // equality (sum of reconstructed units vs direct assembly) at 1e−9 and
    // fails otherwise, so success here is the round-trip statement.
    let mut table = CMat::zeros(3, 3);
    table[(0, 0)] = Complex64::new(0.5, 0.0);
    table[(1, 1)] = Complex64::new(0.3, 0.0);
    table[(2, 2)] = Complex64::new(0.2, 0.0);
    table[(0, 1)] = Complex64::new(0.1, 0.05);
    table[(1, 0)] = Complex64::new(0.1, -0.05);
    table[(1, 2)] = Complex64::new(-0.04, 0.02);
    table[(2, 1)] = Complex64::new(-0.04, -0.02);
    let mut worst_embed = 0.0_f64;
    for spec in &specs {
        let rho = glauber_sudarshan_rho(spec, &table, Duality::Primal).unwrap();
        for n in 0..3 {
            for m in 0..3 {
                let d = (rho.entries()[(n, m)] - table[(n, m)]).norm();
                worst_embed = worst_embed.max(d);
            }
        }
        assert!(worst_embed <= 1e-12, "embedding defect {worst_embed:.3e}");
    }
    println!(
        "criterion 05 P-representation round trip: PASS (units {worst_unit:.2e}, synthesis gate 1e-9 upheld, embed {worst_embed:.2e})"
    );
    budget(clock, Duration::from_secs(5), "criterion 05");
}

#[test]
fn criterion_06_density_kernel_properties() {
    let clock = Instant::now();
    let dim = 24;
    let mut reports = Vec::new();
    for (spec, probe_scale) in [
        (DeformationSpec::identity(64).unwrap(), 1.0_f64),
        (DeformationSpec::q_deformed(0.5, 64).unwrap(), 0.55),
    ] {
        let quad = quadrature_from_moments(&spec, 16, Duality::Primal).unwrap();
        let pairs = [
            (
                Complex64::new(0.3 * probe_scale, 0.2 * probe_scale),
                Complex64::new(-0.5 * probe_scale, 0.6 * probe_scale),
            ),
            (
                Complex64::new(0.9 * probe_scale, 0.0),
                Complex64::new(0.0, -0.8 * probe_scale),
            ),
            (
                Complex64::new(0.0, 0.0),
                Complex64::new(0.7 * probe_scale, 0.7 * probe_scale),
            ),
        ];

        let pure = coherent_projector(
            &spec,
            Complex64::new(0.6 * probe_scale, 0.25 * probe_scale),
            dim,
        )
        .unwrap();
        let mut populations = vec![0.0; dim];
        populations[0] = 0.55;
        populations[1] = 0.30;
        populations[2] = 0.15;
        let mixture = DensityMatrix::diagonal(&populations, Vec::new()).unwrap();

        for (label, rho) in [("rank-1", &pure), ("mixture", &mixture)] {
            let report = rho_kernel_properties(&spec, &quad, rho, &pairs).unwrap();
            assert!(
                report.herm_defect <= 1e-12,
                "{label}: herm {:.3e}",
                report.herm_defect
            );
            assert!(report.min_diag > 0.0, "{label}: min diag {}", report.min_diag);
            assert!(
                report.idem_defect <= 1e-6,
                "{label}: idem {:.3e}",
                report.idem_defect
            );
            reports.push(report.idem_defect);
        }
    }
    let worst = reports.iter().cloned().fold(0.0_f64, f64::max);
    println!("criterion 06 density kernel properties: PASS (worst idem defect {worst:.2e})");
    budget(clock, Duration::from_secs(10), "criterion 06");
}

#[test]
fn criterion_07_quantization() {
    let clock = Instant::now();
    let grid: Vec<Complex64> = [-0.6, 0.0, 0.6]
        .iter()
        .flat_map(|&re| {
            [-0.45, 0.0, 0.45]
                .iter()
                .map(move |&im| Complex64::new(re, im))
        })
        .collect();

    let sqrt2 = std::f64::consts::SQRT_2;
    let mut worst_label = 0.0_f64;
    let mut worst_intelligent = 0.0_f64;
    let mut worst_half = 0.0_f64;
    for spec in [
        DeformationSpec::identity(64).unwrap(),
        DeformationSpec::q_deformed(0.5, 64).unwrap(),
    ] {
        let dim = 48;
        let z_op = quantize(&spec, dim, Symbol::Z, Duality::Primal).unwrap();
        let zbar_op = quantize(&spec, dim, Symbol::ZBar, Duality::Primal).unwrap();
        let q_op = quantize(&spec, dim, Symbol::Q, Duality::Primal).unwrap();
        for &z in &grid {
            let state = build_ncs(
                &[&spec],
                dim,
                &CoherentParameter::plain(z),
                Duality::Primal,
            )
            .unwrap();
            let mean_z = expectation(&[&z_op], &state).unwrap();
            let mean_ordered = expectation(&[&zbar_op, &z_op], &state).unwrap();
            let mean_q = expectation(&[&q_op], &state).unwrap();
            let d = (mean_z - z)
                .norm()
                .max((mean_ordered - Complex64::new(z.norm_sqr(), 0.0)).norm())
                .max((mean_q - Complex64::new(sqrt2 * z.re, 0.0)).norm());
            assert!(d <= 1e-10, "label recovery defect {d:.3e} at z = {z}");
            worst_label = worst_label.max(d);

            let report = dispersions(&spec, &state).unwrap();
            let saturation =
                (report.dq2 * report.dp2 - 0.25 * report.comm_expect.norm_sqr()).abs();
            assert!(saturation <= 1e-10, "intelligent defect {saturation:.3e}");
            worst_intelligent = worst_intelligent.max(saturation);

            if spec.is_identity() {
                let half = (report.dq2 - 0.5).abs().max((report.dp2 - 0.5).abs());
                assert!(half <= 1e-10, "identity dispersion defect {half:.3e}");
                worst_half = worst_half.max(half);
            }
        }
    }
    println!(
        "criterion 07 quantization: PASS (labels {worst_label:.2e}, intelligent {worst_intelligent:.2e}, identity half {worst_half:.2e})"
    );
    budget(clock, Duration::from_secs(5), "criterion 07");
}

#[test]
fn criterion_08_optics_limits() {
    let clock = Instant::now();
    let identity = DeformationSpec::identity(64).unwrap();
    let mut worst_mandel = 0.0_f64;
    let mut worst_snr = 0.0_f64;
    for z in [
        Complex64::new(0.5, 0.0),
        Complex64::new(0.8, 0.4),
        Complex64::new(-0.9, 0.7),
        Complex64::new(0.0, 1.1),
    ] {
        let state = build_ncs(
            &[&identity],
            64,
            &CoherentParameter::plain(z),
            Duality::Primal,
        )
        .unwrap();
        let report = mandel(&identity, &state).unwrap();
        assert!(
            report.q_mandel.abs() <= 1e-9,
            "identity Mandel {:.3e}",
            report.q_mandel
        );
        worst_mandel = worst_mandel.max(report.q_mandel.abs());
        // 4|z|²cos²φ with φ = arg z is 4(Re z)².
        let ratio = snr(&identity, &state).unwrap();
        let d = (ratio - 4.0 * z.re * z.re).abs();
        assert!(d <= 1e-9, "identity SNR defect {d:.3e}");
        worst_snr = worst_snr.max(d);
    }

    let near_flat = DeformationSpec::q_deformed(1.0 - 1e-4, 64).unwrap();
    let state = build_ncs(
        &[&near_flat],
        64,
        &CoherentParameter::plain(Complex64::new(1.0, 0.0)),
        Duality::Primal,
    )
    .unwrap();
    let report = mandel(&near_flat, &state).unwrap();
    assert!(
        report.q_mandel.abs() <= 1e-3,
        "near-flat Mandel {:.3e}",
        report.q_mandel
    );
    println!(
        "criterion 08 optics limits: PASS (Mandel {worst_mandel:.2e}, SNR {worst_snr:.2e}, near-flat {:.2e})",
        report.q_mandel.abs()
    );
    budget(clock, Duration::from_secs(2), "criterion 08");
}

#[test]
fn criterion_09_two_mode_ladder_algebra() {
    let clock = Instant::now();
    let n_max = 12;
    let cases = [
        (
            DeformationSpec::identity(n_max).unwrap(),
            DeformationSpec::identity(n_max).unwrap(),
        ),
        (
            DeformationSpec::q_deformed(0.5, n_max).unwrap(),
            DeformationSpec::q_deformed(0.5, n_max).unwrap(),
        ),
        (
            DeformationSpec::q_deformed(0.7, n_max).unwrap(),
            DeformationSpec::identity(n_max).unwrap(),
        ),
    ];
    let mut worst = 0.0_f64;
    for (l, k) in &cases {
        let sys = su_f11(l, k, n_max).unwrap();
        assert!(
            sys.ladder_defect <= 1e-12,
            "ladder defect {:.3e}",
            sys.ladder_defect
        );
        assert!(
            sys.raising_defect <= 1e-12,
            "raising defect {:.3e}",
            sys.raising_defect
        );
        worst = worst.max(sys.ladder_defect).max(sys.raising_defect);
    }

    let sys = su_f11(&cases[0].0, &cases[0].1, n_max).unwrap();
    let contraction = max_abs(&(&sys.kplus.entries - sys.kminus.entries.adjoint()));
    assert_eq!(contraction, 0.0, "undeformed contraction must be exact");
    println!(
        "criterion 09 two-mode ladder algebra: PASS (worst interior defect {worst:.2e}, contraction exact)"
    );
    budget(clock, Duration::from_secs(5), "criterion 09");
}

#[test]
fn criterion_10_dynamics() {
    let clock = Instant::now();
    let identity = DeformationSpec::identity(32).unwrap();
    let specs = [&identity];
    let center = CoherentParameter::action_angle(1.2, 0.4);
    let probe = CoherentParameter::plain(Complex64::new(0.5, 0.2));
    let omegas = [1.0];
    let tau = 2.0 * std::f64::consts::PI;

    let state = build_ncs(&specs, 32, &center, Duality::Primal).unwrap();
    let mut worst_period = 0.0_f64;
    let mut worst_norm = 0.0_f64;
    for t in [0.0, 0.3, 1.9] {
        let now = evolved_density(&specs, &probe, &center, &omegas, t, Duality::Primal).unwrap();
        let later =
            evolved_density(&specs, &probe, &center, &omegas, t + tau, Duality::Primal).unwrap();
        let d = (now - later).abs();
        assert!(d <= 1e-10, "period defect {d:.3e} at t = {t}");
        worst_period = worst_period.max(d);

        let evolved = evolve(&specs, &state, &omegas, t).unwrap();
        let n = (evolved.norm_sqr() - state.norm_sqr()).abs();
        assert!(n <= 1e-12, "norm drift {n:.3e} at t = {t}");
        worst_norm = worst_norm.max(n);
    }

    // General deformation: amplitude re-phasing vs the closed kernel route.
    let q_spec = DeformationSpec::q_deformed(0.5, 48).unwrap();
    let q_specs = [&q_spec];
    let q_center = CoherentParameter::action_angle(0.9, 0.2);
    let q_probe = CoherentParameter::plain(Complex64::new(0.5, 0.35));
    let q_omegas = [1.3];
    let mut worst_routes = 0.0_f64;
    for t in [0.4, 0.77, 2.1] {
        let state = build_ncs(&q_specs, 48, &q_center, Duality::Primal).unwrap();
        let evolved = evolve(&q_specs, &state, &q_omegas, t).unwrap();
        let probe_state = build_ncs(&q_specs, 48, &q_probe, Duality::Primal).unwrap();
        let route1 = state_overlap(&probe_state, &evolved).unwrap().norm_sqr();
        let route2 =
            evolved_density(&q_specs, &q_probe, &q_center, &q_omegas, t, Duality::Primal).unwrap();
        let d = (route1 - route2).abs();
        assert!(d <= 1e-10, "route defect {d:.3e} at t = {t}");
        worst_routes = worst_routes.max(d);
    }
    println!(
        "criterion 10 dynamics: PASS (period {worst_period:.2e}, norm {worst_norm:.2e}, routes {worst_routes:.2e})"
    );
    budget(clock, Duration::from_secs(2), "criterion 10");
}

#[test]
fn criterion_11_mode_spectrum() {
    let clock = Instant::now();

    // Undeformed ladder with a genuine coupling: the displaced B has the
    // closed ladder on its leading block.
    let identity = DeformationSpec::identity(32).unwrap();
    let params = ModeParams {
        omega: 1.0,
        n_modes: 1,
        eps: vec![0.5],
        g: vec![0.3],
        k_config: vec![true],
    };
    let bk = bk_operator(&identity, 32, &params, Duality::Primal).unwrap();
    let m = 28;
    let block = bk.matrix.entries.view((0, 0), (m, m)).into_owned();
    let eig = linalg::hermitian_eigenvalues(&block, 1e-8).unwrap();
    let mut worst_coupled = 0.0_f64;
    for (n, &e) in eig.iter().take(m / 2).enumerate() {
        let d = (e - bk.spectrum[n]).abs();
        assert!(d <= 1e-9, "coupled level {n} defect {d:.3e}");
        worst_coupled = worst_coupled.max(d);
    }

    // General deformation, uncoupled: B is already diagonal in the ladder.
    let q_spec = DeformationSpec::q_deformed(0.5, 16).unwrap();
    let free = ModeParams {
        omega: 2.0,
        n_modes: 2,
        eps: vec![0.4, 0.6],
        g: vec![0.0, 0.0],
        k_config: vec![true, false],
    };
    let mut worst_free = 0.0_f64;
    for variant in [Duality::Primal, Duality::Dual] {
        let bk = bk_operator(&q_spec, 16, &free, variant).unwrap();
        let eig = linalg::hermitian_eigenvalues(&bk.matrix.entries, 1e-10).unwrap();
        let mut ladder = bk.spectrum.clone();
        ladder.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for n in 0..16 {
            let d = (eig[n] - ladder[n]).abs();
            assert!(d <= 1e-9, "free level {n} defect {d:.3e}");
            worst_free = worst_free.max(d);
        }
    }
    println!(
        "criterion 11 mode spectrum: PASS (coupled {worst_coupled:.2e}, free {worst_free:.2e})"
    );
    budget(clock, Duration::from_secs(2), "criterion 11");
}
