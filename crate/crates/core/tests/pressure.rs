mod common;

use aniso_lp::pressure::{pressure_estimate_monitor, pressure_solve, pressure_terms, PressureConfig, PressureHistory};
use aniso_lp::semigroup::EpsParams;
use aniso_lp::spectral::ops::{d3, inverse_minus_laplacian_eps, leray_project};
use aniso_lp::spectral::random::{random_field, random_solenoidal};
use aniso_lp::spectral::{Grid, PhysicalField, SpectralField3};
use aniso_lp::Error;

fn params(eps: f64) -> EpsParams {
    EpsParams::new(eps, 0.1, 0.5, 0.02)
}

fn taylor_green(grid: &Grid) -> SpectralField3 {
    PhysicalField::from_fn(grid, 3, |x, c| match c {
        0 => x[0].sin() * x[1].cos(),
        1 => -x[0].cos() * x[1].sin(),
        _ => 0.0,
    })
    .to_spectral()
}

/// Scalar field with `||eps^beta a||_inf` equal to `target`.
fn small_density(grid: &Grid, p: &EpsParams, target: f64, seed: u64) -> SpectralField3 {
    let a = random_field(grid, 1, seed, 0.3, true);
    let m = a.to_physical().max_abs() * p.eps.powf(p.beta);
    a.scaled(target / m)
}

#[test]
fn zero_data_gives_zero_pressure() {
    let g = Grid::cubic(8).unwrap();
    let sol = pressure_solve(
        &SpectralField3::scalar_zeros(&g),
        &SpectralField3::vector_zeros(&g),
        &params(0.1),
        &PressureConfig::default(),
    )
    .unwrap();
    assert_eq!(sol.q.l2_norm(), 0.0);
    assert_eq!(sol.iters, 1);
}

#[test]
fn taylor_green_matches_closed_form_in_one_iteration() {
    let g = Grid::cubic(16).unwrap();
    let p = params(0.1);
    let v = taylor_green(&g);
    let sol = pressure_solve(&SpectralField3::scalar_zeros(&g), &v, &p, &PressureConfig::default()).unwrap();
    assert_eq!(sol.iters, 1);
    // q = eps^{1-alpha} (cos 2x1 + cos 2x2) / 4
    let amp = p.eps.powf(1.0 - p.alpha) / 4.0;
    let exact = common::modes(&g, &[([2, 0, 0], amp), ([0, 2, 0], amp)]);
    let err = (&sol.q - &exact).l2_norm();
    assert!(err < 1e-12 * exact.l2_norm(), "err {err:e}");
}

#[test]
fn small_density_converges_quickly() {
    let g = Grid::cubic(32).unwrap();
    let p = params(0.1);
    let a = small_density(&g, &p, 0.01, 3);
    let v = random_solenoidal(&g, 4, 0.3, true);
    let sol = pressure_solve(&a, &v, &p, &PressureConfig::default()).unwrap();
    assert!(sol.residual < 1e-10, "residual {:e}", sol.residual);
    assert!(sol.iters <= 10, "iters {}", sol.iters);
    assert!(sol.q.coeffs()[0].norm() == 0.0);
}

#[test]
fn iteration_contracts_monotonically() {
    let g = Grid::cubic(16).unwrap();
    let p = params(0.2);
    let a = small_density(&g, &p, 0.05, 5);
    let v = random_solenoidal(&g, 6, 0.3, true);
    let cfg = PressureConfig {
        tol: 1e-13,
        ..PressureConfig::default()
    };
    let sol = pressure_solve(&a, &v, &p, &cfg).unwrap();
    assert!(sol.history.len() >= 3);
    for w in sol.history.windows(2) {
        assert!(w[1] < w[0]);
        // contraction factor of order ||G||_inf ~ 0.05
        assert!(w[1] / w[0] < 0.5, "ratio {}", w[1] / w[0]);
    }
}

#[test]
fn large_density_fails_to_converge() {
    let g = Grid::cubic(16).unwrap();
    let p = params(0.2);
    let a = small_density(&g, &p, 0.9, 5);
    let v = random_solenoidal(&g, 6, 0.3, true);
    let cfg = PressureConfig {
        max_iters: 3,
        ..PressureConfig::default()
    };
    assert!(matches!(pressure_solve(&a, &v, &p, &cfg), Err(Error::PressureNonConvergence { .. })));
}

#[test]
fn rejects_bad_inputs() {
    let g = Grid::cubic(8).unwrap();
    let p = params(0.2);
    let v = random_field(&g, 3, 1, 0.3, true);
    let a = SpectralField3::scalar_zeros(&g);
    assert!(matches!(pressure_solve(&a, &v, &p, &PressureConfig::default()), Err(Error::Precondition(_))));
    let a = small_density(&g, &p, 1.5, 2);
    let v = SpectralField3::vector_zeros(&g);
    assert!(matches!(pressure_solve(&a, &v, &p, &PressureConfig::default()), Err(Error::DensityPositivity(_))));
    let bad = PressureConfig {
        relaxation: 0.0,
        ..PressureConfig::default()
    };
    assert!(pressure_solve(&SpectralField3::scalar_zeros(&g), &v, &p, &bad).is_err());
}

#[test]
fn terms_reconstruct_solution() {
    let g = Grid::cubic(16).unwrap();
    let p = params(0.1);
    let a = small_density(&g, &p, 0.02, 8);
    let v = random_solenoidal(&g, 9, 0.3, true);
    let sol = pressure_solve(&a, &v, &p, &PressureConfig::default()).unwrap();
    let t = pressure_terms(&a, &v, &sol.q, &p).unwrap();
    let err = (&t.sum() - &sol.q).l2_norm() / sol.q.l2_norm();
    assert!(err < 1e-9, "err {err:e}");
    let err5 = (&t.q5_sum() - &t.q5).l2_norm();
    assert!(err5 <= 1e-12 * t.q5.l2_norm().max(1e-300), "q5 split {err5:e}");
}

#[test]
fn zero_density_has_no_coupling_terms() {
    let g = Grid::cubic(16).unwrap();
    let p = params(0.1);
    let a = SpectralField3::scalar_zeros(&g);
    let v = random_solenoidal(&g, 10, 0.3, true);
    let sol = pressure_solve(&a, &v, &p, &PressureConfig::default()).unwrap();
    let t = pressure_terms(&a, &v, &sol.q, &p).unwrap();
    assert_eq!(t.q1.l2_norm(), 0.0);
    assert_eq!(t.q5.l2_norm(), 0.0);
    let mut s = &t.q2 + &t.q3;
    s += &t.q4;
    assert!((&s - &sol.q).l2_norm() < 1e-12 * sol.q.l2_norm());
}

#[test]
fn horizontal_flow_has_no_vertical_terms() {
    let g = Grid::cubic(16).unwrap();
    let p = params(0.1);
    let a = small_density(&g, &p, 0.01, 11);
    // horizontal field depending on x3, still divergence free
    let v = PhysicalField::from_fn(&g, 3, |x, c| match c {
        0 => x[1].sin() * x[2].cos(),
        1 => (2.0 * x[0]).cos() * (x[2] + 1.0).sin(),
        _ => 0.0,
    })
    .to_spectral();
    let t = pressure_terms(&a, &v, &SpectralField3::scalar_zeros(&g), &p).unwrap();
    assert_eq!(t.q3.l2_norm(), 0.0);
    assert_eq!(t.q4.l2_norm(), 0.0);
}

#[test]
fn vertical_contribution_degenerates() {
    let g = Grid::cubic(16).unwrap();
    let v = leray_project(&random_field(&g, 3, 12, 0.3, true)).unwrap();
    let mut last = f64::INFINITY;
    for eps in [0.4, 0.2, 0.1, 0.05] {
        let p = params(eps);
        let a = random_field(&g, 1, 13, 0.3, true).scaled(0.01);
        let q = pressure_solve(&a, &v, &p, &PressureConfig::default()).unwrap().q;
        let vert = d3(&q).scaled(eps * eps).l2_norm();
        assert!(vert < last, "eps {eps}: {vert:e} >= {last:e}");
        last = vert;
    }
}

#[test]
fn constant_coefficient_limit_is_direct_inversion() {
    let g = Grid::cubic(16).unwrap();
    let p = params(0.1);
    let v = random_solenoidal(&g, 14, 0.3, true);
    let a = SpectralField3::scalar_zeros(&g);
    let q = pressure_solve(&a, &v, &p, &PressureConfig::default()).unwrap().q;
    let rhs = aniso_lp::spectral::ops::div(&aniso_lp::spectral::ops::advect(&v, &v).unwrap()).unwrap();
    let direct = inverse_minus_laplacian_eps(&rhs, p.eps).scaled(p.eps.powf(1.0 - p.alpha));
    assert!((&q - &direct).l2_norm() < 1e-12 * direct.l2_norm());
}

#[test]
fn monitor_zero_history_reports_zero() {
    let g = Grid::cubic(8).unwrap();
    let h = PressureHistory::new(&g, 0.02);
    let r = pressure_estimate_monitor(&h, &params(0.1), 0.0, 0.0);
    assert_eq!((r.y_norm, r.z_norm, r.y_ratio, r.z_ratio), (0.0, 0.0, 0.0, 0.0));
}

#[test]
fn monitor_records_finite_ratio() {
    let g = Grid::cubic(16).unwrap();
    let p = params(0.1);
    // Taylor-Green pressure has no x3 dependence and so no Besov content
    let v = random_solenoidal(&g, 15, 0.3, true);
    let q = pressure_solve(&SpectralField3::scalar_zeros(&g), &v, &p, &PressureConfig::default()).unwrap().q;
    let mut h = PressureHistory::new(&g, p.gamma);
    h.record(0.0, 0.1, 0.5, &q, p.eps, 1, 0.0).unwrap();
    h.record(0.1, 0.1, 0.5, &q, p.eps, 1, 0.0).unwrap();
    assert_eq!(h.rows.len(), 2);
    assert!(h.rows[0].y_norm_partial > 0.0);
    assert!((h.rows[1].y_norm_partial - 2.0 * h.rows[0].y_norm_partial).abs() < 1e-12 * h.rows[1].y_norm_partial);
    let r = pressure_estimate_monitor(&h, &p, 0.3, 1.0);
    assert!(r.y_ratio.is_finite() && r.y_ratio > 0.0);
    assert!(r.z_ratio.is_finite() && r.z_ratio > 0.0);
    let mut buf = Vec::new();
    h.write_csv(&mut buf).unwrap();
    let s = String::from_utf8(buf).unwrap();
    assert!(s.starts_with("t,iters,residual,Y_norm_partial,Z_norm_partial\n"));
    assert_eq!(s.lines().count(), 3);
}

proptest::proptest! {
    #![proptest_config(proptest::prelude::ProptestConfig::with_cases(12))]

    #[test]
    fn homogeneous_pressure_is_quadratic_in_velocity(seed in 0u64..1000, c in 0.1f64..3.0, eps in 0.05f64..0.5) {
        let g = Grid::cubic(8).unwrap();
        let p = params(eps);
        let zero = SpectralField3::scalar_zeros(&g);
        let v = random_solenoidal(&g, seed, 0.3, true);
        let q1 = pressure_solve(&zero, &v, &p, &PressureConfig::default()).unwrap().q;
        let q2 = pressure_solve(&zero, &v.scaled(c), &p, &PressureConfig::default()).unwrap().q;
        let err = (&q2 - &q1.scaled(c * c)).l2_norm();
        proptest::prop_assert!(err <= 1e-12 * (c * c * q1.l2_norm()).max(1e-300));
    }

    #[test]
    fn terms_sum_to_solution(seed in 0u64..1000, size in 0.001f64..0.02) {
        let g = Grid::cubic(8).unwrap();
        let p = params(0.1);
        let a = small_density(&g, &p, size, seed);
        let v = random_solenoidal(&g, seed + 1, 0.3, true);
        let cfg = PressureConfig { tol: 1e-13, ..PressureConfig::default() };
        let q = pressure_solve(&a, &v, &p, &cfg).unwrap().q;
        let t = pressure_terms(&a, &v, &q, &p).unwrap();
        proptest::prop_assert!((&t.sum() - &q).l2_norm() <= 1e-10 * q.l2_norm());
    }
}
