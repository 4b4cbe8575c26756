mod common;

use aniso_lp::norms::{AnisoBesovIndex, LpTime};
use aniso_lp::semigroup::{
    damping_bound_check, duhamel, gauss_legendre, heat_apply, smoothing_check_41, smoothing_check_42, EpsParams,
    HeatLine, SmoothingSetup,
};
use aniso_lp::spectral::ops::laplacian_eps;
use aniso_lp::spectral::random::{random_field, random_solenoidal};
use aniso_lp::spectral::{CutoffPair, Grid, SpectralField3};
use common::{modes, rel};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};

#[test]
fn heat_basics() {
    let g = Grid::cubic(16).unwrap();
    let f = random_field(&g, 1, 1, 0.1, false);
    assert_eq!(heat_apply(&f, 0.0, 0.3).unwrap(), f);
    let m = modes(&g, &[([1, 0, 2], 1.0)]);
    let out = heat_apply(&m, 1.0, 0.5).unwrap();
    assert!((&out - &m.scaled((-2.0f64).exp())).l2_norm() < 1e-16);
    let two = heat_apply(&heat_apply(&f, 0.3, 0.2).unwrap(), 0.4, 0.2).unwrap();
    let one = heat_apply(&f, 0.7, 0.2).unwrap();
    assert!((&two - &one).l2_norm() < 1e-12 * one.l2_norm());
    assert!(heat_apply(&f, -1.0, 0.2).is_err());
}

#[test]
fn duhamel_closed_form_and_linearity() {
    let g = Grid::cubic(16).unwrap();
    let z = SpectralField3::scalar_zeros(&g);
    assert_eq!(duhamel(&[(0.0, z.clone())], 1.0, 0.1).unwrap().l2_norm(), 0.0);
    assert!(duhamel(&[], 1.0, 0.1).is_err());

    let m = modes(&g, &[([2, 1, 3], 0.7)]);
    let (t, eps) = (0.8, 0.3);
    let mu = 5.0 + eps * eps * 9.0;
    let series = [(0.0, m.clone()), (0.25, m.clone()), (0.5, m.clone())];
    let e = duhamel(&series, t, eps).unwrap();
    let expect = m.scaled((1.0 - (-t * mu).exp()) / mu);
    assert!((&e - &expect).l2_norm() < 1e-14 * expect.l2_norm());

    let f1 = random_field(&g, 1, 2, 0.2, false);
    let f2 = random_field(&g, 1, 3, 0.2, false);
    let s1 = [(0.0, f1.clone()), (0.3, f2.clone())];
    let s2 = [(0.0, f2.clone()), (0.3, f1.clone())];
    let mixed = [(0.0, &f1.scaled(2.0) + &f2), (0.3, &f2.scaled(2.0) + &f1)];
    let lhs = duhamel(&mixed, 0.7, 0.2).unwrap();
    let rhs = &duhamel(&s1, 0.7, 0.2).unwrap().scaled(2.0) + &duhamel(&s2, 0.7, 0.2).unwrap();
    assert!((&lhs - &rhs).l2_norm() < 1e-13 * rhs.l2_norm());
}

#[test]
fn duhamel_solves_the_forced_heat_equation() {
    // d/dt E f - Delta_eps E f = f for a smooth forcing sampled finely
    let g = Grid::cubic(8).unwrap();
    let (f0, f1) = (random_field(&g, 1, 5, 0.3, false), random_field(&g, 1, 6, 0.3, false));
    let eps = 0.4;
    let forcing = |t: f64| &f0.scaled((2.0 * t).cos()) + &f1.scaled(t.sin());
    let mut errs = Vec::new();
    for steps in [200usize, 400] {
        let dt = 1.0 / steps as f64;
        let series: Vec<_> = (0..steps).map(|i| (i as f64 * dt, forcing(i as f64 * dt))).collect();
        let t = 0.5;
        let h = 1e-3;
        let upto = |end: f64| {
            let kept: Vec<_> = series.iter().filter(|(s, _)| *s <= end).cloned().collect();
            duhamel(&kept, end, eps).unwrap()
        };
        let (up, dn, mid) = (upto(t + h), upto(t - h), upto(t));
        let dudt = (&up - &dn).scaled(0.5 / h);
        let resid = &(&dudt - &laplacian_eps(&mid, eps)) - &forcing(t);
        errs.push(resid.l2_norm() / forcing(t).l2_norm());
    }
    assert!(errs[0] < 0.05, "{errs:?}");
    assert!(errs[1] < errs[0], "{errs:?}");
}

fn setup(eps: f64, sigma: f64, s: f64, beta: f64) -> SmoothingSetup {
    SmoothingSetup { eps, index: AnisoBesovIndex::new(sigma, s), beta, delta: 0.1, t_end: 1.0 }
}

fn mode_velocity(g: &Grid) -> SpectralField3 {
    // divergence free: v = (cos(2 x2 + 3 x3), 0, 0)
    let z = SpectralField3::scalar_zeros(g);
    SpectralField3::stack(&[&modes(g, &[([0, 2, 3], 1.0)]), &z, &z]).unwrap()
}

#[test]
fn free_smoothing_single_mode_closed_forms() {
    let g = Grid::cubic(16).unwrap();
    let v = mode_velocity(&g);
    assert_eq!(smoothing_check_41(&SpectralField3::vector_zeros(&g), &setup(0.1, 1.0, 0.5, 0.0), LpTime::L1, HeatLine::Full).unwrap(), 0.0);
    // at r = infinity the index is not shifted and the maximum sits at t = 0
    let r = smoothing_check_41(&v, &setup(0.1, 1.0, 0.5, 0.0), LpTime::LInf, HeatLine::Full).unwrap();
    assert!((r - 1.0).abs() < 1e-13, "{r}");

    let cut = CutoffPair::standard();
    let (eps, sigma, s): (f64, f64, f64) = (0.2, 0.7, 0.3);
    let mu = 4.0 + eps * eps * 9.0;
    let amp = (0.1 * 13f64.sqrt()).exp() / 2f64.sqrt();
    for (r, beta, time_factor, ir) in [
        (LpTime::L1, 0.0, (1.0 - (-mu).exp()) / mu, 1.0),
        (LpTime::L1, 1.0, (1.0 - (-mu).exp()) / mu, 1.0),
        (LpTime::L2, 0.5, ((1.0 - (-2.0 * mu).exp()) / (2.0 * mu)).sqrt(), 0.5),
    ] {
        let mut lhs = 0.0;
        let mut rhs = 0.0;
        for k in -2..6 {
            for l in -2..6 {
                let w = cut.phi(2.0 / 2f64.powi(k)) * cut.phi(3.0 / 2f64.powi(l));
                lhs += 2f64.powf(k as f64 * sigma + l as f64 * s) * w * amp * time_factor;
                rhs += 2f64.powf(k as f64 * (sigma - (2.0 - beta) * ir) + l as f64 * (s - beta * ir)) * w * amp;
            }
        }
        let expect = eps.powf(beta * ir) * lhs / rhs;
        let got = smoothing_check_41(&v, &setup(eps, sigma, s, beta), r, HeatLine::Full).unwrap();
        assert!(rel(got, expect) < 1e-9, "{r:?} beta {beta}: {got} vs {expect}");
    }
}

#[test]
fn free_smoothing_rejects_bad_input() {
    let g = Grid::cubic(8).unwrap();
    let z = SpectralField3::scalar_zeros(&g);
    let bad = SpectralField3::stack(&[&modes(&g, &[([1, 0, 0], 1.0)]), &z, &z]).unwrap();
    assert!(smoothing_check_41(&bad, &setup(0.1, 1.0, 0.5, 0.0), LpTime::L1, HeatLine::Full).is_err());
    let v = mode_velocity(&g);
    assert!(smoothing_check_41(&v, &setup(0.1, 1.0, 0.5, 2.5), LpTime::L1, HeatLine::Full).is_err());
}

#[test]
fn free_smoothing_ratios_are_stable_and_eps_uniform() {
    let g = Grid::cubic(16).unwrap();
    for line in [HeatLine::Full, HeatLine::Vertical] {
        let mut maxima = Vec::new();
        for eps in [0.1, 0.05] {
            let ratios: Vec<f64> = (0..8)
                .map(|seed| {
                    let v = random_solenoidal(&g, seed, 0.2, true);
                    smoothing_check_41(&v, &setup(eps, 1.0, 0.5, 0.0), LpTime::L1, line).unwrap()
                })
                .collect();
            let mut sorted = ratios.clone();
            sorted.sort_by(f64::total_cmp);
            let (max, med) = (sorted[7], 0.5 * (sorted[3] + sorted[4]));
            assert!(max < 2.0 * med, "{line:?} {eps}: {ratios:?}");
            maxima.push(max);
        }
        assert!(rel(maxima[0], maxima[1]) < 0.25, "{line:?}: {maxima:?}");
    }
}

#[test]
fn forced_smoothing_single_mode_infinity() {
    let g = Grid::cubic(16).unwrap();
    let m = modes(&g, &[([2, 0, 1], 1.0)]);
    let (eps, t) = (0.5, 1.0);
    let mu = 4.0 + 0.25;
    let st = SmoothingSetup { eps, index: AnisoBesovIndex::new(0.0, 0.0), beta: 0.0, delta: 0.0, t_end: t };
    // r1 = inf, r2 = 1: 1/r = 0, so no index shift; forcing constant on [0, 1]
    let got = smoothing_check_42(&[(0.0, m.clone())], &st, LpTime::LInf, LpTime::L1).unwrap();
    let cut = CutoffPair::standard();
    let amp = 1.0 / 2f64.sqrt();
    let (mut lhs, mut rhs) = (0.0, 0.0);
    for k in -2..6 {
        for l in -2..6 {
            let w = cut.phi(2.0 / 2f64.powi(k)) * cut.phi(1.0 / 2f64.powi(l));
            lhs += w * amp * (1.0 - (-t * mu).exp()) / mu;
            rhs += w * amp * t;
        }
    }
    assert!(rel(got, lhs / rhs) < 1e-10, "{got} vs {}", lhs / rhs);
    assert!(smoothing_check_42(&[(0.0, m.clone())], &st, LpTime::L1, LpTime::L2).is_err());
    assert_eq!(smoothing_check_42(&[(0.0, SpectralField3::scalar_zeros(&g))], &st, LpTime::L1, LpTime::L1).unwrap(), 0.0);
}

#[test]
fn forced_smoothing_l1_quadrature_matches_closed_form() {
    // r1 = r2 = 1 on a single mode: int_0^T (1 - e^{-t mu}) / mu dt
    let g = Grid::cubic(16).unwrap();
    let m = modes(&g, &[([5, 0, 1], 1.0)]);
    let mu: f64 = 25.0 + 0.01;
    let st = SmoothingSetup { eps: 0.1, index: AnisoBesovIndex::new(0.0, 0.0), beta: 0.0, delta: 0.0, t_end: 1.0 };
    let got = smoothing_check_42(&[(0.0, m.clone())], &st, LpTime::L1, LpTime::L1).unwrap();
    let cut = CutoffPair::standard();
    let time = (1.0 - (1.0 - (-mu).exp()) / mu) / mu;
    let (mut lhs, mut rhs) = (0.0, 0.0);
    for k in -2..6 {
        for l in -2..6 {
            let w = cut.phi(5.0 / 2f64.powi(k)) * cut.phi(1.0 / 2f64.powi(l));
            lhs += w * time;
            rhs += 2f64.powf(-2.0 * k as f64) * w;
        }
    }
    assert!(rel(got, lhs / rhs) < 1e-10, "{got} vs {}", lhs / rhs);
}

#[test]
fn damping_closed_forms() {
    assert_eq!(damping_bound_check(2.0, 1.0, &[0.5, 0.5], &[0.0, 0.0], 3).unwrap(), 0.0);
    // thetadot = 1 on [0,1], c = 1, lambda 2^l = 10
    let v = damping_bound_check(10.0 / 8.0, 1.0, &[0.25; 4], &[1.0; 4], 3).unwrap();
    assert!((v - (1.0 - (-10.0f64).exp())).abs() < 1e-14);
    assert!(damping_bound_check(1.0, 1.0, &[1.0], &[-0.1], 0).is_err());
}

#[test]
fn damping_matches_telescoped_form_on_random_profiles() {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
    for _ in 0..100 {
        let n = rng.random_range(1..50);
        let dts: Vec<f64> = (0..n).map(|_| rng.random_range(0.001..0.1)).collect();
        let rates: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..5.0)).collect();
        let (lambda, c, l) = (rng.random_range(0.5..20.0), rng.random_range(0.1..2.0), rng.random_range(-2..6));
        let got = damping_bound_check(lambda, c, &dts, &rates, l).unwrap();
        let kappa = c * lambda * 2f64.powi(l);
        let total: f64 = dts.iter().zip(&rates).map(|(d, r)| d * r).sum();
        let closed = lambda * 2f64.powi(l) * (1.0 - (-kappa * total).exp()) / kappa;
        assert!((got - closed).abs() < 1e-12 * closed.max(1e-300));
        assert!(got <= 1.0 / c * (1.0 + 1e-12));
    }
}

#[test]
fn parameter_ranges() {
    let p = EpsParams::new(0.1, 0.1, 0.5, 0.02);
    let r = p.validate(false).unwrap();
    assert!(r.global && r.psi_bound && r.theta_bound);
    assert!((p.gamma0() - 0.06).abs() < 1e-15);
    assert!(EpsParams::new(0.1, 0.1, 0.5, 0.07).validate(false).is_err());
    assert!(EpsParams::new(0.1, 0.1, 0.5, 0.07).validate(true).is_ok());
    assert!(EpsParams::new(1.5, 0.1, 0.5, 0.02).validate(true).is_err());
}

#[test]
fn gauss_legendre_integrates_polynomials() {
    let gl = gauss_legendre(8);
    for p in 0..16 {
        let q: f64 = gl.iter().map(|(x, w)| w * x.powi(p)).sum();
        assert!((q - 1.0 / (p as f64 + 1.0)).abs() < 1e-14, "degree {p}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn heat_contracts_and_commutes(seed in 0u64..500, t in 0.0f64..2.0, eps in 0.01f64..1.0, sigma in -1.0f64..2.0, s in -1.0f64..2.0) {
        let g = Grid::cubic(8).unwrap();
        let f = random_field(&g, 1, seed, 0.1, false);
        let idx = AnisoBesovIndex::new(sigma, s);
        let h = heat_apply(&f, t, eps).unwrap();
        prop_assert!(aniso_lp::norms::besov_norm(&h, idx) <= aniso_lp::norms::besov_norm(&f, idx) * (1.0 + 1e-14));
        let a = aniso_lp::spectral::ops::hv_block(&h, 1, 0);
        let b = heat_apply(&aniso_lp::spectral::ops::hv_block(&f, 1, 0), t, eps).unwrap();
        prop_assert!((&a - &b).l2_norm() <= 1e-14 * a.l2_norm().max(1e-300));
        let c = aniso_lp::norms::apply_phase(&h, 0.1).unwrap();
        let d = heat_apply(&aniso_lp::norms::apply_phase(&f, 0.1).unwrap(), t, eps).unwrap();
        prop_assert!((&c - &d).l2_norm() <= 1e-13 * c.l2_norm().max(1e-300));
    }
}
