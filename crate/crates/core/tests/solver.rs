mod common;

use aniso_lp::semigroup::{heat_apply, EpsParams};
use aniso_lp::solver::{
    epsilon_zero, make_ill_prepared, run, vector_profile, Physics, Profile, RunConfig, SolverState, StepConfig,
    Verdict, DIAGNOSTICS_HEADER,
};
use aniso_lp::spectral::random::{random_field, random_solenoidal};
use aniso_lp::spectral::{Grid, SpectralField3};
use num_complex::Complex64;

fn step_cfg(p: EpsParams, physics: Physics) -> StepConfig {
    StepConfig {
        params: p,
        physics,
        pressure: Default::default(),
    }
}

fn params() -> EpsParams {
    EpsParams::new(0.1, 0.1, 0.5, 0.02)
}

fn base(grid: usize) -> RunConfig {
    RunConfig {
        grid: [grid; 3],
        ..RunConfig::example()
    }
}

#[test]
fn zero_data_completes_with_zero_quantities() {
    let cfg = RunConfig {
        a0: Profile::Zero,
        v0: Profile::Zero,
        t_end: 0.05,
        ..base(8)
    };
    let out = run(&cfg).unwrap();
    assert_eq!(out.verdict.verdict, Verdict::Completed);
    assert!(out.records.iter().all(|r| r.theta == 0.0 && r.psi == 0.0 && r.psi1 == 0.0));
    assert_eq!(out.records.len(), 6);
    assert!((out.verdict.t_halt - 0.05).abs() < 1e-15);
    assert!(out.verdict.first_bootstrap_violation.is_none());
}

#[test]
fn static_density_without_velocity() {
    let g = Grid::cubic(16).unwrap();
    let p = params();
    let a0 = random_field(&g, 1, 3, 0.4, true);
    let v0 = SpectralField3::vector_zeros(&g);
    let cfg = step_cfg(p, Physics::default());
    let mut s = SolverState::new(a0.clone(), v0, 0.5, 8.0, &cfg).unwrap();
    for _ in 0..3 {
        s.step(0.02, &cfg).unwrap();
    }
    assert_eq!(s.a, a0);
    assert_eq!(s.v.l2_norm(), 0.0);
    assert_eq!(s.theta(), 0.0);
    assert!((s.t - 0.06).abs() < 1e-15);
}

#[test]
fn shear_mode_decays_exactly() {
    // v = (sin x2 cos x3, 0, 0) is an eigenmode with no self-advection
    let g = Grid::cubic(16).unwrap();
    let p = params();
    let v0 = vector_profile(&g, &Profile::Shear { amplitude: 1.0 }, 0).unwrap();
    let cfg = step_cfg(p, Physics::default());
    let mut s = SolverState::new(SpectralField3::scalar_zeros(&g), v0.clone(), 0.5, 8.0, &cfg).unwrap();
    let mut t = 0.0;
    for dt in [0.05, 0.013, 0.1] {
        s.step(dt, &cfg).unwrap();
        t += dt;
    }
    let mu = 1.0 + p.eps * p.eps;
    let expect = v0.scaled((-t * mu).exp());
    assert!((&s.v - &expect).l2_norm() < 1e-12 * expect.l2_norm());
    assert!(s.q.l2_norm() < 1e-14);
}

#[test]
fn stokes_limit_is_heat_flow() {
    let g = Grid::cubic(16).unwrap();
    let p = params();
    let v0 = random_solenoidal(&g, 7, 0.3, true);
    let a0 = random_field(&g, 1, 8, 0.3, true);
    let cfg = step_cfg(p, Physics::stokes());
    let mut s = SolverState::new(a0.clone(), v0.clone(), 0.5, 1e-4, &cfg).unwrap();
    let mut t = 0.0;
    for dt in [0.1, 0.37, 0.02, 1.0] {
        s.step(dt, &cfg).unwrap();
        t += dt;
        let expect = heat_apply(&v0, t, p.eps).unwrap();
        assert!((&s.v - &expect).l2_norm() <= 1e-12 * v0.l2_norm());
    }
    assert_eq!(s.a, a0);
}

#[test]
fn theta_rate_cases() {
    let g = Grid::cubic(16).unwrap();
    let p = params();
    let cfg = step_cfg(p, Physics::default());
    let zero = SolverState::new(
        SpectralField3::scalar_zeros(&g),
        SpectralField3::vector_zeros(&g),
        0.5,
        8.0,
        &cfg,
    )
    .unwrap();
    assert_eq!(aniso_lp::solver::theta_dot(&zero, &p).unwrap(), 0.0);

    // single horizontal-component mode: only the eps^{1-alpha} group
    let v0 = vector_profile(&g, &Profile::Shear { amplitude: 1.0 }, 0).unwrap();
    let band = 0.5;
    let s = SolverState::new(SpectralField3::scalar_zeros(&g), v0, band, 8.0, &cfg).unwrap();
    let got = aniso_lp::solver::theta_dot(&s, &p).unwrap();
    let c = Complex64::new(0.25, 0.0);
    let coeffs: Vec<([i64; 3], Complex64)> =
        [[0, 1, 1], [0, 1, -1], [0, -1, 1], [0, -1, -1]].iter().map(|&m| (m, c)).collect();
    let g_ = p.gamma;
    let b = |sig: f64, s: f64| common::oracle_besov(&coeffs, sig, s, band);
    let expect = p.eps.powf(1.0 - p.alpha)
        * (b(1.0, 0.5) + b(1.0 - g_, 0.5 + g_) + b(1.0 + g_, 0.5 - g_) + p.eps.powf(1.0 + g_) * b(-g_, 1.5 + g_));
    assert!(common::rel(got, expect) < 1e-12, "{got} vs {expect}");

    // vertical component alone: only the eps^gamma group
    let mut v3 = SpectralField3::vector_zeros(&g);
    let cos = common::modes(&g, &[([1, 0, 0], 1.0)]);
    v3.component_mut(2).copy_from_slice(cos.component(0));
    let s = SolverState::new(SpectralField3::scalar_zeros(&g), v3, band, 8.0, &cfg).unwrap();
    // x3-independent: no vertical block content at all
    assert_eq!(aniso_lp::solver::theta_dot(&s, &p).unwrap(), 0.0);
}

#[test]
fn invariants_hold_along_a_run() {
    let cfg = RunConfig {
        a0: Profile::Random {
            amplitude: 0.1,
            envelope: 1.0,
        },
        v0: Profile::Random {
            amplitude: 0.05,
            envelope: 1.0,
        },
        lambda: 1.0,
        t_end: 0.2,
        dt: 0.02,
        ..base(16)
    };
    let out = run(&cfg).unwrap();
    assert_eq!(out.verdict.verdict, Verdict::Completed, "{:?}", out.records.last());
    for w in out.records.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        assert!(b.theta >= a.theta);
        assert!(b.band <= a.band);
        assert!(b.psi3 >= a.psi3 && b.psi4 >= a.psi4 && b.psi1 >= a.psi1 && b.psi2 >= a.psi2);
    }
    for r in &out.records {
        assert!(r.div_residual < 1e-8);
        assert!(r.band >= 0.0);
        assert!(r.pressure_residual <= 1e-10);
        assert!(r.min_density > 0.0);
    }
    assert!(out.records.last().unwrap().theta > 0.0);
    assert!(out.summary.transport.max_implied_c.is_finite());
    assert!(out.summary.pressure_monitor.y_ratio.is_finite());
}

#[test]
fn band_exhaustion_halts_cleanly() {
    let cfg = RunConfig {
        params: EpsParams::new(0.9, 0.1, 0.5, 0.02),
        delta: 0.05,
        lambda: 50.0,
        v0: Profile::Random {
            amplitude: 20.0,
            envelope: 0.1,
        },
        a0: Profile::Zero,
        t_end: 1.0,
        dt: 0.01,
        ..base(16)
    };
    let out = run(&cfg).unwrap();
    assert_eq!(out.verdict.verdict, Verdict::BandExhausted);
    assert!(out.verdict.t_halt < 1.0);
    assert!(out.records.iter().all(|r| r.band >= 0.0));
}

#[test]
fn run_directory_layout() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = RunConfig {
        t_end: 0.03,
        snapshot_every: Some(2),
        output: Some(dir.path().to_path_buf()),
        ..base(8)
    };
    run(&cfg).unwrap();
    let p = dir.path();
    for f in [
        "config.json",
        "diagnostics.csv",
        "verdict.json",
        "summary.json",
        "cl_a.csv",
        "cl_v1.csv",
        "cl_v2.csv",
        "cl_v3.csv",
        "pressure.csv",
        "snapshots/v_000000.bin",
        "snapshots/a_000002.bin",
    ] {
        assert!(p.join(f).exists(), "{f} missing");
    }
    let diag = std::fs::read_to_string(p.join("diagnostics.csv")).unwrap();
    assert_eq!(diag.lines().next().unwrap(), DIAGNOSTICS_HEADER);
    assert_eq!(diag.lines().count(), 5);
    let back: RunConfig = serde_json::from_str(&std::fs::read_to_string(p.join("config.json")).unwrap()).unwrap();
    assert_eq!(back, cfg);
    let verdict: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(p.join("verdict.json")).unwrap()).unwrap();
    assert_eq!(verdict["verdict"], "completed");
    assert!(verdict.get("first_bootstrap_violation").is_some());
}

#[test]
fn runs_are_deterministic() {
    let cfg = RunConfig {
        v0: Profile::Random {
            amplitude: 1.0,
            envelope: 0.3,
        },
        t_end: 0.04,
        ..base(16)
    };
    let a = run(&cfg).unwrap();
    let b = run(&cfg).unwrap();
    assert_eq!(a.records, b.records);
    assert_eq!(a.state.v, b.state.v);
}

#[test]
fn config_overrides_and_validation() {
    let mut cfg = RunConfig::example();
    cfg.set("params.eps=0.05").unwrap();
    cfg.set("dt=0.002").unwrap();
    cfg.set("v0={\"kind\":\"zero\"}").unwrap();
    assert_eq!(cfg.params.eps, 0.05);
    assert_eq!(cfg.dt, 0.002);
    assert_eq!(cfg.v0, Profile::Zero);
    assert!(cfg.set("nope=1").is_err());
    assert!(cfg.set("dt").is_err());
    let mut bad = RunConfig::example();
    bad.params.gamma = 0.5;
    assert!(bad.validate().is_err());
    bad.allow_outside = true;
    assert!(bad.validate().is_ok());
    let text = r#"{"grid":[8,8,8],"params":{"eps":0.1,"alpha":0.1,"beta":0.5,"gamma":0.02},
        "delta":0.5,"lambda":8,"dt":0.01,"t_end":0.1,"a0":{"kind":"zero"},"v0":{"kind":"zero"},"typo":1}"#;
    assert!(serde_json::from_str::<RunConfig>(text).is_err());
    let ok = text.replace(r#","typo":1"#, "");
    let parsed: RunConfig = serde_json::from_str(&ok).unwrap();
    assert_eq!(parsed.bootstrap_c, 1.0);
}

#[test]
fn ill_prepared_scaling() {
    let g = Grid::cubic(16).unwrap();
    let p = EpsParams::new(0.5, 0.1, 1.0, 0.02);
    let d = make_ill_prepared(&g, &Profile::Zero, &Profile::Zero, &p, 1).unwrap();
    assert_eq!(d.u0.max_abs(), 0.0);

    let a0 = Profile::Cosine {
        amplitude: 1.0,
        mode: [1, 0, 1],
    };
    let d = make_ill_prepared(&g, &a0, &Profile::TaylorGreen { amplitude: 1.0 }, &p, 1).unwrap();
    let pg = d.rho0.grid();
    assert!((pg.lengths()[2] - 4.0 * std::f64::consts::PI).abs() < 1e-12);
    let mut err = 0.0f64;
    for i1 in 0..16 {
        for i3 in 0..16 {
            let x1 = pg.coordinate(0, i1);
            let x3 = pg.coordinate(2, i3);
            let expect = 1.0 + 0.5 * (x1 + x3 / 2.0).cos();
            let got = d.rho0.values()[pg.index(i1, 5, i3)];
            err = err.max((got - expect).abs());
        }
    }
    assert!(err < 1e-13, "{err:e}");
    assert!(d.u0.to_spectral().extract(0).l2_norm() > 0.0);

    let v0 = Profile::Random {
        amplitude: 1.0,
        envelope: 0.3,
    };
    let mut last = 0.0;
    for eps in [0.5, 0.25, 0.125] {
        let p = EpsParams::new(eps, 0.1, 1.0, 0.02);
        let d = make_ill_prepared(&g, &Profile::Zero, &v0, &p, 1).unwrap();
        let ratio = d.u0.to_spectral().l2_norm_component(2) / d.v0.l2_norm_component(2);
        assert!(common::rel(ratio, eps.powf(-0.1)) < 1e-12);
        assert!(ratio > last);
        last = ratio;
    }
}

#[test]
fn epsilon_zero_cases() {
    let e = epsilon_zero(1.0, 2.0, 1.0, 1.0, 0.5, 0.02, 0.1).unwrap();
    let terms = [0.05f64.powi(2), 0.25f64.powf(1.0 / 0.48), (1.0f64 / 16.0).powf(50.0)];
    assert!(common::rel(e, terms.iter().cloned().fold(f64::INFINITY, f64::min)) < 1e-12);
    assert!(common::rel(e, (1.0f64 / 16.0).powf(50.0)) < 1e-12);
    let bigger = epsilon_zero(1.0, 2.0, 1.0, 1.0, 0.5, 0.04, 0.1).unwrap();
    assert!(bigger > e);
    let tiny = epsilon_zero(1.0, 1e12, 1.0, 1.0, 0.5, 0.02, 0.1).unwrap();
    assert!(tiny < 1e-20);
    assert!(epsilon_zero(0.0, 2.0, 1.0, 1.0, 0.5, 0.02, 0.1).is_err());
}

#[test]
fn transport_monitor_without_velocity() {
    let cfg = RunConfig {
        v0: Profile::Zero,
        a0: Profile::Random {
            amplitude: 0.2,
            envelope: 1.0,
        },
        t_end: 0.05,
        ..base(16)
    };
    let out = run(&cfg).unwrap();
    for l in &out.summary.transport.lines {
        assert!(common::rel(l.lhs, l.data) < 1e-12, "{l:?}");
        assert_eq!(l.implied_c, 0.0);
    }
}

#[test]
fn transport_constants_bounded_over_lambda() {
    let mut cs = Vec::new();
    for lambda in [4.0, 8.0, 16.0] {
        let cfg = RunConfig {
            lambda,
            a0: Profile::Random {
                amplitude: 0.1,
                envelope: 1.0,
            },
            v0: Profile::Random {
                amplitude: 0.003,
                envelope: 1.0,
            },
            params: EpsParams::new(0.5, 0.1, 0.5, 0.02),
            t_end: 0.2,
            dt: 0.02,
            ..base(16)
        };
        let out = run(&cfg).unwrap();
        assert_eq!(out.verdict.verdict, Verdict::Completed, "{:?}", out.records.last());
        cs.push(out.summary.transport.max_implied_c);
    }
    assert!(cs.iter().all(|c| c.is_finite() && *c >= 0.0), "{cs:?}");
}
