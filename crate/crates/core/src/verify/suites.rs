use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::norms::{interpolation_check, AnisoBesovIndex, LpTime};
use crate::par;
use crate::paraproduct::{bony, double_bony, g_smallness_check, product_law_fit, FitOptions, ProductLaw};
use crate::pressure::{pressure_solve, PressureConfig};
use crate::semigroup::{damping_bound_check, smoothing_check_41, smoothing_check_42, EpsParams, HeatLine, SmoothingSetup};
use crate::spectral::ops::{advect, d3, div, h_block, inverse_minus_laplacian_eps, partial, product, v_block};
use crate::spectral::random::{random_field, random_masked, random_solenoidal, rng, trial_seed};
use crate::spectral::{Direction, Grid, SpectralField3};

use super::report::{CaseReport, SuiteReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Bernstein,
    ProductLaws,
    Interpolation,
    Composition,
    HeatSmoothing,
    Damping,
    BonyReconstruction,
    PressureResidual,
}

impl Suite {
    pub const ALL: [Suite; 8] = [
        Suite::Bernstein,
        Suite::ProductLaws,
        Suite::Interpolation,
        Suite::Composition,
        Suite::HeatSmoothing,
        Suite::Damping,
        Suite::BonyReconstruction,
        Suite::PressureResidual,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Bernstein => "bernstein",
            Suite::ProductLaws => "product_laws",
            Suite::Interpolation => "interpolation",
            Suite::Composition => "composition",
            Suite::HeatSmoothing => "heat_smoothing",
            Suite::Damping => "damping",
            Suite::BonyReconstruction => "bony_reconstruction",
            Suite::PressureResidual => "pressure_residual",
        }
    }

    fn default_trials(self) -> usize {
        match self {
            Suite::Bernstein | Suite::ProductLaws | Suite::Interpolation | Suite::Damping => 100,
            Suite::Composition => 50,
            Suite::BonyReconstruction => 20,
            Suite::HeatSmoothing => 4,
            Suite::PressureResidual => 1,
        }
    }

    fn default_grid(self) -> usize {
        match self {
            Suite::Bernstein | Suite::HeatSmoothing | Suite::Damping => 16,
            _ => 32,
        }
    }
}

impl std::str::FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|x| x.name() == s)
            .ok_or_else(|| Error::InvalidParameter(format!("unknown suite `{s}`")))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteOptions {
    /// Grid size; suites comparing grids use this and its double.
    pub grid: Option<usize>,
    pub trials: Option<usize>,
    pub seed: u64,
    pub stability_factor: f64,
    /// Spread allowed by the cross-band, cross-grid and cross-eps checks.
    pub spread: f64,
    /// Product-law index tuples; `None` uses the built-in admissible set.
    pub laws: Option<Vec<ProductLaw>>,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions {
            grid: None,
            trials: None,
            seed: 1,
            stability_factor: 2.0,
            spread: 0.25,
            laws: None,
        }
    }
}

/// The admissible tuples exercised by default: one four-term law, two
/// two-term and two one-term Chemin-Lerner laws.
pub fn default_laws() -> Vec<ProductLaw> {
    use LpTime::*;
    vec![
        ProductLaw::Full {
            sigma: [1.0, 0.2, 0.2, 1.0, 1.0, 0.2, 0.2, 1.0],
            s: [0.5, 0.1, 0.1, 0.5, 0.1, 0.5, 0.5, 0.1],
        },
        ProductLaw::TwoTerm {
            sigma: [1.0, 0.5, 0.5, 1.0],
            s: [0.5, 0.25, 0.25, 0.5],
            p: [L1, L2, L2, LInf, L1],
        },
        ProductLaw::TwoTerm {
            sigma: [0.8, 0.7, 0.7, 0.8],
            s: [0.5, 0.3, 0.3, 0.5],
            p: [L1, L1, LInf, LInf, L1],
        },
        ProductLaw::Single {
            sigma: [0.5, 0.5],
            s: [0.25, 0.25],
            p: [L1, L2, L2],
        },
        ProductLaw::Single {
            sigma: [1.0, 0.5],
            s: [0.5, 0.2],
            p: [L1, LInf, L1],
        },
    ]
}

fn collect<T>(items: Vec<Result<T>>) -> Result<Vec<T>> {
    items.into_iter().collect()
}

pub fn run_suite(suite: Suite, opts: &SuiteOptions) -> Result<SuiteReport> {
    if !(opts.stability_factor > 1.0) || !(opts.spread >= 0.0) {
        return Err(Error::InvalidParameter("stability factor must exceed 1 and spread be nonnegative".into()));
    }
    let start = Instant::now();
    let trials = opts.trials.unwrap_or(suite.default_trials());
    if trials == 0 {
        return Err(Error::InvalidParameter("trials must be positive".into()));
    }
    let grid = opts.grid.unwrap_or(suite.default_grid());
    let (grids, cases) = match suite {
        Suite::Bernstein => (vec![grid, 2 * grid], bernstein(grid, trials, opts)?),
        Suite::ProductLaws => (vec![grid], product_laws(grid, trials, opts)?),
        Suite::Interpolation => (vec![grid], interpolation(grid, trials, opts)?),
        Suite::Composition => (vec![grid], composition(grid, trials, opts)?),
        Suite::HeatSmoothing => (vec![grid], heat_smoothing(grid, trials, opts)?),
        Suite::Damping => (vec![], damping(trials, opts)?),
        Suite::BonyReconstruction => (vec![grid], bony_reconstruction(grid, trials, opts)?),
        Suite::PressureResidual => (vec![grid], pressure_residual(grid, opts)?),
    };
    let report = SuiteReport::assemble(suite.name(), trials, grids, opts.seed, cases, start.elapsed().as_secs_f64());
    log::info!("suite {}: pass = {}", report.suite, report.pass);
    Ok(report)
}

fn l2_ratio(num: &SpectralField3, den: &SpectralField3, scale: f64) -> f64 {
    num.l2_norm() / (scale * den.l2_norm())
}

/// Fitted constants of the four single-band derivative bounds at band `j`:
/// `[h_upper, h_lower, v_upper, v_lower]`, or `None` for an empty band.
fn bernstein_band(grid: &Grid, j: i32, trials: usize, seed: u64) -> Result<[Option<f64>; 4]> {
    let noise = |t: usize, which: u64| random_masked(grid, trial_seed(trial_seed(seed, which), t as u64), |_| 1.0);
    let per_trial = par::map_range(trials, |t| {
        let fh = h_block(&noise(t, j as u64 * 2), j);
        let fv = v_block(&noise(t, j as u64 * 2 + 1), j);
        let scale = (j as f64).exp2();
        let mut out = [None; 4];
        if fh.l2_norm() > 0.0 {
            let d = partial(&fh, 0).l2_norm().max(partial(&fh, 1).l2_norm());
            out[0] = Some(d / (scale * fh.l2_norm()));
            out[1] = Some(scale * fh.l2_norm() / d);
        }
        if fv.l2_norm() > 0.0 {
            out[2] = Some(l2_ratio(&d3(&fv), &fv, scale));
            out[3] = Some(scale * fv.l2_norm() / d3(&fv).l2_norm());
        }
        out
    });
    let mut fitted = [None; 4];
    for (i, f) in fitted.iter_mut().enumerate() {
        let vals: Option<Vec<f64>> = per_trial.iter().map(|t| t[i]).collect();
        *f = vals.map(|v| v.into_iter().fold(0.0, f64::max));
    }
    Ok(fitted)
}

fn bernstein(grid: usize, trials: usize, opts: &SuiteOptions) -> Result<Vec<CaseReport>> {
    const NAMES: [&str; 4] = ["h_upper", "h_lower", "v_upper", "v_lower"];
    let mut fitted: [Vec<Option<f64>>; 4] = Default::default();
    for n in [grid, 2 * grid] {
        let g = Grid::cubic(n)?;
        for j in 1..=4 {
            let band = bernstein_band(&g, j, trials, trial_seed(opts.seed, n as u64))?;
            for (i, f) in band.iter().enumerate() {
                if f.is_none() {
                    log::warn!("bernstein: band {j} of {} is empty on {n}^3", NAMES[i]);
                }
                fitted[i].push(*f);
            }
        }
    }
    Ok(NAMES
        .iter()
        .zip(fitted)
        .map(|(name, vals)| {
            let held = vals.iter().all(Option::is_some);
            CaseReport::spread(*name, vals.into_iter().flatten().collect(), held, opts.spread)
        })
        .collect())
}

fn product_laws(grid: usize, trials: usize, opts: &SuiteOptions) -> Result<Vec<CaseReport>> {
    let laws = opts.laws.clone().unwrap_or_else(default_laws);
    let mut cases = Vec::new();
    for (i, law) in laws.iter().enumerate() {
        law.validate().map_err(|e| Error::Precondition(format!("inadmissible index tuple {law:?}: {e}")))?;
        for phase in [0.0, 0.05] {
            let fit = FitOptions {
                grid,
                trials,
                seed: trial_seed(opts.seed, i as u64),
                phase,
                ..FitOptions::default()
            };
            let rep = product_law_fit(law, &fit)?;
            let tag = match law {
                ProductLaw::Full { .. } => "full",
                ProductLaw::TwoTerm { .. } => "two_term",
                ProductLaw::Single { .. } => "single",
            };
            cases.push(CaseReport::stability(
                format!("{tag}_{i}_phase_{phase}"),
                rep.ratios,
                true,
                opts.stability_factor,
            ));
        }
    }
    Ok(cases)
}

fn interpolation(grid: usize, trials: usize, opts: &SuiteOptions) -> Result<Vec<CaseReport>> {
    let g = Grid::cubic(grid)?;
    let gamma = 0.1;
    let mid = AnisoBesovIndex::new(1.0, 0.5);
    let lo = AnisoBesovIndex::new(1.0 - gamma, 0.5 + gamma);
    let hi = AnisoBesovIndex::new(1.0 + gamma, 0.5 - gamma);
    let ratios = collect(par::map_range(trials, |t| {
        let f = random_field(&g, 1, trial_seed(opts.seed, t as u64), 0.1, true);
        interpolation_check(&f, mid, lo, hi)
    }))?;
    Ok(vec![CaseReport::stability("gamma_0.1", ratios, true, opts.stability_factor)])
}

fn composition(grid: usize, trials: usize, opts: &SuiteOptions) -> Result<Vec<CaseReport>> {
    let g = Grid::cubic(grid)?;
    let eps_small = 0.01;
    let gamma = 0.02;
    let phase = 0.05;
    let mut cases = Vec::new();
    for idx in [AnisoBesovIndex::new(1.0, 0.5), AnisoBesovIndex::new(1.0 - gamma, 0.5 + gamma)] {
        let checks = collect(par::map_range(trials, |t| {
            let a = random_field(&g, 1, trial_seed(opts.seed, t as u64), 0.3, true);
            let size = crate::norms::block_energies(&a, phase).besov(AnisoBesovIndex::new(1.0, 0.5));
            // place the sample just inside the smallness condition
            let a = if size > 0.0 { a.scaled(0.9 * eps_small / size) } else { a };
            g_smallness_check(&[(a, phase)], idx, eps_small)
        }))?;
        let held = checks.iter().all(|c| c.precondition_held);
        let ratios = checks.iter().filter_map(|c| c.ratio).collect();
        cases.push(CaseReport::bounded(format!("sigma_{}_s_{}", idx.sigma, idx.s), ratios, held, 2.0));
    }
    Ok(cases)
}

fn heat_smoothing(grid: usize, trials: usize, opts: &SuiteOptions) -> Result<Vec<CaseReport>> {
    let g = Grid::cubic(grid)?;
    let epss = [0.2, 0.1, 0.05];
    let setup = |eps: f64| SmoothingSetup {
        eps,
        index: AnisoBesovIndex::new(1.0, 0.5),
        beta: 0.0,
        delta: 0.1,
        t_end: 1.0,
    };
    let mut cases = Vec::new();
    let max_over = |vals: Vec<f64>| vals.into_iter().fold(0.0, f64::max);

    for line in [HeatLine::Full, HeatLine::Vertical] {
        for r in [LpTime::L1, LpTime::L2, LpTime::LInf] {
            let mut per_eps = Vec::new();
            for eps in epss {
                let vals = collect(par::map_range(trials, |t| {
                    let v0 = random_solenoidal(&g, trial_seed(opts.seed, t as u64), 0.3, true);
                    smoothing_check_41(&v0, &setup(eps), r, line)
                }))?;
                per_eps.push(max_over(vals));
            }
            cases.push(CaseReport::spread(format!("free_{line:?}_{r:?}").to_lowercase(), per_eps, true, opts.spread));
        }
    }

    for (r1, r2) in [(LpTime::L1, LpTime::L1), (LpTime::LInf, LpTime::L1), (LpTime::L2, LpTime::L2)] {
        let mut per_eps = Vec::new();
        for eps in epss {
            let vals = collect(par::map_range(trials, |t| {
                let base = trial_seed(opts.seed ^ 0x5eed, t as u64);
                let samples: Vec<(f64, SpectralField3)> = [0.0, 0.3, 0.6]
                    .iter()
                    .enumerate()
                    .map(|(k, &t0)| (t0, random_field(&g, 3, trial_seed(base, k as u64), 0.3, true)))
                    .collect();
                smoothing_check_42(&samples, &setup(eps), r1, r2)
            }))?;
            per_eps.push(max_over(vals));
        }
        cases.push(CaseReport::spread(format!("forced_{r1:?}_{r2:?}").to_lowercase(), per_eps, true, opts.spread));
    }
    Ok(cases)
}

fn damping(trials: usize, opts: &SuiteOptions) -> Result<Vec<CaseReport>> {
    use rand::Rng;
    let c = 0.5;
    let lambda = 4.0;
    let ratios = collect(
        (0..trials)
            .map(|t| {
                let mut r = rng(trial_seed(opts.seed, t as u64));
                let n = r.random_range(5..60);
                let dts: Vec<f64> = (0..n).map(|_| r.random_range(0.001..0.05)).collect();
                let rates: Vec<f64> = (0..n).map(|_| r.random_range(0.0..5.0)).collect();
                let l = r.random_range(-2..6);
                damping_bound_check(lambda, c, &dts, &rates, l).map(|v| v * c)
            })
            .collect(),
    )?;
    Ok(vec![CaseReport::bounded("scaled_by_c", ratios, true, 1.0 + 1e-12)])
}

fn bony_reconstruction(grid: usize, trials: usize, opts: &SuiteOptions) -> Result<Vec<CaseReport>> {
    let g = Grid::cubic(grid)?;
    let errs = collect(par::map_range(trials, |t| -> Result<Vec<f64>> {
        let base = trial_seed(opts.seed, t as u64);
        let a = random_field(&g, 1, trial_seed(base, 0), 0.1, true);
        let b = random_field(&g, 1, trial_seed(base, 1), 0.1, true);
        let ab = product(&a, &b)?;
        let scale = ab.l2_norm();
        let mut out = Vec::new();
        for dir in Direction::ALL {
            let p = bony(&a, &b, dir)?;
            out.push((&p.sum() - &ab).l2_norm() / scale);
            out.push((&p.alt_sum() - &ab).l2_norm() / scale);
        }
        out.push((&double_bony(&a, &b)?.sum() - &ab).l2_norm() / scale);
        Ok(out)
    }))?;
    let mut names: Vec<String> = Vec::new();
    for dir in Direction::ALL {
        names.push(format!("{dir:?}_standard").to_lowercase());
        names.push(format!("{dir:?}_alternate").to_lowercase());
    }
    names.push("double".into());
    Ok(names
        .into_iter()
        .enumerate()
        .map(|(i, name)| CaseReport::bounded(name, errs.iter().map(|e| e[i]).collect(), true, 1e-12))
        .collect())
}

fn pressure_residual(grid: usize, opts: &SuiteOptions) -> Result<Vec<CaseReport>> {
    let g = Grid::cubic(grid)?;
    let cfg = PressureConfig::default();
    let v = random_solenoidal(&g, trial_seed(opts.seed, 0), 0.3, true);
    let p = EpsParams::new(0.1, 0.1, 0.5, 0.02);

    let zero = SpectralField3::scalar_zeros(&g);
    let q = pressure_solve(&zero, &v, &p, &cfg)?.q;
    let direct = inverse_minus_laplacian_eps(&div(&advect(&v, &v)?)?, p.eps).scaled(p.eps.powf(1.0 - p.alpha));
    let constant = (&q - &direct).l2_norm() / direct.l2_norm();

    let a = random_field(&g, 1, trial_seed(opts.seed, 1), 0.3, true);
    let a = a.scaled(0.01 / (p.eps.powf(p.beta) * a.to_physical().max_abs()));
    let sol = pressure_solve(&a, &v, &p, &cfg)?;

    let mut vert = Vec::new();
    for eps in [0.2, 0.1, 0.05] {
        let pe = EpsParams { eps, ..p };
        let q = pressure_solve(&a, &v, &pe, &cfg)?.q;
        vert.push(d3(&q).scaled(eps * eps).l2_norm());
    }
    let monotone = vert.windows(2).all(|w| w[1] < w[0]);
    Ok(vec![
        CaseReport::bounded("constant_coefficient", vec![constant], true, 1e-12),
        CaseReport::custom(
            "variable_coefficient",
            vec![sol.residual],
            true,
            &format!("residual < 1e-10 within 10 iterations (took {})", sol.iters),
            sol.residual < 1e-10 && sol.iters <= 10,
        ),
        CaseReport::custom("degeneracy", vert, true, "eps^2 |d3 q| decreasing in eps", monotone),
    ])
}
