use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::norms::{block_energies, AnisoBesovIndex, LpTime, NormAccumulator};
use crate::par;
use crate::spectral::ops::physical_product;
use crate::spectral::random::{random_field, trial_seed};
use crate::spectral::{Grid, SpectralField3};

/// Product laws in anisotropic Besov and Chemin-Lerner norms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "law", rename_all = "snake_case")]
pub enum ProductLaw {
    /// Four-term law with eight index pairs, at a single time.
    Full { sigma: [f64; 8], s: [f64; 8] },
    /// Two-term Chemin-Lerner law; `p = [p, p1, p2, p3, p4]`.
    TwoTerm { sigma: [f64; 4], s: [f64; 4], p: [LpTime; 5] },
    /// One-term Chemin-Lerner law; `p = [p, p1, p2]`.
    Single { sigma: [f64; 2], s: [f64; 2], p: [LpTime; 3] },
}

fn inv(p: LpTime) -> f64 {
    match p {
        LpTime::L1 => 1.0,
        LpTime::L2 => 0.5,
        LpTime::LInf => 0.0,
    }
}

const TOL: f64 = 1e-12;

fn equal_positive(sums: &[f64], what: &str) -> Result<()> {
    if sums.iter().any(|x| (x - sums[0]).abs() > TOL) {
        return Err(Error::InvalidParameter(format!("{what} pair sums differ: {sums:?}")));
    }
    if sums[0] <= 0.0 {
        return Err(Error::InvalidParameter(format!("{what} pair sum must be positive, got {}", sums[0])));
    }
    Ok(())
}

fn at_most(values: &[f64], picks: &[usize], bound: f64, what: &str) -> Result<()> {
    for &i in picks {
        if values[i] > bound + TOL {
            return Err(Error::InvalidParameter(format!(
                "{what}{} = {} exceeds {bound}",
                i + 1,
                values[i]
            )));
        }
    }
    Ok(())
}

impl ProductLaw {
    pub fn validate(&self) -> Result<()> {
        match self {
            ProductLaw::Full { sigma, s } => {
                equal_positive(&[sigma[0] + sigma[1], sigma[2] + sigma[3], sigma[4] + sigma[5], sigma[6] + sigma[7]], "sigma")?;
                equal_positive(&[s[0] + s[1], s[2] + s[3], s[4] + s[5], s[6] + s[7]], "s")?;
                at_most(sigma, &[0, 3, 4, 7], 1.0, "sigma")?;
                at_most(s, &[0, 3, 5, 6], 0.5, "s")
            }
            ProductLaw::TwoTerm { sigma, s, p } => {
                equal_positive(&[sigma[0] + sigma[1], sigma[2] + sigma[3]], "sigma")?;
                equal_positive(&[s[0] + s[1], s[2] + s[3]], "s")?;
                let first = at_most(sigma, &[0, 1, 2, 3], 1.0, "sigma").and_then(|_| at_most(s, &[0, 3], 0.5, "s"));
                let second = at_most(sigma, &[0, 3], 1.0, "sigma").and_then(|_| at_most(s, &[0, 1, 2, 3], 0.5, "s"));
                first.or(second)?;
                time_exponents(inv(p[0]), &[(p[1], p[2]), (p[3], p[4])])
            }
            ProductLaw::Single { sigma, s, p } => {
                equal_positive(&[sigma[0] + sigma[1]], "sigma")?;
                equal_positive(&[s[0] + s[1]], "s")?;
                at_most(sigma, &[0, 1], 1.0, "sigma")?;
                at_most(s, &[0, 1], 0.5, "s")?;
                time_exponents(inv(p[0]), &[(p[1], p[2])])
            }
        }
    }

    /// Index of the left-hand side, `(sigma1 + sigma2 - 1, s1 + s2 - 1/2)`.
    pub fn target(&self) -> AnisoBesovIndex {
        let (a, b) = match self {
            ProductLaw::Full { sigma, s } => ((sigma[0], sigma[1]), (s[0], s[1])),
            ProductLaw::TwoTerm { sigma, s, .. } => ((sigma[0], sigma[1]), (s[0], s[1])),
            ProductLaw::Single { sigma, s, .. } => ((sigma[0], sigma[1]), (s[0], s[1])),
        };
        AnisoBesovIndex::new(a.0 + a.1 - 1.0, b.0 + b.1 - 0.5)
    }

    /// `(p, [(index_a, p_a, index_b, p_b)])`
    fn terms(&self) -> (LpTime, Vec<(AnisoBesovIndex, LpTime, AnisoBesovIndex, LpTime)>) {
        let pair = |sigma: &[f64], s: &[f64], i: usize| {
            (
                AnisoBesovIndex::new(sigma[2 * i], s[2 * i]),
                AnisoBesovIndex::new(sigma[2 * i + 1], s[2 * i + 1]),
            )
        };
        match self {
            ProductLaw::Full { sigma, s } => (
                LpTime::LInf,
                (0..4)
                    .map(|i| {
                        let (x, y) = pair(sigma, s, i);
                        (x, LpTime::LInf, y, LpTime::LInf)
                    })
                    .collect(),
            ),
            ProductLaw::TwoTerm { sigma, s, p } => (
                p[0],
                (0..2)
                    .map(|i| {
                        let (x, y) = pair(sigma, s, i);
                        (x, p[1 + 2 * i], y, p[2 + 2 * i])
                    })
                    .collect(),
            ),
            ProductLaw::Single { sigma, s, p } => {
                let (x, y) = pair(sigma, s, 0);
                (p[0], vec![(x, p[1], y, p[2])])
            }
        }
    }

    fn is_timed(&self) -> bool {
        !matches!(self, ProductLaw::Full { .. })
    }
}

fn time_exponents(target: f64, pairs: &[(LpTime, LpTime)]) -> Result<()> {
    for (a, b) in pairs {
        if (inv(*a) + inv(*b) - target).abs() > TOL {
            return Err(Error::InvalidParameter(format!(
                "time exponents {a:?}, {b:?} do not combine to the target exponent"
            )));
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitOptions {
    pub grid: usize,
    pub trials: usize,
    pub seed: u64,
    /// Static phase `Phi = phase |xi|`.
    pub phase: f64,
    /// Envelope `e^{-envelope |xi|}` of the random inputs.
    pub envelope: f64,
    /// Time samples per trial for the Chemin-Lerner laws.
    pub samples: usize,
    pub dt: f64,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions {
            grid: 32,
            trials: 100,
            seed: 1,
            phase: 0.0,
            envelope: 0.1,
            samples: 4,
            dt: 0.25,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitReport {
    pub index_tuple: ProductLaw,
    pub trials: usize,
    pub grid: usize,
    pub phase: f64,
    pub max_ratio: f64,
    pub median_ratio: f64,
    pub seed: u64,
    pub ratios: Vec<f64>,
}

pub(crate) fn median(values: &[f64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        0.5 * (v[m - 1] + v[m])
    }
}

/// `LHS / RHS` of `law` for sampled series `a(t_i)`, `b(t_i)` held over
/// intervals of length `dt`; a zero right-hand side gives 0.
pub fn law_ratio(law: &ProductLaw, a: &[SpectralField3], b: &[SpectralField3], phase: f64, dt: f64) -> Result<f64> {
    let first = a.first().ok_or(Error::EmptySeries)?;
    if a.len() != b.len() {
        return Err(Error::InvalidParameter("series lengths differ".into()));
    }
    let grid = first.grid();
    let mut acc_a = NormAccumulator::new(grid, 1);
    let mut acc_b = NormAccumulator::new(grid, 1);
    let mut acc_ab = NormAccumulator::new(grid, 1);
    for (x, y) in a.iter().zip(b) {
        x.ensure_same_grid(y)?;
        let xy = physical_product(&x.to_physical(), &y.to_physical());
        acc_a.accumulate_table(&block_energies(x, phase), dt)?;
        acc_b.accumulate_table(&block_energies(y, phase), dt)?;
        acc_ab.accumulate_table(&block_energies(&xy, phase), dt)?;
    }
    let (p, terms) = law.terms();
    let lhs = acc_ab.norm(p, law.target());
    let rhs: f64 = terms
        .iter()
        .map(|(ia, pa, ib, pb)| acc_a.norm(*pa, *ia) * acc_b.norm(*pb, *ib))
        .sum();
    Ok(if rhs == 0.0 { 0.0 } else { lhs / rhs })
}

fn trial_ratio(law: &ProductLaw, grid: &Grid, opts: &FitOptions, trial: usize) -> Result<f64> {
    let samples = if law.is_timed() { opts.samples.max(1) } else { 1 };
    let base = trial_seed(opts.seed, trial as u64);
    let draw = |k: usize| random_field(grid, 1, trial_seed(base, k as u64), opts.envelope, true);
    let a: Vec<_> = (0..samples).map(|k| draw(2 * k)).collect();
    let b: Vec<_> = (0..samples).map(|k| draw(2 * k + 1)).collect();
    law_ratio(law, &a, &b, opts.phase, opts.dt)
}

/// Fits the implied constant of a product law over random trials.
pub fn product_law_fit(law: &ProductLaw, opts: &FitOptions) -> Result<FitReport> {
    law.validate()?;
    if opts.trials == 0 {
        return Err(Error::InvalidParameter("trials must be positive".into()));
    }
    let grid = Grid::cubic(opts.grid)?;
    crate::norms::check_phase(&SpectralField3::scalar_zeros(&grid), opts.phase)?;
    let ratios = par::map_range(opts.trials, |t| trial_ratio(law, &grid, opts, t))
        .into_iter()
        .collect::<Result<Vec<f64>>>()?;
    Ok(FitReport {
        index_tuple: law.clone(),
        trials: opts.trials,
        grid: opts.grid,
        phase: opts.phase,
        max_ratio: ratios.iter().copied().fold(0.0, f64::max),
        median_ratio: median(&ratios),
        seed: opts.seed,
        ratios,
    })
}
