use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::norms::{block_energies, check_phase, AnisoBesovIndex, BlockTable, LpTime, NormAccumulator, PhaseState};
use crate::pressure::{solve_scaled, PressureConfig, PressureHistory};
use crate::semigroup::{heat_apply, phi1, EpsParams};
use crate::spectral::ops::{
    advect, dealias_in_place, div, laplacian_eps, leray_project, minus_laplacian_eps_symbol, nabla_sup_eps,
};
use crate::spectral::{PhysicalField, SpectralField3};

use super::config::Physics;

fn ix(sigma: f64, s: f64) -> AnisoBesovIndex {
    AnisoBesovIndex::new(sigma, s)
}

/// Everything a step needs besides the state.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepConfig {
    pub params: EpsParams,
    pub physics: Physics,
    pub pressure: PressureConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThetaSample {
    pub t: f64,
    pub theta: f64,
    pub theta_dot: f64,
}

/// The four constituents of `Psi`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PsiParts {
    pub psi1: f64,
    pub psi2: f64,
    pub psi3: f64,
    pub psi4: f64,
}

impl PsiParts {
    pub fn total(&self) -> f64 {
        self.psi1 + self.psi2 + self.psi3 + self.psi4
    }
}

/// Chemin-Lerner records of `a_Phi` and `v_Phi`; every constituent of `Psi`
/// is a weighted sum over these.
#[derive(Debug, Clone, PartialEq)]
pub struct PsiAccumulators {
    pub a: NormAccumulator,
    pub v: NormAccumulator,
}

impl PsiAccumulators {
    pub fn parts(&self, p: &EpsParams) -> PsiParts {
        let (e, al, g) = (p.eps, p.alpha, p.gamma);
        let a = &self.a;
        let psi1 = a.norm(LpTime::LInf, ix(1.0, 0.5))
            + a.norm(LpTime::LInf, ix(1.0 + g, 0.5 - g))
            + a.norm(LpTime::LInf, ix(1.0 - g, 0.5 + g))
            + e.powf(3.0 * al + 3.0 * g) * a.norm(LpTime::LInf, ix(g, 1.5 - g));
        let v = &self.v;
        let psi2 = v.norm(LpTime::LInf, ix(0.0, 0.5))
            + v.norm(LpTime::LInf, ix(g, 0.5 - g))
            + v.norm(LpTime::LInf, ix(-g, 0.5 + g));
        let group = |comps: std::ops::Range<usize>, p: LpTime, d: f64, vert: f64, w: f64| {
            let n = |s: f64, t: f64| v.norm_components(comps.clone(), p, ix(s, t));
            n(d, 0.5)
                + n(d + g, 0.5 - g)
                + n(d - g, 0.5 + g)
                + w * (n(0.0, vert) + n(g, vert - g) + n(-g, vert + g))
        };
        let psi3 = e.powf(2.0 * al + 2.0 * g) * group(0..2, LpTime::L1, 2.0, 2.5, e * e)
            + group(2..3, LpTime::L1, 2.0, 2.5, e * e);
        let psi4 =
            e.powf(al + g) * group(0..2, LpTime::L2, 1.0, 1.5, e) + group(2..3, LpTime::L2, 1.0, 1.5, e);
        PsiParts { psi1, psi2, psi3, psi4 }
    }
}

/// `theta'` from the block table of `v_Phi`.
pub fn theta_dot_table(tv: &BlockTable, p: &EpsParams) -> f64 {
    let (e, al, g) = (p.eps, p.alpha, p.gamma);
    let b = |c: std::ops::Range<usize>, s: f64, t: f64| tv.besov_components(c, ix(s, t));
    let tail = e.powf(1.0 + g);
    let h = b(0..2, 1.0, 0.5) + b(0..2, 1.0 - g, 0.5 + g) + b(0..2, 1.0 + g, 0.5 - g) + tail * b(0..2, -g, 1.5 + g);
    let v = b(2..3, 1.0, 0.5) + b(2..3, 1.0 + g, 0.5 - g) + tail * b(2..3, -g, 1.5 + g);
    e.powf(1.0 - al) * h + e.powf(g) * v
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverState {
    pub a: SpectralField3,
    pub v: SpectralField3,
    /// Pressure of the current `(a, v)`.
    pub q: SpectralField3,
    pub t: f64,
    pub phase: PhaseState,
    pub psi: PsiAccumulators,
    pub theta_history: Vec<ThetaSample>,
    pub pressure: PressureHistory,
    pub pressure_iters: usize,
    pub pressure_residual: f64,
    table_a: BlockTable,
    table_v: BlockTable,
}

fn tables(a: &SpectralField3, v: &SpectralField3, band: f64) -> Result<(BlockTable, BlockTable)> {
    check_phase(a, band)?;
    Ok((block_energies(a, band), block_energies(v, band)))
}

fn solve_pressure(a: &SpectralField3, v: &SpectralField3, cfg: &StepConfig) -> Result<(SpectralField3, usize, f64)> {
    if !cfg.physics.pressure {
        return Ok((SpectralField3::scalar_zeros(a.grid()), 0, 0.0));
    }
    let zero;
    let a_eff = if cfg.physics.density {
        a
    } else {
        zero = SpectralField3::scalar_zeros(a.grid());
        &zero
    };
    let p = &cfg.params;
    let adv = if cfg.physics.nonlinear { p.eps.powf(1.0 - p.alpha) } else { 0.0 };
    let sol = solve_scaled(a_eff, v, p, &cfg.pressure, adv)?;
    Ok((sol.q, sol.iters, sol.residual))
}

/// Relative divergence `||div v|| / ||v||`.
pub fn div_residual(v: &SpectralField3) -> Result<f64> {
    let n = v.l2_norm();
    Ok(if n == 0.0 { 0.0 } else { div(v)?.l2_norm() / n })
}

/// `min(1 + eps^beta a)` over the grid.
pub fn min_density(a: &SpectralField3, p: &EpsParams) -> f64 {
    1.0 + p.eps.powf(p.beta) * a.to_physical().min()
}

fn pointwise(coef: &PhysicalField, f: &SpectralField3) -> SpectralField3 {
    let mut p = f.to_physical();
    for c in 0..f.components() {
        for (x, k) in p.component_mut(c).iter_mut().zip(coef.values()) {
            *x *= k;
        }
    }
    let mut out = p.to_spectral();
    dealias_in_place(&mut out);
    out
}

impl SolverState {
    /// Initial state; `a0`, `v0` are expected dealiased with `v0` solenoidal.
    pub fn new(a0: SpectralField3, v0: SpectralField3, delta: f64, lambda: f64, cfg: &StepConfig) -> Result<Self> {
        a0.ensure_components(1)?;
        v0.ensure_components(3)?;
        a0.ensure_same_grid(&v0)?;
        let d = div_residual(&v0)?;
        if d > 1e-8 {
            return Err(Error::Precondition(format!("initial velocity divergence {d:e}")));
        }
        let md = min_density(&a0, &cfg.params);
        if md <= 0.0 {
            return Err(Error::DensityPositivity(md));
        }
        let grid = a0.grid().clone();
        let phase = PhaseState::new(delta, lambda, cfg.params.gamma);
        let (table_a, table_v) = tables(&a0, &v0, phase.band())?;
        let mut psi = PsiAccumulators {
            a: NormAccumulator::new(&grid, 1),
            v: NormAccumulator::new(&grid, 3),
        };
        psi.a.observe_table(&table_a)?;
        psi.v.observe_table(&table_v)?;
        let (q, iters, residual) = solve_pressure(&a0, &v0, cfg)?;
        let theta_dot = theta_dot_table(&table_v, &cfg.params);
        Ok(SolverState {
            a: a0,
            v: v0,
            q,
            t: 0.0,
            phase,
            psi,
            theta_history: vec![ThetaSample {
                t: 0.0,
                theta: 0.0,
                theta_dot,
            }],
            pressure: PressureHistory::new(&grid, cfg.params.gamma),
            pressure_iters: iters,
            pressure_residual: residual,
            table_a,
            table_v,
        })
    }

    pub fn band(&self) -> f64 {
        self.phase.band()
    }

    pub fn theta(&self) -> f64 {
        self.phase.theta
    }

    /// Block table of `v_Phi` at the current band.
    pub fn v_table(&self) -> &BlockTable {
        &self.table_v
    }

    pub fn psi_parts(&self, p: &EpsParams) -> PsiParts {
        self.psi.parts(p)
    }

    /// `F1 + F2 + F3` at the current state.
    fn forcing(&self, cfg: &StepConfig) -> Result<SpectralField3> {
        let p = &cfg.params;
        let mut f = SpectralField3::vector_zeros(self.a.grid());
        if cfg.physics.nonlinear {
            f.axpy(-p.eps.powf(1.0 - p.alpha), &advect(&self.v, &self.v)?);
        }
        if cfg.physics.density || cfg.physics.pressure {
            let b = self.a.to_physical();
            let scale = if cfg.physics.density { p.eps.powf(p.beta) } else { 0.0 };
            let mut g = b.clone();
            let mut rho_inv = b;
            for (gv, rv) in g.values_mut().iter_mut().zip(rho_inv.values_mut()) {
                let x = scale * *gv;
                *gv = x / (1.0 + x);
                *rv = 1.0 / (1.0 + x);
            }
            if cfg.physics.density {
                f -= &pointwise(&g, &laplacian_eps(&self.v, p.eps));
            }
            if cfg.physics.pressure {
                f -= &pointwise(&rho_inv, &nabla_sup_eps(&self.q, p.eps)?);
            }
        }
        Ok(f)
    }

    /// Advances by `dt`. On error the state is left untouched.
    pub fn step(&mut self, dt: f64, cfg: &StepConfig) -> Result<()> {
        if !(dt > 0.0) {
            return Err(Error::InvalidParameter(format!("dt must be positive, got {dt}")));
        }
        let p = &cfg.params;
        let band = self.band();
        let theta_dot = theta_dot_table(&self.table_v, p);

        let mut a = self.a.clone();
        if cfg.physics.nonlinear {
            a.axpy(-dt * p.eps.powf(1.0 - p.alpha), &advect(&self.v, &self.a)?);
        }
        let forcing = self.forcing(cfg)?;
        let grid = forcing.grid().clone();
        let eps = p.eps;
        let integrated = forcing.map_real(move |i| phi1(dt, minus_laplacian_eps_symbol(&grid, i, eps)));
        let mut v = heat_apply(&self.v, dt, eps)?;
        v += &integrated;
        let v = leray_project(&v)?;

        let mut phase = self.phase;
        phase.theta += dt * theta_dot;
        if phase.band() < 0.0 {
            return Err(Error::BandExhausted(phase.band()));
        }
        let md = min_density(&a, p);
        if md <= 0.0 {
            return Err(Error::DensityPositivity(md));
        }
        let (q, iters, residual) = solve_pressure(&a, &v, cfg)?;
        let (table_a, table_v) = tables(&a, &v, phase.band())?;

        // the step-start sample is held over [t, t + dt)
        self.psi.a.accumulate_table(&self.table_a, dt)?;
        self.psi.v.accumulate_table(&self.table_v, dt)?;
        self.psi.a.observe_table(&table_a)?;
        self.psi.v.observe_table(&table_v)?;
        if cfg.physics.pressure {
            self.pressure
                .record(self.t, dt, band, &self.q, eps, self.pressure_iters, self.pressure_residual)?;
        }

        self.t += dt;
        self.a = a;
        self.v = v;
        self.q = q;
        self.phase = phase;
        self.pressure_iters = iters;
        self.pressure_residual = residual;
        self.table_a = table_a;
        self.table_v = table_v;
        let next = theta_dot_table(&self.table_v, p);
        self.theta_history.push(ThetaSample {
            t: self.t,
            theta: self.phase.theta,
            theta_dot: next,
        });
        Ok(())
    }
}

/// `theta'` at the current state, evaluated on `v_Phi` at the current band.
pub fn theta_dot(state: &SolverState, p: &EpsParams) -> Result<f64> {
    if state.band() < 0.0 {
        return Err(Error::BandExhausted(state.band()));
    }
    Ok(theta_dot_table(state.v_table(), p))
}

/// Functional form of [`SolverState::step`].
pub fn step(state: &SolverState, dt: f64, cfg: &StepConfig) -> Result<SolverState> {
    let mut next = state.clone();
    next.step(dt, cfg)?;
    Ok(next)
}
