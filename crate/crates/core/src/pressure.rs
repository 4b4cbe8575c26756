//! Pressure of the rescaled system: a fixed point on the splitting
//! `q = q1 + ... + q5`, its diagnostics, and end-point norm monitors.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::norms::{block_energies, AnisoBesovIndex, LpTime, NormAccumulator};
use crate::semigroup::EpsParams;
use crate::spectral::ops::{
    advect, d3, dealias_in_place, div, div_h, inverse_minus_laplacian_eps, laplacian_eps, laplacian_h, nabla_eps,
    nabla_sup_eps, partial,
};
use crate::spectral::{Grid, PhysicalField, SpectralField3};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PressureConfig {
    pub max_iters: usize,
    /// Relative residual target.
    pub tol: f64,
    pub relaxation: f64,
}

impl Default for PressureConfig {
    fn default() -> Self {
        PressureConfig {
            max_iters: 50,
            tol: 1e-10,
            relaxation: 1.0,
        }
    }
}

impl PressureConfig {
    pub fn validate(&self) -> Result<()> {
        if self.max_iters == 0 || !(self.tol > 0.0) || !(self.relaxation > 0.0 && self.relaxation <= 1.0) {
            return Err(Error::InvalidParameter(format!(
                "pressure config needs max_iters >= 1, tol > 0, relaxation in (0, 1]; got {self:?}"
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PressureSolution {
    pub q: SpectralField3,
    pub iters: usize,
    pub residual: f64,
    /// Relative residual after each iteration.
    pub history: Vec<f64>,
}

/// Pointwise coefficient fields derived from the density perturbation.
struct Coefficients {
    /// `G(eps^beta a)`
    g: PhysicalField,
    /// `1 / (1 + eps^beta a)`
    rho_inv: PhysicalField,
}

fn coefficients(a: &SpectralField3, params: &EpsParams) -> Result<Coefficients> {
    let scale = params.eps.powf(params.beta);
    let mut b = a.to_physical();
    for x in b.values_mut() {
        *x *= scale;
    }
    let min = 1.0 + b.min();
    if min <= 0.0 {
        return Err(Error::DensityPositivity(min));
    }
    let mut g = b.clone();
    let mut rho_inv = b;
    for (gv, rv) in g.values_mut().iter_mut().zip(rho_inv.values_mut()) {
        let x = *gv;
        *gv = x / (1.0 + x);
        *rv = 1.0 / (1.0 + x);
    }
    Ok(Coefficients { g, rho_inv })
}

/// Dealiased product of a scalar physical coefficient with every component of `f`.
fn times(coef: &PhysicalField, f: &SpectralField3) -> SpectralField3 {
    let mut p = f.to_physical();
    let n = coef.grid().len();
    for c in 0..f.components() {
        for (x, k) in p.component_mut(c).iter_mut().zip(coef.values()) {
            *x *= k;
        }
    }
    debug_assert_eq!(p.values().len(), n * f.components());
    let mut out = p.to_spectral();
    dealias_in_place(&mut out);
    out
}

/// Dealiased pointwise product of two scalar fields.
fn scalar_product(a: &SpectralField3, b: &SpectralField3) -> SpectralField3 {
    let pa = a.to_physical();
    times(&pa, b)
}

/// `nabla_eps . w` for a three-component `w`.
fn div_eps(w: &SpectralField3, eps: f64) -> Result<SpectralField3> {
    let mut out = div_h(w)?;
    out += &partial(&w.extract(2), 2).scaled(eps);
    Ok(out)
}

/// `-(-Delta_eps)^{-1} nabla_eps . (G nabla_eps q)`
fn q1_term(g: &PhysicalField, q: &SpectralField3, eps: f64) -> Result<SpectralField3> {
    let flux = times(g, &nabla_eps(q, eps)?);
    Ok(inverse_minus_laplacian_eps(&div_eps(&flux, eps)?, eps).scaled(-1.0))
}

fn check_inputs(a: &SpectralField3, v: &SpectralField3) -> Result<()> {
    a.ensure_components(1)?;
    v.ensure_components(3)?;
    a.ensure_same_grid(v)?;
    let scale = v.l2_norm();
    let d = div(v)?.l2_norm();
    if scale > 0.0 && d > 1e-8 * scale {
        return Err(Error::Precondition(format!("velocity divergence {d:e} exceeds 1e-8 relative")));
    }
    Ok(())
}

/// The source part `q2 + q3 + q4 + q5` (independent of `q`).
fn source_terms(v: &SpectralField3, coef: &Coefficients, params: &EpsParams, adv: f64) -> Result<[SpectralField3; 4]> {
    let eps = params.eps;
    let vh = v.extract_range(0..2);
    let v3 = v.extract(2);
    let inv = |f: &SpectralField3| inverse_minus_laplacian_eps(f, eps);
    let q5 = inv(&div(&times(&coef.g, &laplacian_eps(v, eps)))?);
    if adv == 0.0 {
        let zero = SpectralField3::scalar_zeros(v.grid());
        return Ok([zero.clone(), zero.clone(), zero, q5]);
    }

    // div_h div_h (v^h (x) v^h)
    let mut dd = SpectralField3::scalar_zeros(v.grid());
    for i in 0..2 {
        for j in 0..2 {
            let vij = scalar_product(&vh.extract(i), &vh.extract(j));
            dd += &partial(&partial(&vij, i), j);
        }
    }
    let q2 = inv(&dd).scaled(adv);
    let v3vh = SpectralField3::stack(&[&scalar_product(&v3, &vh.extract(0)), &scalar_product(&v3, &vh.extract(1))])?;
    let q3 = inv(&d3(&div_h(&v3vh)?)).scaled(2.0 * adv);
    let q4 = inv(&d3(&scalar_product(&v3, &div_h(&vh)?))).scaled(-2.0 * adv);
    Ok([q2, q3, q4, q5])
}

/// Residual of
/// `-div(rho^{-1} nabla^eps q) = eps^{1-alpha} div(v . grad v) - div(rho^{-1} Delta_eps v)`
/// relative to the summed norms of the right-hand side pieces (the viscous
/// divergence cancels almost exactly, so its own norm is no usable scale),
/// floored by `||Delta_eps v||` for flows where every piece vanishes.
fn residual(q: &SpectralField3, v: &SpectralField3, coef: &Coefficients, eps: f64, adv: f64) -> Result<f64> {
    let lhs = div(&times(&coef.rho_inv, &nabla_sup_eps(q, eps)?))?.scaled(-1.0);
    let mut rhs = SpectralField3::scalar_zeros(v.grid());
    let mut scale = 0.0;
    if adv != 0.0 {
        rhs = div(&advect(v, v)?)?.scaled(adv);
        scale += rhs.l2_norm();
    }
    let lap = laplacian_eps(v, eps);
    let floor = lap.l2_norm();
    let visc = times(&coef.rho_inv, &lap);
    for c in 0..3 {
        let piece = partial(&visc.extract(c), c);
        scale += piece.l2_norm();
        rhs -= &piece;
    }
    let err = (&lhs - &rhs).l2_norm();
    let scale = scale.max(floor);
    Ok(if scale == 0.0 { err } else { err / scale })
}

/// Solves for the pressure by iterating `q <- q1(q) + q2 + q3 + q4 + q5`
/// from the constant-density solution.
pub fn pressure_solve(
    a: &SpectralField3,
    v: &SpectralField3,
    params: &EpsParams,
    cfg: &PressureConfig,
) -> Result<PressureSolution> {
    solve_scaled(a, v, params, cfg, params.eps.powf(1.0 - params.alpha))
}

/// As [`pressure_solve`] with the advection coefficient `eps^{1-alpha}`
/// replaced by `adv` (zero for the linear system).
pub(crate) fn solve_scaled(
    a: &SpectralField3,
    v: &SpectralField3,
    params: &EpsParams,
    cfg: &PressureConfig,
    adv: f64,
) -> Result<PressureSolution> {
    cfg.validate()?;
    check_inputs(a, v)?;
    let coef = coefficients(a, params)?;
    let [q2, q3, q4, q5] = source_terms(v, &coef, params, adv)?;
    let mut source = &q2 + &q3;
    source += &q4;
    source += &q5;
    let mut q = source.clone();
    let mut history = Vec::new();
    for iter in 1..=cfg.max_iters {
        if iter > 1 {
            let mut next = q1_term(&coef.g, &q, params.eps)?;
            next += &source;
            q.scale_in_place(1.0 - cfg.relaxation);
            q.axpy(cfg.relaxation, &next);
        }
        let r = residual(&q, v, &coef, params.eps, adv)?;
        history.push(r);
        if r <= cfg.tol {
            zero_mean(&mut q);
            return Ok(PressureSolution {
                q,
                iters: iter,
                residual: r,
                history,
            });
        }
    }
    Err(Error::PressureNonConvergence {
        iters: cfg.max_iters,
        residual: history.last().copied().unwrap_or(f64::NAN),
    })
}

fn zero_mean(q: &mut SpectralField3) {
    q.coeffs_mut()[0] = num_complex::Complex64::new(0.0, 0.0);
}

/// The pieces of the pressure splitting.
#[derive(Debug, Clone, PartialEq)]
pub struct PressureTerms {
    pub q1: SpectralField3,
    pub q2: SpectralField3,
    pub q3: SpectralField3,
    pub q4: SpectralField3,
    pub q5: SpectralField3,
    pub q51: SpectralField3,
    pub q52: SpectralField3,
    pub q53: SpectralField3,
    pub q54: SpectralField3,
}

impl PressureTerms {
    pub fn sum(&self) -> SpectralField3 {
        let mut s = &self.q1 + &self.q2;
        for f in [&self.q3, &self.q4, &self.q5] {
            s += f;
        }
        s
    }

    pub fn q5_sum(&self) -> SpectralField3 {
        let mut s = &self.q51 + &self.q52;
        s += &self.q53;
        s += &self.q54;
        s
    }
}

pub fn pressure_terms(
    a: &SpectralField3,
    v: &SpectralField3,
    q: &SpectralField3,
    params: &EpsParams,
) -> Result<PressureTerms> {
    check_inputs(a, v)?;
    q.ensure_components(1)?;
    let eps = params.eps;
    let coef = coefficients(a, params)?;
    let [q2, q3, q4, q5] = source_terms(v, &coef, params, params.eps.powf(1.0 - params.alpha))?;
    let vh = v.extract_range(0..2);
    let v3 = v.extract(2);
    let inv = |f: &SpectralField3| inverse_minus_laplacian_eps(f, eps);
    let vert = |f: &SpectralField3| d3(&d3(f)).scaled(eps * eps);
    Ok(PressureTerms {
        q1: q1_term(&coef.g, q, eps)?,
        q2,
        q3,
        q4,
        q5,
        q51: inv(&div_h(&times(&coef.g, &laplacian_h(&vh)))?),
        q52: inv(&div_h(&times(&coef.g, &vert(&vh)))?),
        q53: inv(&d3(&times(&coef.g, &laplacian_h(&v3)))),
        q54: inv(&d3(&times(&coef.g, &vert(&v3)))),
    })
}

/// Time records of `nabla_h q_Phi` and `nabla_eps q_Phi` plus one row per solve.
#[derive(Debug, Clone, PartialEq)]
pub struct PressureHistory {
    pub grad_h: NormAccumulator,
    pub grad_eps: NormAccumulator,
    pub rows: Vec<PressureRow>,
    gamma: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PressureRow {
    pub t: f64,
    pub iters: usize,
    pub residual: f64,
    pub y_norm_partial: f64,
    pub z_norm_partial: f64,
}

impl PressureHistory {
    pub fn new(grid: &Grid, gamma: f64) -> Self {
        PressureHistory {
            grad_h: NormAccumulator::new(grid, 2),
            grad_eps: NormAccumulator::new(grid, 3),
            rows: Vec::new(),
            gamma,
        }
    }

    /// `||nabla_h q_Phi||_{L^1_t(B^{-1,1/2})} + ||nabla_eps q_Phi||_{L^1_t(B^{-1+g,1/2-g})}`
    pub fn y_norm(&self) -> f64 {
        let g = self.gamma;
        self.grad_h.norm(LpTime::L1, AnisoBesovIndex::new(-1.0, 0.5))
            + self.grad_eps.norm(LpTime::L1, AnisoBesovIndex::new(-1.0 + g, 0.5 - g))
    }

    /// `||nabla_eps q_Phi||_{L^1_t(B^{g,1/2-g})} + ||nabla_eps q_Phi||_{L^1_t(B^{-g,1/2+g})}`
    pub fn z_norm(&self) -> f64 {
        let g = self.gamma;
        self.grad_eps.norm(LpTime::L1, AnisoBesovIndex::new(g, 0.5 - g))
            + self.grad_eps.norm(LpTime::L1, AnisoBesovIndex::new(-g, 0.5 + g))
    }

    /// Records the pressure `q` held over `[t, t + dt)` with phase band `band`.
    pub fn record(&mut self, t: f64, dt: f64, band: f64, q: &SpectralField3, eps: f64, iters: usize, residual: f64) -> Result<()> {
        let ge = nabla_eps(q, eps)?;
        let gh = ge.extract_range(0..2);
        self.grad_h.accumulate_table(&block_energies(&gh, band), dt)?;
        self.grad_eps.accumulate_table(&block_energies(&ge, band), dt)?;
        self.rows.push(PressureRow {
            t,
            iters,
            residual,
            y_norm_partial: self.y_norm(),
            z_norm_partial: self.z_norm(),
        });
        Ok(())
    }

    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "t,iters,residual,Y_norm_partial,Z_norm_partial")?;
        for r in &self.rows {
            writeln!(w, "{:e},{},{:e},{:e},{:e}", r.t, r.iters, r.residual, r.y_norm_partial, r.z_norm_partial)?;
        }
        Ok(())
    }
}

/// Implied constants of the two pressure end-point estimates for one run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PressureMonitorReport {
    pub y_norm: f64,
    pub z_norm: f64,
    pub theta: f64,
    pub psi: f64,
    /// `eps^{1-alpha} |q|_Y / (max(eps^{beta-alpha-2gamma}, eps^{1-2alpha-2gamma}) theta Psi)`
    pub y_ratio: f64,
    /// `eps^{2alpha+gamma} |q|_Z / Psi^2`
    pub z_ratio: f64,
}

fn ratio(num: f64, den: f64) -> f64 {
    if den == 0.0 {
        if num != 0.0 {
            log::warn!("pressure monitor: nonzero norm over a zero bound");
            return f64::INFINITY;
        }
        0.0
    } else {
        num / den
    }
}

pub fn pressure_estimate_monitor(history: &PressureHistory, params: &EpsParams, theta: f64, psi: f64) -> PressureMonitorReport {
    let (e, a, b, g) = (params.eps, params.alpha, params.beta, params.gamma);
    let y = history.y_norm();
    let z = history.z_norm();
    let y_bound = e.powf(b - a - 2.0 * g).max(e.powf(1.0 - 2.0 * a - 2.0 * g)) * theta * psi;
    PressureMonitorReport {
        y_norm: y,
        z_norm: z,
        theta,
        psi,
        y_ratio: ratio(e.powf(1.0 - a) * y, y_bound),
        z_ratio: ratio(e.powf(2.0 * a + g) * z, psi * psi),
    }
}
