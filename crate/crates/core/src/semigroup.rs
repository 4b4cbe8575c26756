//! Anisotropic heat semigroup `e^{t Delta_eps}`, the Duhamel operator and
//! checks of their smoothing estimates in Chemin-Lerner norms.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::norms::{AnisoBesovIndex, LpTime};
use crate::par;
use crate::spectral::ops::{div, minus_laplacian_eps_symbol};
use crate::spectral::SpectralField3;

/// Scaling parameter `eps` and exponents `alpha`, `beta`, `gamma`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EpsParams {
    pub eps: f64,
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
}

/// Which of the parameter ranges used by the various estimates hold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConstraintReport {
    /// `0 < alpha < 1/3`, `beta > 2 alpha`, `0 < gamma < min((beta-2alpha)/5, (1-3alpha)/5)`
    pub global: bool,
    /// `0 < alpha < 1/2`, `beta > alpha`, `0 < gamma < min((beta-alpha)/2, (1-2alpha)/4)`
    pub theta_bound: bool,
    /// `0 < alpha < 1/3`, `beta > 2 alpha`, `0 < gamma <= min((beta-2alpha)/2, (1-3alpha)/4)`
    pub psi_bound: bool,
    /// `gamma <= min((beta-alpha)/4, (beta-2alpha)/3, (1-3alpha)/5)`
    pub continuation: bool,
}

impl EpsParams {
    pub fn new(eps: f64, alpha: f64, beta: f64, gamma: f64) -> Self {
        EpsParams { eps, alpha, beta, gamma }
    }

    /// Upper end of the admissible `gamma` range.
    pub fn gamma0(&self) -> f64 {
        ((self.beta - 2.0 * self.alpha) / 5.0).min((1.0 - 3.0 * self.alpha) / 5.0)
    }

    pub fn constraints(&self) -> ConstraintReport {
        let (a, b, g) = (self.alpha, self.beta, self.gamma);
        let base3 = a > 0.0 && a < 1.0 / 3.0 && b > 2.0 * a && g > 0.0;
        ConstraintReport {
            global: base3 && g < self.gamma0(),
            theta_bound: a > 0.0 && a < 0.5 && b > a && g > 0.0 && g < ((b - a) / 2.0).min((1.0 - 2.0 * a) / 4.0),
            psi_bound: base3 && g <= ((b - 2.0 * a) / 2.0).min((1.0 - 3.0 * a) / 4.0),
            continuation: g > 0.0 && g <= ((b - a) / 4.0).min((b - 2.0 * a) / 3.0).min((1.0 - 3.0 * a) / 5.0),
        }
    }

    /// Validates `eps` always and the exponent ranges unless `allow_outside`.
    pub fn validate(&self, allow_outside: bool) -> Result<ConstraintReport> {
        if !(self.eps > 0.0 && self.eps <= 1.0) {
            return Err(Error::InvalidParameter(format!("eps must lie in (0, 1], got {}", self.eps)));
        }
        let report = self.constraints();
        if !report.global && !allow_outside {
            return Err(Error::InvalidParameter(format!(
                "(alpha, beta, gamma) = ({}, {}, {}) outside the admissible range (gamma0 = {})",
                self.alpha,
                self.beta,
                self.gamma,
                self.gamma0()
            )));
        }
        Ok(report)
    }
}

/// `(1 - e^{-h mu}) / mu`, equal to `h` at `mu = 0`.
#[inline]
pub fn phi1(h: f64, mu: f64) -> f64 {
    if mu == 0.0 {
        h
    } else {
        -(-h * mu).exp_m1() / mu
    }
}

/// `e^{t Delta_eps} f`
pub fn heat_apply(f: &SpectralField3, t: f64, eps: f64) -> Result<SpectralField3> {
    if !(t >= 0.0) {
        return Err(Error::InvalidParameter(format!("heat time must be nonnegative, got {t}")));
    }
    if t == 0.0 {
        return Ok(f.clone());
    }
    let grid = f.grid().clone();
    Ok(f.map_real(move |i| (-t * minus_laplacian_eps_symbol(&grid, i, eps)).exp()))
}

fn check_series(samples: &[(f64, SpectralField3)], t: f64) -> Result<()> {
    let (t0, first) = samples.first().ok_or(Error::EmptySeries)?;
    if *t0 != 0.0 {
        return Err(Error::InvalidParameter(format!("forcing must start at t = 0, got {t0}")));
    }
    for w in samples.windows(2) {
        if !(w[1].0 > w[0].0) {
            return Err(Error::InvalidParameter("forcing sample times must increase".into()));
        }
        first.ensure_same_grid(&w[1].1)?;
        first.ensure_components(w[1].1.components())?;
    }
    if t < samples.last().map_or(0.0, |s| s.0) {
        return Err(Error::InvalidParameter("final time precedes the last forcing sample".into()));
    }
    Ok(())
}

/// `E_eps f(t) = int_0^t e^{(t-t') Delta_eps} f(t') dt'` for forcing held
/// constant from each sample time `t_i` to the next (the last up to `t`),
/// integrated exactly mode by mode.
pub fn duhamel(samples: &[(f64, SpectralField3)], t: f64, eps: f64) -> Result<SpectralField3> {
    check_series(samples, t)?;
    let grid = samples[0].1.grid().clone();
    let mut out = SpectralField3::zeros(&grid, samples[0].1.components());
    for (i, (ti, fi)) in samples.iter().enumerate() {
        let end = samples.get(i + 1).map_or(t, |s| s.0);
        let h = end - ti;
        let lag = t - end;
        let g = grid.clone();
        let piece = fi.map_real(move |m| {
            let mu = minus_laplacian_eps_symbol(&g, m, eps);
            (-lag * mu).exp() * phi1(h, mu)
        });
        out += &piece;
    }
    Ok(out)
}

/// Gauss-Legendre nodes and weights on `[0, 1]`.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
            let dx = p1 / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        out.push((0.5 * (1.0 - x), 0.5 * w));
    }
    out.sort_by(|a, b| a.0.total_cmp(&b.0));
    out
}

const GL_ORDER: usize = 8;

/// Quadrature points on `[0, h]` refined geometrically from the left end on
/// the scale `1 / mu_max`; returns `(time, weight)` pairs.
fn layered_nodes(h: f64, mu_max: f64) -> Vec<(f64, f64)> {
    let gl = gauss_legendre(GL_ORDER);
    let mut cuts = vec![0.0];
    let mut w = if mu_max > 0.0 { (0.25 / mu_max).min(h) } else { h };
    while cuts.last().copied().unwrap_or(0.0) < h {
        let next = (cuts.last().copied().unwrap_or(0.0) + w).min(h);
        cuts.push(next);
        w *= 2.0;
    }
    let mut out = Vec::new();
    for c in cuts.windows(2) {
        let len = c[1] - c[0];
        out.extend(gl.iter().map(|(x, wt)| (c[0] + x * len, wt * len)));
    }
    out
}

/// Per-block `L^r` in time of `||Delta_k^h Delta_l^v u(t)||`, given the block
/// energy as a function evaluated on quadrature nodes.
fn time_norm(values: &[(f64, f64)], r: LpTime) -> f64 {
    match r {
        LpTime::L1 => values.iter().map(|(e, w)| w * e.sqrt()).sum(),
        LpTime::L2 => values.iter().map(|(e, w)| w * e).sum::<f64>().sqrt(),
        LpTime::LInf => values.iter().map(|(e, _)| e.sqrt()).fold(0.0, f64::max),
    }
}

fn inverse_exponent(r: LpTime) -> f64 {
    match r {
        LpTime::L1 => 1.0,
        LpTime::L2 => 0.5,
        LpTime::LInf => 0.0,
    }
}

/// `(k, l, w^2 |c|^2 e^{2 delta |xi|}, mu)` for every block a mode of
/// component `c` falls in.
fn mode_list(f: &SpectralField3, c: usize, delta: f64, eps: f64) -> Vec<(i32, i32, f64, f64)> {
    let grid = f.grid();
    let n3 = grid.n()[2];
    let data = f.component(c);
    let mut out = Vec::new();
    for (i, z) in data.iter().enumerate() {
        let a = z.norm_sqr();
        if a == 0.0 {
            continue;
        }
        let hh = grid.h_hits(i / n3);
        let vh = grid.v_hits(i % n3);
        if hh.is_empty() || vh.is_empty() {
            continue;
        }
        let amp = a * (2.0 * delta * grid.iso_abs(i)).exp();
        let mu = minus_laplacian_eps_symbol(grid, i, eps);
        for (k, wk) in hh.iter() {
            for (l, wl) in vh.iter() {
                out.push((k, l, amp * (wk * wl) * (wk * wl), mu));
            }
        }
    }
    out
}

fn group_blocks(modes: Vec<(i32, i32, f64, f64)>) -> Vec<((i32, i32), Vec<(f64, f64)>)> {
    let mut sorted = modes;
    sorted.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)).then(a.3.total_cmp(&b.3)));
    let mut out: Vec<((i32, i32), Vec<(f64, f64)>)> = Vec::new();
    for (k, l, a, mu) in sorted {
        match out.last_mut() {
            Some((key, v)) if *key == (k, l) => v.push((a, mu)),
            _ => out.push(((k, l), vec![(a, mu)])),
        }
    }
    out
}

/// Which inequality of the free-evolution smoothing estimate to check.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum HeatLine {
    /// whole field against its own data norm
    Full,
    /// vertical component against the horizontal data
    Vertical,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SmoothingSetup {
    pub eps: f64,
    pub index: AnisoBesovIndex,
    /// `beta` in `[0, 2]`, trading horizontal for vertical smoothing.
    pub beta: f64,
    pub delta: f64,
    pub t_end: f64,
}

impl SmoothingSetup {
    fn validate(&self) -> Result<()> {
        if !(0.0..=2.0).contains(&self.beta) {
            return Err(Error::InvalidParameter(format!("beta must lie in [0, 2], got {}", self.beta)));
        }
        if !(self.t_end > 0.0) || !(self.eps > 0.0) || self.delta < 0.0 {
            return Err(Error::InvalidParameter("need t_end > 0, eps > 0, delta >= 0".into()));
        }
        Ok(())
    }
}

/// `eps^{beta/r} ||[e^{t Delta_eps} u0]_Phi||_{L~^r_T(B^{sigma,s})}` divided by
/// the matching data norm, with the static phase `Phi = delta |xi|`.
pub fn smoothing_check_41(v0: &SpectralField3, setup: &SmoothingSetup, r: LpTime, line: HeatLine) -> Result<f64> {
    setup.validate()?;
    v0.ensure_components(3)?;
    let scale = v0.l2_norm();
    if scale == 0.0 {
        return Ok(0.0);
    }
    if div(v0)?.l2_norm() > 1e-8 * scale {
        return Err(Error::Precondition("initial velocity is not divergence free".into()));
    }
    let ir = inverse_exponent(r);
    let (comps, data_comps, shift_sigma, shift_s) = match line {
        HeatLine::Full => (0..3, 0..3, -(2.0 - setup.beta) * ir, -setup.beta * ir),
        HeatLine::Vertical => (2..3, 0..2, 1.0 - (2.0 - setup.beta) * ir, -1.0 - setup.beta * ir),
    };
    let idx = setup.index;
    let lhs: f64 = comps
        .map(|c| {
            let blocks = group_blocks(mode_list(v0, c, setup.delta, setup.eps));
            let vals = par::map_slice(&blocks, |((k, l), modes)| {
                idx.weight(*k, *l) * free_block_norm(modes, setup.t_end, r)
            });
            vals.iter().sum::<f64>()
        })
        .sum();
    let data_idx = AnisoBesovIndex::new(idx.sigma + shift_sigma, idx.s + shift_s);
    let table = crate::norms::block_energies(v0, setup.delta);
    let rhs = table.besov_components(data_comps, data_idx);
    let lhs = setup.eps.powf(setup.beta * ir) * lhs;
    Ok(if rhs == 0.0 { 0.0 } else { lhs / rhs })
}

/// `||sqrt(sum_m A_m e^{-2 t mu_m})||_{L^r(0,T)}`
fn free_block_norm(modes: &[(f64, f64)], t_end: f64, r: LpTime) -> f64 {
    match r {
        LpTime::LInf => modes.iter().map(|(a, _)| a).sum::<f64>().sqrt(),
        LpTime::L2 => modes.iter().map(|(a, mu)| a * phi1(t_end, 2.0 * mu)).sum::<f64>().sqrt(),
        LpTime::L1 => {
            let mu_max = modes.iter().map(|m| m.1).fold(0.0, f64::max);
            layered_nodes(t_end, mu_max)
                .iter()
                .map(|(t, w)| w * modes.iter().map(|(a, mu)| a * (-2.0 * t * mu).exp()).sum::<f64>().sqrt())
                .sum()
        }
    }
}

/// `eps^{beta/r} ||[E_eps f]_Phi||_{L~^{r1}_T(B^{sigma,s})} / ||f_Phi||_{L~^{r2}_T(B^{sigma-(2-beta)/r, s-beta/r})}`
/// with `1/r = 1 + 1/r1 - 1/r2`, the static phase `Phi = delta |xi|` and
/// piecewise-constant forcing.
pub fn smoothing_check_42(
    samples: &[(f64, SpectralField3)],
    setup: &SmoothingSetup,
    r1: LpTime,
    r2: LpTime,
) -> Result<f64> {
    setup.validate()?;
    check_series(samples, setup.t_end)?;
    let (i1, i2) = (inverse_exponent(r1), inverse_exponent(r2));
    if i2 < i1 {
        return Err(Error::InvalidParameter(format!("need r2 <= r1, got r1 = {r1:?}, r2 = {r2:?}")));
    }
    let ir = 1.0 + i1 - i2;
    let comps = samples[0].1.components();
    let idx = setup.index;
    let data_idx = AnisoBesovIndex::new(idx.sigma - (2.0 - setup.beta) * ir, idx.s - setup.beta * ir);

    // right-hand side from the exact block records of the piecewise-constant f_Phi
    let grid = samples[0].1.grid();
    let mut acc = crate::norms::NormAccumulator::new(grid, comps);
    for (i, (ti, fi)) in samples.iter().enumerate() {
        let end = samples.get(i + 1).map_or(setup.t_end, |s| s.0);
        if end > *ti {
            acc.accumulate_table(&crate::norms::block_energies(fi, setup.delta), end - ti)?;
        }
    }
    let rhs = acc.norm(r2, data_idx);
    if rhs == 0.0 {
        return Ok(0.0);
    }

    // left-hand side: per-mode exact solution sampled on layered nodes
    let mut lhs = 0.0;
    for c in 0..comps {
        // per interval, the (k, l, weight, mu) list of each sample
        let per_sample: Vec<Vec<(i32, i32, f64, f64, f64)>> =
            samples.iter().map(|(_, f)| mode_list_complex(f, c, setup.delta, setup.eps)).collect();
        lhs += duhamel_block_norms(&per_sample, samples, setup.t_end, r1, idx);
    }
    Ok(setup.eps.powf(setup.beta * ir) * lhs / rhs)
}

/// Like `mode_list` but keeps the signed real and imaginary parts so that
/// contributions of different intervals add coherently: entries are
/// `(k, l, w * Re(c e^{delta|xi|}), mu, w * Im(...))` keyed by mode order.
fn mode_list_complex(f: &SpectralField3, c: usize, delta: f64, eps: f64) -> Vec<(i32, i32, f64, f64, f64)> {
    let grid = f.grid();
    let n3 = grid.n()[2];
    let data = f.component(c);
    let mut out = Vec::new();
    for (i, z) in data.iter().enumerate() {
        let hh = grid.h_hits(i / n3);
        let vh = grid.v_hits(i % n3);
        if hh.is_empty() || vh.is_empty() {
            continue;
        }
        let zz = *z * (delta * grid.iso_abs(i)).exp();
        let mu = minus_laplacian_eps_symbol(grid, i, eps);
        for (k, wk) in hh.iter() {
            for (l, wl) in vh.iter() {
                let w = wk * wl;
                out.push((k, l, w * zz.re, mu, w * zz.im));
            }
        }
    }
    out
}

fn duhamel_block_norms(
    per_sample: &[Vec<(i32, i32, f64, f64, f64)>],
    samples: &[(f64, SpectralField3)],
    t_end: f64,
    r1: LpTime,
    idx: AnisoBesovIndex,
) -> f64 {
    let m = per_sample[0].len();
    // block boundaries in the shared mode order
    let mut blocks: Vec<((i32, i32), Vec<usize>)> = Vec::new();
    {
        let mut order: Vec<usize> = (0..m).collect();
        order.sort_by_key(|&j| (per_sample[0][j].0, per_sample[0][j].1));
        for j in order {
            let key = (per_sample[0][j].0, per_sample[0][j].1);
            match blocks.last_mut() {
                Some((k, v)) if *k == key => v.push(j),
                _ => blocks.push((key, vec![j])),
            }
        }
    }
    let vals = par::map_slice(&blocks, |((k, l), members)| {
        let mu_max = members.iter().map(|&j| per_sample[0][j].3).fold(0.0, f64::max);
        let mut state: Vec<(f64, f64)> = vec![(0.0, 0.0); members.len()];
        let mut values: Vec<(f64, f64)> = Vec::new();
        for (i, (ti, _)) in samples.iter().enumerate() {
            let end = samples.get(i + 1).map_or(t_end, |s| s.0);
            let h = end - ti;
            if h <= 0.0 {
                continue;
            }
            let forcing: Vec<(f64, f64)> = members.iter().map(|&j| (per_sample[i][j].2, per_sample[i][j].4)).collect();
            let mut nodes = layered_nodes(h, mu_max);
            if r1 == LpTime::LInf {
                nodes.push((h, 0.0));
            }
            for (tau, w) in nodes {
                let e: f64 = members
                    .iter()
                    .zip(&state)
                    .zip(&forcing)
                    .map(|((&j, s), f)| {
                        let mu = per_sample[0][j].3;
                        let decay = (-tau * mu).exp();
                        let p = phi1(tau, mu);
                        let re = decay * s.0 + p * f.0;
                        let im = decay * s.1 + p * f.1;
                        re * re + im * im
                    })
                    .sum();
                values.push((e, w));
            }
            for ((&j, s), f) in members.iter().zip(state.iter_mut()).zip(&forcing) {
                let mu = per_sample[0][j].3;
                let decay = (-h * mu).exp();
                let p = phi1(h, mu);
                *s = (decay * s.0 + p * f.0, decay * s.1 + p * f.1);
            }
        }
        idx.weight(*k, *l) * time_norm(&values, r1)
    });
    vals.iter().sum()
}

/// `lambda 2^l int_0^t e^{-c lambda 2^l int_{t'}^t thetadot} thetadot(t') dt'`
/// for `thetadot` held at `rates[i]` over an interval of length `dts[i]`.
pub fn damping_bound_check(lambda: f64, c: f64, dts: &[f64], rates: &[f64], l: i32) -> Result<f64> {
    if dts.len() != rates.len() {
        return Err(Error::InvalidParameter("interval and rate counts differ".into()));
    }
    if let Some(bad) = rates.iter().find(|r| **r < 0.0) {
        return Err(Error::InvalidParameter(format!("negative thetadot sample {bad}")));
    }
    if !(lambda > 0.0 && c > 0.0) {
        return Err(Error::InvalidParameter("lambda and c must be positive".into()));
    }
    let scale = lambda * (l as f64).exp2();
    let kappa = c * scale;
    // walk backwards accumulating int_{t_{i+1}}^t thetadot
    let mut after = 0.0;
    let mut total = 0.0;
    for (dt, rate) in dts.iter().zip(rates).rev() {
        let x = rate * dt;
        total += (-kappa * after).exp() * -(-kappa * x).exp_m1() / kappa;
        after += x;
    }
    Ok(scale * total)
}
