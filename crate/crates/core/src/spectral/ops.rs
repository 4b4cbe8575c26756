//! Dyadic projectors and exact diagonal differential operators.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::cutoff::CutoffPair;
use super::field::{PhysicalField, SpectralField3};
use super::grid::{BandRange, Grid};
use crate::error::{Error, Result};

/// Frequency variable a dyadic operator acts on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    /// `|xi|`
    Iso,
    /// `|xi_h| = sqrt(xi1^2 + xi2^2)`
    Horizontal,
    /// `|xi3|`
    Vertical,
}

impl Direction {
    pub const ALL: [Direction; 3] = [Direction::Iso, Direction::Horizontal, Direction::Vertical];

    /// The radial variable of mode `index` in this direction.
    #[inline]
    pub fn radius(self, grid: &Grid, index: usize) -> f64 {
        match self {
            Direction::Iso => grid.iso_abs(index),
            Direction::Horizontal => grid.h_abs(index / grid.n()[2]),
            Direction::Vertical => grid.xi(2, index % grid.n()[2]).abs(),
        }
    }

    #[inline]
    pub fn band_weight(self, grid: &Grid, index: usize, j: i32) -> f64 {
        match self {
            Direction::Iso => grid.iso_hits(index).weight(j),
            Direction::Horizontal => grid.h_hits(index / grid.n()[2]).weight(j),
            Direction::Vertical => grid.v_hits(index % grid.n()[2]).weight(j),
        }
    }

    pub fn range(self, grid: &Grid) -> BandRange {
        match self {
            Direction::Iso => grid.iso_range(),
            Direction::Horizontal => grid.h_range(),
            Direction::Vertical => grid.v_range(),
        }
    }
}

/// A diagonal dyadic operator in one direction.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Projector {
    /// `Delta_j`, multiplier `phi(2^-j r)`
    Block(i32),
    /// `S_j`, multiplier `chi(2^-j r)`
    Low(i32),
    /// `Delta_{j-1} + Delta_j + Delta_{j+1}`
    Tilde(i32),
    /// Zero-frequency part in the direction (`r = 0`).
    Mean,
}

impl Projector {
    #[inline]
    pub fn factor(self, grid: &Grid, dir: Direction, index: usize) -> f64 {
        match self {
            Projector::Block(j) => dir.band_weight(grid, index, j),
            Projector::Low(j) => CutoffPair::standard().chi(dir.radius(grid, index) * (-j as f64).exp2()),
            Projector::Tilde(j) => (j - 1..=j + 1).map(|b| dir.band_weight(grid, index, b)).sum(),
            Projector::Mean => {
                if dir.radius(grid, index) == 0.0 {
                    1.0
                } else {
                    0.0
                }
            }
        }
    }

    pub fn apply(self, f: &SpectralField3, dir: Direction) -> SpectralField3 {
        let grid = f.grid().clone();
        f.map_real(move |i| self.factor(&grid, dir, i))
    }
}

pub fn block(f: &SpectralField3, dir: Direction, j: i32) -> SpectralField3 {
    Projector::Block(j).apply(f, dir)
}

pub fn lowpass(f: &SpectralField3, dir: Direction, j: i32) -> SpectralField3 {
    Projector::Low(j).apply(f, dir)
}

/// The zero-frequency part of `f` in `dir` (for `Horizontal`: the `x_h`-mean).
pub fn mean_part(f: &SpectralField3, dir: Direction) -> SpectralField3 {
    Projector::Mean.apply(f, dir)
}

/// `Delta_k^h f`
pub fn h_block(f: &SpectralField3, k: i32) -> SpectralField3 {
    block(f, Direction::Horizontal, k)
}

/// `Delta_l^v f`
pub fn v_block(f: &SpectralField3, l: i32) -> SpectralField3 {
    block(f, Direction::Vertical, l)
}

/// `Delta_j f`
pub fn iso_block(f: &SpectralField3, j: i32) -> SpectralField3 {
    block(f, Direction::Iso, j)
}

/// `S_k^h f`
pub fn h_lowpass(f: &SpectralField3, k: i32) -> SpectralField3 {
    lowpass(f, Direction::Horizontal, k)
}

/// `S_l^v f`
pub fn v_lowpass(f: &SpectralField3, l: i32) -> SpectralField3 {
    lowpass(f, Direction::Vertical, l)
}

/// `S_j f`
pub fn iso_lowpass(f: &SpectralField3, j: i32) -> SpectralField3 {
    lowpass(f, Direction::Iso, j)
}

/// `Delta_k^h Delta_l^v f`
pub fn hv_block(f: &SpectralField3, k: i32, l: i32) -> SpectralField3 {
    let grid = f.grid().clone();
    let n3 = grid.n()[2];
    f.map_real(move |i| grid.h_hits(i / n3).weight(k) * grid.v_hits(i % n3).weight(l))
}

fn i_times(x: f64) -> Complex64 {
    Complex64::new(0.0, x)
}

/// Derivative along `axis` of every component.
pub fn partial(f: &SpectralField3, axis: usize) -> SpectralField3 {
    let grid = f.grid().clone();
    let n = grid.n();
    f.map_modes(move |i| {
        let ii = match axis {
            0 => i / (n[1] * n[2]),
            1 => (i / n[2]) % n[1],
            _ => i % n[2],
        };
        i_times(grid.deriv_xi(axis, ii))
    })
}

/// `partial_3 f`
pub fn d3(f: &SpectralField3) -> SpectralField3 {
    partial(f, 2)
}

/// `(partial_1 f, partial_2 f)` for a scalar `f`.
pub fn grad_h(f: &SpectralField3) -> Result<SpectralField3> {
    f.ensure_components(1)?;
    SpectralField3::stack(&[&partial(f, 0), &partial(f, 1)])
}

/// `(partial_1, partial_2, partial_3) f` for a scalar `f`.
pub fn grad(f: &SpectralField3) -> Result<SpectralField3> {
    nabla_weighted(f, 1.0)
}

/// `nabla_eps f = (nabla_h f, eps partial_3 f)`
pub fn nabla_eps(f: &SpectralField3, eps: f64) -> Result<SpectralField3> {
    nabla_weighted(f, eps)
}

/// `nabla^eps f = (nabla_h f, eps^2 partial_3 f)`
pub fn nabla_sup_eps(f: &SpectralField3, eps: f64) -> Result<SpectralField3> {
    nabla_weighted(f, eps * eps)
}

fn nabla_weighted(f: &SpectralField3, w3: f64) -> Result<SpectralField3> {
    f.ensure_components(1)?;
    SpectralField3::stack(&[&partial(f, 0), &partial(f, 1), &partial(f, 2).scaled(w3)])
}

/// `partial_1 v^1 + partial_2 v^2` using the first two components.
pub fn div_h(v: &SpectralField3) -> Result<SpectralField3> {
    if v.components() < 2 {
        return Err(Error::ComponentMismatch {
            expected: 2,
            found: v.components(),
        });
    }
    Ok(&partial(&v.extract(0), 0) + &partial(&v.extract(1), 1))
}

pub fn div(v: &SpectralField3) -> Result<SpectralField3> {
    v.ensure_components(3)?;
    let mut out = div_h(v)?;
    out += &partial(&v.extract(2), 2);
    Ok(out)
}

/// Symbol of `-Delta_eps` at mode `index`: `|xi_h|^2 + eps^2 xi3^2`, built
/// from the derivative wavenumbers so that it equals `-div nabla^eps`.
#[inline]
pub fn minus_laplacian_eps_symbol(grid: &Grid, index: usize, eps: f64) -> f64 {
    let [i1, i2, i3] = grid.unravel(index);
    let a = grid.deriv_xi(0, i1);
    let b = grid.deriv_xi(1, i2);
    let c = grid.deriv_xi(2, i3);
    a * a + b * b + eps * eps * c * c
}

/// `Delta_eps f = (Delta_h + eps^2 partial_3^2) f`, componentwise.
pub fn laplacian_eps(f: &SpectralField3, eps: f64) -> SpectralField3 {
    let grid = f.grid().clone();
    f.map_real(move |i| -minus_laplacian_eps_symbol(&grid, i, eps))
}

/// `Delta_h f`, componentwise.
pub fn laplacian_h(f: &SpectralField3) -> SpectralField3 {
    laplacian_eps(f, 0.0)
}

/// `(-Delta_eps)^{-1} f` with the zero-symbol modes mapped to zero.
pub fn inverse_minus_laplacian_eps(f: &SpectralField3, eps: f64) -> SpectralField3 {
    let grid = f.grid().clone();
    f.map_real(move |i| {
        let s = minus_laplacian_eps_symbol(&grid, i, eps);
        if s > 0.0 {
            1.0 / s
        } else {
            0.0
        }
    })
}

/// Orthogonal projection onto divergence-free fields.
pub fn leray_project(v: &SpectralField3) -> Result<SpectralField3> {
    v.ensure_components(3)?;
    let grid = v.grid().clone();
    let n = grid.len();
    let mut out = v.clone();
    let coeffs = out.coeffs_mut();
    for idx in 1..n {
        let [i1, i2, i3] = grid.unravel(idx);
        let k = [grid.deriv_xi(0, i1), grid.deriv_xi(1, i2), grid.deriv_xi(2, i3)];
        let k2 = k[0] * k[0] + k[1] * k[1] + k[2] * k[2];
        if k2 == 0.0 {
            continue;
        }
        let dot = coeffs[idx] * k[0] + coeffs[n + idx] * k[1] + coeffs[2 * n + idx] * k[2];
        for (c, kc) in k.iter().enumerate() {
            coeffs[c * n + idx] -= dot * (kc / k2);
        }
    }
    Ok(out)
}

/// 2/3-rule truncation: removes every mode with `3 |m_axis| >= n_axis` on
/// some axis (integer wavenumbers `m`).
pub fn dealias(f: &SpectralField3) -> SpectralField3 {
    let mut out = f.clone();
    dealias_in_place(&mut out);
    out
}

pub fn dealias_in_place(f: &mut SpectralField3) {
    let grid = f.grid().clone();
    f.map_real_in_place(move |i| {
        let [i1, i2, i3] = grid.unravel(i);
        if grid.dealias_keeps(0, i1) && grid.dealias_keeps(1, i2) && grid.dealias_keeps(2, i3) {
            1.0
        } else {
            0.0
        }
    });
}

impl SpectralField3 {
    pub fn map_real_in_place<F>(&mut self, factor: F)
    where
        F: Fn(usize) -> f64 + Sync + Send,
    {
        self.map_modes_in_place(|i| Complex64::new(factor(i), 0.0));
    }
}

/// Dealiased product of two scalar fields.
pub fn product(a: &SpectralField3, b: &SpectralField3) -> Result<SpectralField3> {
    a.ensure_same_grid(b)?;
    a.ensure_components(1)?;
    b.ensure_components(1)?;
    let pa = a.to_physical();
    let pb = b.to_physical();
    Ok(physical_product(&pa, &pb))
}

/// Dealiased spectral representation of the pointwise product of two scalar
/// physical fields.
pub fn physical_product(a: &PhysicalField, b: &PhysicalField) -> SpectralField3 {
    let values: Vec<f64> = a
        .component(0)
        .iter()
        .zip(b.component(0))
        .map(|(x, y)| x * y)
        .collect();
    let p = PhysicalField::from_values(a.grid(), 1, values).expect("matching grids");
    let mut out = p.to_spectral();
    dealias_in_place(&mut out);
    out
}

/// `(v . nabla) f`, dealiased; `f` may be scalar or vector (componentwise).
pub fn advect(v: &SpectralField3, f: &SpectralField3) -> Result<SpectralField3> {
    v.ensure_components(3)?;
    v.ensure_same_grid(f)?;
    let grid = f.grid();
    let n = grid.len();
    let pv = v.to_physical();
    let mut out = PhysicalField::zeros(grid, f.components());
    for c in 0..f.components() {
        let fc = f.extract(c);
        let grads = grad(&fc)?.to_physical();
        let dst = out.component_mut(c);
        for axis in 0..3 {
            let g = grads.component(axis);
            let va = pv.component(axis);
            for i in 0..n {
                dst[i] += va[i] * g[i];
            }
        }
    }
    let mut spec = out.to_spectral();
    dealias_in_place(&mut spec);
    Ok(spec)
}
