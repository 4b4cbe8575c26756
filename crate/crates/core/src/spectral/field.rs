use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};

use num_complex::Complex64;

use super::fft::fft3;
use super::grid::Grid;
use crate::error::{Error, Result};
use crate::par;

const ZERO: Complex64 = Complex64 { re: 0.0, im: 0.0 };

/// Fourier coefficients of a real scalar or vector field on a periodic grid.
///
/// Coefficients are normalized so that `f(x) = sum_xi c(xi) e^{i xi . x}`;
/// with this convention the L2 norm under the normalized torus measure is
/// `sqrt(sum |c|^2)`, e.g. `cos(x1)` has norm `1/sqrt(2)`.
#[derive(Clone, Debug, PartialEq)]
pub struct SpectralField3 {
    grid: Grid,
    components: usize,
    coeffs: Vec<Complex64>,
}

/// Real point values of a field, one block of `grid.len()` values per component.
#[derive(Clone, Debug, PartialEq)]
pub struct PhysicalField {
    grid: Grid,
    components: usize,
    values: Vec<f64>,
}

impl SpectralField3 {
    pub fn zeros(grid: &Grid, components: usize) -> Self {
        assert!(components >= 1);
        SpectralField3 {
            grid: grid.clone(),
            components,
            coeffs: vec![ZERO; components * grid.len()],
        }
    }

    pub fn scalar_zeros(grid: &Grid) -> Self {
        Self::zeros(grid, 1)
    }

    pub fn vector_zeros(grid: &Grid) -> Self {
        Self::zeros(grid, 3)
    }

    pub fn from_coeffs(grid: &Grid, components: usize, coeffs: Vec<Complex64>) -> Result<Self> {
        if components == 0 || coeffs.len() != components * grid.len() {
            return Err(Error::InvalidParameter(format!(
                "{} coefficients do not fit {} component(s) of a {:?} grid",
                coeffs.len(),
                components,
                grid.n()
            )));
        }
        Ok(SpectralField3 {
            grid: grid.clone(),
            components,
            coeffs,
        })
    }

    /// Stacks scalar (or multi-component) fields into one field.
    pub fn stack(parts: &[&SpectralField3]) -> Result<Self> {
        let first = parts
            .first()
            .ok_or_else(|| Error::InvalidParameter("nothing to stack".into()))?;
        let mut coeffs = Vec::new();
        let mut components = 0;
        for p in parts {
            p.ensure_same_grid(first)?;
            coeffs.extend_from_slice(&p.coeffs);
            components += p.components;
        }
        Ok(SpectralField3 {
            grid: first.grid.clone(),
            components,
            coeffs,
        })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn components(&self) -> usize {
        self.components
    }

    pub fn is_scalar(&self) -> bool {
        self.components == 1
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn coeffs_mut(&mut self) -> &mut [Complex64] {
        &mut self.coeffs
    }

    pub fn component(&self, c: usize) -> &[Complex64] {
        let n = self.grid.len();
        &self.coeffs[c * n..(c + 1) * n]
    }

    pub fn component_mut(&mut self, c: usize) -> &mut [Complex64] {
        let n = self.grid.len();
        &mut self.coeffs[c * n..(c + 1) * n]
    }

    /// Copy of component `c` as a scalar field.
    pub fn extract(&self, c: usize) -> SpectralField3 {
        SpectralField3 {
            grid: self.grid.clone(),
            components: 1,
            coeffs: self.component(c).to_vec(),
        }
    }

    /// Copy of components `range` as a field.
    pub fn extract_range(&self, range: std::ops::Range<usize>) -> SpectralField3 {
        let n = self.grid.len();
        SpectralField3 {
            grid: self.grid.clone(),
            components: range.len(),
            coeffs: self.coeffs[range.start * n..range.end * n].to_vec(),
        }
    }

    pub fn ensure_same_grid(&self, other: &SpectralField3) -> Result<()> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        Ok(())
    }

    pub fn ensure_components(&self, expected: usize) -> Result<()> {
        if self.components != expected {
            return Err(Error::ComponentMismatch {
                expected,
                found: self.components,
            });
        }
        Ok(())
    }

    /// Coefficient of the zero mode (the mean) of component `c`.
    pub fn mean(&self, c: usize) -> Complex64 {
        self.component(c)[0]
    }

    pub fn l2_norm(&self) -> f64 {
        self.coeffs.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn l2_norm_component(&self, c: usize) -> f64 {
        self.component(c)
            .iter()
            .map(|z| z.norm_sqr())
            .sum::<f64>()
            .sqrt()
    }

    /// Real part of the L2 inner product under the normalized measure.
    pub fn inner(&self, other: &SpectralField3) -> f64 {
        self.coeffs
            .iter()
            .zip(&other.coeffs)
            .map(|(a, b)| (a * b.conj()).re)
            .sum()
    }

    pub fn max_abs_coeff(&self) -> f64 {
        self.coeffs.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Largest `|c(-xi) - conj(c(xi))|` over all modes and components.
    pub fn conjugate_symmetry_error(&self) -> f64 {
        let n = self.grid.len();
        let mut worst: f64 = 0.0;
        for c in 0..self.components {
            let comp = &self.coeffs[c * n..(c + 1) * n];
            for idx in 0..n {
                let neg = self.grid.negated(idx);
                worst = worst.max((comp[neg] - comp[idx].conj()).norm());
            }
        }
        worst
    }

    pub fn scaled(&self, s: f64) -> SpectralField3 {
        let mut out = self.clone();
        out.scale_in_place(s);
        out
    }

    pub fn scale_in_place(&mut self, s: f64) {
        self.coeffs.iter_mut().for_each(|z| *z *= s);
    }

    /// `self += s * other`.
    pub fn axpy(&mut self, s: f64, other: &SpectralField3) {
        assert_eq!(self.coeffs.len(), other.coeffs.len());
        for (a, b) in self.coeffs.iter_mut().zip(&other.coeffs) {
            *a += b * s;
        }
    }

    /// Multiplies every coefficient by a mode-dependent factor (shared by all
    /// components). `factor` receives the flat mode index.
    pub fn map_modes<F>(&self, factor: F) -> SpectralField3
    where
        F: Fn(usize) -> Complex64 + Sync + Send,
    {
        let mut out = self.clone();
        out.map_modes_in_place(factor);
        out
    }

    pub fn map_modes_in_place<F>(&mut self, factor: F)
    where
        F: Fn(usize) -> Complex64 + Sync + Send,
    {
        let n = self.grid.len();
        let n3 = self.grid.n()[2];
        par::for_each_chunk_mut(&mut self.coeffs, n3, |line, chunk| {
            let base = (line * n3) % n;
            for (i, z) in chunk.iter_mut().enumerate() {
                *z *= factor(base + i);
            }
        });
    }

    /// Real-valued multiplier variant of [`map_modes`](Self::map_modes).
    pub fn map_real<F>(&self, factor: F) -> SpectralField3
    where
        F: Fn(usize) -> f64 + Sync + Send,
    {
        self.map_modes(|i| Complex64::new(factor(i), 0.0))
    }

    /// Inverse transform to point values. Components are transformed two at a
    /// time by packing them into the real and imaginary parts.
    pub fn to_physical(&self) -> PhysicalField {
        let n = self.grid.len();
        let mut values = vec![0.0; self.components * n];
        let mut c = 0;
        while c < self.components {
            let mut buf: Vec<Complex64> = if c + 1 < self.components {
                let (a, b) = (self.component(c), self.component(c + 1));
                a.iter()
                    .zip(b)
                    .map(|(x, y)| x + Complex64::i() * y)
                    .collect()
            } else {
                self.component(c).to_vec()
            };
            fft3(&self.grid, &mut buf, true);
            for (v, z) in values[c * n..(c + 1) * n].iter_mut().zip(&buf) {
                *v = z.re;
            }
            if c + 1 < self.components {
                for (v, z) in values[(c + 1) * n..(c + 2) * n].iter_mut().zip(&buf) {
                    *v = z.im;
                }
            }
            c += 2;
        }
        PhysicalField {
            grid: self.grid.clone(),
            components: self.components,
            values,
        }
    }
}

impl PhysicalField {
    pub fn zeros(grid: &Grid, components: usize) -> Self {
        PhysicalField {
            grid: grid.clone(),
            components,
            values: vec![0.0; components * grid.len()],
        }
    }

    pub fn from_values(grid: &Grid, components: usize, values: Vec<f64>) -> Result<Self> {
        if components == 0 || values.len() != components * grid.len() {
            return Err(Error::InvalidParameter(format!(
                "{} values do not fit {} component(s) on {:?}",
                values.len(),
                components,
                grid.n()
            )));
        }
        Ok(PhysicalField {
            grid: grid.clone(),
            components,
            values,
        })
    }

    /// Samples `f(x, component)` at the grid points.
    pub fn from_fn<F>(grid: &Grid, components: usize, f: F) -> Self
    where
        F: Fn([f64; 3], usize) -> f64 + Sync + Send,
    {
        let n = grid.len();
        let mut values = vec![0.0; components * n];
        par::for_each_chunk_mut(&mut values, n, |c, chunk| {
            for (idx, v) in chunk.iter_mut().enumerate() {
                let [i1, i2, i3] = grid.unravel(idx);
                let x = [
                    grid.coordinate(0, i1),
                    grid.coordinate(1, i2),
                    grid.coordinate(2, i3),
                ];
                *v = f(x, c);
            }
        });
        PhysicalField {
            grid: grid.clone(),
            components,
            values,
        }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn components(&self) -> usize {
        self.components
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn component(&self, c: usize) -> &[f64] {
        let n = self.grid.len();
        &self.values[c * n..(c + 1) * n]
    }

    pub fn component_mut(&mut self, c: usize) -> &mut [f64] {
        let n = self.grid.len();
        &mut self.values[c * n..(c + 1) * n]
    }

    pub fn min(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().map(|v| v.abs()).fold(0.0, f64::max)
    }

    /// Forward transform. The result is exactly conjugate symmetric; no
    /// dealiasing is applied.
    pub fn to_spectral(&self) -> SpectralField3 {
        let n = self.grid.len();
        let scale = 1.0 / n as f64;
        let mut coeffs = vec![ZERO; self.components * n];
        let mut c = 0;
        while c < self.components {
            let paired = c + 1 < self.components;
            let mut buf: Vec<Complex64> = if paired {
                self.component(c)
                    .iter()
                    .zip(self.component(c + 1))
                    .map(|(&a, &b)| Complex64::new(a, b))
                    .collect()
            } else {
                self.component(c)
                    .iter()
                    .map(|&a| Complex64::new(a, 0.0))
                    .collect()
            };
            fft3(&self.grid, &mut buf, false);
            for idx in 0..n {
                let z = buf[idx] * scale;
                let zn = buf[self.grid.negated(idx)].conj() * scale;
                coeffs[c * n + idx] = 0.5 * (z + zn);
                if paired {
                    coeffs[(c + 1) * n + idx] = (z - zn) * Complex64::new(0.0, -0.5);
                }
            }
            c += 2;
        }
        SpectralField3 {
            grid: self.grid.clone(),
            components: self.components,
            coeffs,
        }
    }
}

impl Add<&SpectralField3> for &SpectralField3 {
    type Output = SpectralField3;
    fn add(self, rhs: &SpectralField3) -> SpectralField3 {
        let mut out = self.clone();
        out += rhs;
        out
    }
}

impl Sub<&SpectralField3> for &SpectralField3 {
    type Output = SpectralField3;
    fn sub(self, rhs: &SpectralField3) -> SpectralField3 {
        let mut out = self.clone();
        out -= rhs;
        out
    }
}

impl AddAssign<&SpectralField3> for SpectralField3 {
    fn add_assign(&mut self, rhs: &SpectralField3) {
        assert!(self.grid == rhs.grid && self.components == rhs.components);
        for (a, b) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            *a += b;
        }
    }
}

impl SubAssign<&SpectralField3> for SpectralField3 {
    fn sub_assign(&mut self, rhs: &SpectralField3) {
        assert!(self.grid == rhs.grid && self.components == rhs.components);
        for (a, b) in self.coeffs.iter_mut().zip(&rhs.coeffs) {
            *a -= b;
        }
    }
}

impl Mul<f64> for &SpectralField3 {
    type Output = SpectralField3;
    fn mul(self, s: f64) -> SpectralField3 {
        self.scaled(s)
    }
}

impl Neg for &SpectralField3 {
    type Output = SpectralField3;
    fn neg(self) -> SpectralField3 {
        self.scaled(-1.0)
    }
}
