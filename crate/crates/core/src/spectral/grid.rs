use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use rustfft::{Fft, FftPlanner};

use super::cutoff::{BandHits, CutoffPair};
use crate::error::{Error, Result};

/// Inclusive range of dyadic indices that carry at least one grid mode.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct BandRange {
    pub min: i32,
    pub max: i32,
}

impl BandRange {
    pub fn len(&self) -> usize {
        (self.max - self.min + 1).max(0) as usize
    }

    pub fn is_empty(&self) -> bool {
        self.max < self.min
    }

    pub fn iter(&self) -> impl Iterator<Item = i32> {
        self.min..=self.max
    }

    pub fn contains(&self, j: i32) -> bool {
        j >= self.min && j <= self.max
    }

    fn from_hits<'a>(hits: impl Iterator<Item = &'a BandHits>) -> BandRange {
        let mut range = BandRange {
            min: i32::MAX,
            max: i32::MIN,
        };
        for h in hits {
            for (j, _) in h.iter() {
                range.min = range.min.min(j);
                range.max = range.max.max(j);
            }
        }
        range
    }
}

struct Tables {
    xi: [Vec<f64>; 3],
    deriv: [Vec<f64>; 3],
    int_xi: [Vec<i64>; 3],
    h_abs: Vec<f64>,
    iso_abs: Vec<f64>,
    h_hits: Vec<BandHits>,
    v_hits: Vec<BandHits>,
    iso_hits: Vec<BandHits>,
    h_range: BandRange,
    v_range: BandRange,
    iso_range: BandRange,
    fft_forward: [Arc<dyn Fft<f64>>; 3],
    fft_inverse: [Arc<dyn Fft<f64>>; 3],
}

/// Uniform periodic grid on the box `[0, L1) x [0, L2) x [0, L3)`.
///
/// Storage order is row-major over `(i1, i2, i3)` in FFT index order: index
/// `i` on an axis of `n` points carries the integer wavenumber `i` for
/// `i < n/2` and `i - n` otherwise, scaled by `2 pi / L`.
#[derive(Clone)]
pub struct Grid {
    n: [usize; 3],
    lengths: [f64; 3],
    tables: Arc<Tables>,
}

impl fmt::Debug for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Grid")
            .field("n", &self.n)
            .field("lengths", &self.lengths)
            .finish()
    }
}

impl PartialEq for Grid {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.tables, &other.tables)
            || (self.n == other.n && self.lengths == other.lengths)
    }
}

fn signed_index(i: usize, n: usize) -> i64 {
    if i < n / 2 {
        i as i64
    } else {
        i as i64 - n as i64
    }
}

impl Grid {
    /// Cubic `n^3` grid on `[0, 2 pi)^3`.
    pub fn cubic(n: usize) -> Result<Grid> {
        Grid::new([n, n, n])
    }

    pub fn new(n: [usize; 3]) -> Result<Grid> {
        Grid::with_lengths(n, [2.0 * PI; 3])
    }

    pub fn with_lengths(n: [usize; 3], lengths: [f64; 3]) -> Result<Grid> {
        for (axis, &m) in n.iter().enumerate() {
            if m < 8 || m % 2 != 0 {
                return Err(Error::InvalidGrid(format!(
                    "axis {} has {} points; need an even count >= 8",
                    axis + 1,
                    m
                )));
            }
        }
        if lengths.iter().any(|&l| !(l.is_finite() && l > 0.0)) {
            return Err(Error::InvalidGrid(format!(
                "box lengths must be positive, got {lengths:?}"
            )));
        }
        Ok(Grid {
            n,
            lengths,
            tables: Arc::new(Tables::build(n, lengths)),
        })
    }

    pub fn n(&self) -> [usize; 3] {
        self.n
    }

    pub fn lengths(&self) -> [f64; 3] {
        self.lengths
    }

    pub fn is_cubic_2pi(&self) -> bool {
        self.n[0] == self.n[1]
            && self.n[1] == self.n[2]
            && self.lengths.iter().all(|&l| l == 2.0 * PI)
    }

    /// Number of modes per component.
    pub fn len(&self) -> usize {
        self.n[0] * self.n[1] * self.n[2]
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn index(&self, i1: usize, i2: usize, i3: usize) -> usize {
        (i1 * self.n[1] + i2) * self.n[2] + i3
    }

    #[inline]
    pub fn unravel(&self, index: usize) -> [usize; 3] {
        let i3 = index % self.n[2];
        let rest = index / self.n[2];
        [rest / self.n[1], rest % self.n[1], i3]
    }

    /// Index of the mode `-xi`.
    #[inline]
    pub fn negated(&self, index: usize) -> usize {
        let [i1, i2, i3] = self.unravel(index);
        let neg = |i: usize, n: usize| (n - i) % n;
        self.index(neg(i1, self.n[0]), neg(i2, self.n[1]), neg(i3, self.n[2]))
    }

    /// Physical wavenumber along `axis` for storage index `i`.
    #[inline]
    pub fn xi(&self, axis: usize, i: usize) -> f64 {
        self.tables.xi[axis][i]
    }

    /// Integer wavenumber (in units of `2 pi / L`).
    #[inline]
    pub fn int_xi(&self, axis: usize, i: usize) -> i64 {
        self.tables.int_xi[axis][i]
    }

    /// Wavenumber used by odd derivatives: zero on the Nyquist plane so that
    /// real fields stay real.
    #[inline]
    pub fn deriv_xi(&self, axis: usize, i: usize) -> f64 {
        self.tables.deriv[axis][i]
    }

    pub fn xi_axis(&self, axis: usize) -> &[f64] {
        &self.tables.xi[axis]
    }

    pub fn deriv_axis(&self, axis: usize) -> &[f64] {
        &self.tables.deriv[axis]
    }

    /// `|xi_h|` for the horizontal index pair `i1 * n2 + i2`.
    #[inline]
    pub fn h_abs(&self, i12: usize) -> f64 {
        self.tables.h_abs[i12]
    }

    #[inline]
    pub fn iso_abs(&self, index: usize) -> f64 {
        self.tables.iso_abs[index]
    }

    pub fn iso_abs_table(&self) -> &[f64] {
        &self.tables.iso_abs
    }

    /// Largest `|xi|` carried by the grid.
    pub fn xi_max(&self) -> f64 {
        self.tables.iso_abs.iter().copied().fold(0.0, f64::max)
    }

    #[inline]
    pub fn h_hits(&self, i12: usize) -> &BandHits {
        &self.tables.h_hits[i12]
    }

    #[inline]
    pub fn v_hits(&self, i3: usize) -> &BandHits {
        &self.tables.v_hits[i3]
    }

    #[inline]
    pub fn iso_hits(&self, index: usize) -> &BandHits {
        &self.tables.iso_hits[index]
    }

    pub fn h_range(&self) -> BandRange {
        self.tables.h_range
    }

    pub fn v_range(&self) -> BandRange {
        self.tables.v_range
    }

    pub fn iso_range(&self) -> BandRange {
        self.tables.iso_range
    }

    /// Integer cutoff of the 2/3 rule: modes with `3 |m| >= n` are removed.
    pub fn dealias_keeps(&self, axis: usize, i: usize) -> bool {
        3 * self.tables.int_xi[axis][i].unsigned_abs() < self.n[axis] as u64
    }

    pub fn is_nyquist(&self, axis: usize, i: usize) -> bool {
        i == self.n[axis] / 2
    }

    pub(crate) fn fft(&self, axis: usize, inverse: bool) -> &Arc<dyn Fft<f64>> {
        if inverse {
            &self.tables.fft_inverse[axis]
        } else {
            &self.tables.fft_forward[axis]
        }
    }

    /// Physical coordinate of grid point `i` along `axis`.
    pub fn coordinate(&self, axis: usize, i: usize) -> f64 {
        self.lengths[axis] * i as f64 / self.n[axis] as f64
    }
}

impl Tables {
    fn build(n: [usize; 3], lengths: [f64; 3]) -> Tables {
        let cut = CutoffPair::standard();
        let per_axis = |axis: usize| -> (Vec<i64>, Vec<f64>, Vec<f64>) {
            let kappa = 2.0 * PI / lengths[axis];
            let ints: Vec<i64> = (0..n[axis]).map(|i| signed_index(i, n[axis])).collect();
            let xi: Vec<f64> = ints.iter().map(|&m| kappa * m as f64).collect();
            let deriv = (0..n[axis])
                .map(|i| if i == n[axis] / 2 { 0.0 } else { xi[i] })
                .collect();
            (ints, xi, deriv)
        };
        let (i0, x0, d0) = per_axis(0);
        let (i1, x1, d1) = per_axis(1);
        let (i2, x2, d2) = per_axis(2);

        let mut h_abs = Vec::with_capacity(n[0] * n[1]);
        for a in &x0 {
            for b in &x1 {
                h_abs.push((a * a + b * b).sqrt());
            }
        }
        let mut iso_abs = Vec::with_capacity(n[0] * n[1] * n[2]);
        for h in &h_abs {
            for c in &x2 {
                iso_abs.push((h * h + c * c).sqrt());
            }
        }
        let h_hits: Vec<BandHits> = h_abs.iter().map(|&t| cut.bands(t)).collect();
        let v_hits: Vec<BandHits> = x2.iter().map(|&t| cut.bands(t)).collect();
        let iso_hits: Vec<BandHits> = iso_abs.iter().map(|&t| cut.bands(t)).collect();
        let h_range = BandRange::from_hits(h_hits.iter());
        let v_range = BandRange::from_hits(v_hits.iter());
        let iso_range = BandRange::from_hits(iso_hits.iter());

        let mut planner = FftPlanner::new();
        let fft_forward = [
            planner.plan_fft_forward(n[0]),
            planner.plan_fft_forward(n[1]),
            planner.plan_fft_forward(n[2]),
        ];
        let fft_inverse = [
            planner.plan_fft_inverse(n[0]),
            planner.plan_fft_inverse(n[1]),
            planner.plan_fft_inverse(n[2]),
        ];
        Tables {
            xi: [x0, x1, x2],
            deriv: [d0, d1, d2],
            int_xi: [i0, i1, i2],
            h_abs,
            iso_abs,
            h_hits,
            v_hits,
            iso_hits,
            h_range,
            v_range,
            iso_range,
            fft_forward,
            fft_inverse,
        }
    }
}
