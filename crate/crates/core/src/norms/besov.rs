use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::par;
use crate::spectral::{BandRange, SpectralField3};

/// Horizontal and vertical regularity `(sigma, s)` of `B^{sigma, s}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnisoBesovIndex {
    pub sigma: f64,
    pub s: f64,
}

impl AnisoBesovIndex {
    pub const fn new(sigma: f64, s: f64) -> Self {
        AnisoBesovIndex { sigma, s }
    }

    #[inline]
    pub fn weight(&self, k: i32, l: i32) -> f64 {
        (k as f64 * self.sigma + l as f64 * self.s).exp2()
    }
}

impl From<(f64, f64)> for AnisoBesovIndex {
    fn from((sigma, s): (f64, f64)) -> Self {
        AnisoBesovIndex { sigma, s }
    }
}

/// Squared `L2` norms of every `Delta_k^h Delta_l^v` block, per component.
///
/// Modes with `xi_h = 0` or `xi3 = 0` belong to no block, so directional means
/// never enter a Besov sum.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockTable {
    components: usize,
    h: BandRange,
    v: BandRange,
    energy: Vec<f64>,
}

impl BlockTable {
    pub fn zeros(components: usize, h: BandRange, v: BandRange) -> Self {
        BlockTable {
            components,
            h,
            v,
            energy: vec![0.0; components * h.len() * v.len()],
        }
    }

    pub fn components(&self) -> usize {
        self.components
    }

    pub fn h_range(&self) -> BandRange {
        self.h
    }

    pub fn v_range(&self) -> BandRange {
        self.v
    }

    #[inline]
    fn slot(&self, c: usize, k: i32, l: i32) -> usize {
        (c * self.h.len() + (k - self.h.min) as usize) * self.v.len() + (l - self.v.min) as usize
    }

    /// `||Delta_k^h Delta_l^v f_c||^2`, zero outside the grid's ranges.
    pub fn energy(&self, c: usize, k: i32, l: i32) -> f64 {
        if self.h.contains(k) && self.v.contains(l) {
            self.energy[self.slot(c, k, l)]
        } else {
            0.0
        }
    }

    pub fn norm(&self, c: usize, k: i32, l: i32) -> f64 {
        self.energy(c, k, l).sqrt()
    }

    pub fn blocks(&self) -> impl Iterator<Item = (i32, i32)> + '_ {
        self.h.iter().flat_map(move |k| self.v.iter().map(move |l| (k, l)))
    }

    pub fn besov_component(&self, c: usize, idx: AnisoBesovIndex) -> f64 {
        self.blocks().map(|(k, l)| idx.weight(k, l) * self.norm(c, k, l)).sum()
    }

    /// Sum of component norms over `comps`.
    pub fn besov_components(&self, comps: std::ops::Range<usize>, idx: AnisoBesovIndex) -> f64 {
        comps.map(|c| self.besov_component(c, idx)).sum()
    }

    pub fn besov(&self, idx: AnisoBesovIndex) -> f64 {
        self.besov_components(0..self.components, idx)
    }

    fn add(&mut self, other: &BlockTable) {
        for (a, b) in self.energy.iter_mut().zip(&other.energy) {
            *a += b;
        }
    }
}

/// Block energies of `e^{r|D|} f` without materializing the weighted field.
pub fn block_energies(f: &SpectralField3, r: f64) -> BlockTable {
    let grid = f.grid();
    let [n1, n2, n3] = grid.n();
    let (hr, vr) = (grid.h_range(), grid.v_range());
    let comps = f.components();
    let plane = n2 * n3;
    let partials = par::map_range(n1 * comps, |task| {
        let c = task / n1;
        let i1 = task % n1;
        let mut t = BlockTable::zeros(comps, hr, vr);
        let data = f.component(c);
        for i2 in 0..n2 {
            let i12 = i1 * n2 + i2;
            let hh = grid.h_hits(i12);
            if hh.is_empty() {
                continue;
            }
            for i3 in 0..n3 {
                let vh = grid.v_hits(i3);
                if vh.is_empty() {
                    continue;
                }
                let idx = i1 * plane + i2 * n3 + i3;
                let mut w = data[idx].norm_sqr();
                if w == 0.0 {
                    continue;
                }
                if r != 0.0 {
                    w *= (2.0 * r * grid.iso_abs(idx)).exp();
                }
                for (k, wk) in hh.iter() {
                    for (l, wl) in vh.iter() {
                        let s = t.slot(c, k, l);
                        t.energy[s] += w * (wk * wl) * (wk * wl);
                    }
                }
            }
        }
        t
    });
    let mut out = BlockTable::zeros(comps, hr, vr);
    for p in &partials {
        out.add(p);
    }
    out
}

/// `sum_{k,l} 2^{k sigma + l s} ||Delta_k^h Delta_l^v f||`, summed over
/// components.
pub fn besov_norm(f: &SpectralField3, idx: AnisoBesovIndex) -> f64 {
    block_energies(f, 0.0).besov(idx)
}

/// Interpolation ratio `|g|_{(sigma,s)} / (|g|_{(sigma1,s1)} + |g|_{(sigma2,s2)})`.
pub fn interpolation_check(
    g_phase: &SpectralField3,
    mid: AnisoBesovIndex,
    lo: AnisoBesovIndex,
    hi: AnisoBesovIndex,
) -> Result<f64> {
    let sums = [mid.sigma + mid.s, lo.sigma + lo.s, hi.sigma + hi.s];
    if !(lo.sigma < mid.sigma && mid.sigma < hi.sigma) {
        return Err(Error::InvalidParameter(format!(
            "need sigma1 < sigma < sigma2, got {} {} {}",
            lo.sigma, mid.sigma, hi.sigma
        )));
    }
    if !(hi.s < mid.s && mid.s < lo.s) {
        return Err(Error::InvalidParameter(format!(
            "need s2 < s < s1, got {} {} {}",
            hi.s, mid.s, lo.s
        )));
    }
    if (sums[0] - sums[1]).abs() > 1e-12 || (sums[0] - sums[2]).abs() > 1e-12 {
        return Err(Error::InvalidParameter(format!("index sums differ: {sums:?}")));
    }
    let t = block_energies(g_phase, 0.0);
    let num = t.besov(mid);
    let den = t.besov(lo) + t.besov(hi);
    if den == 0.0 {
        log::debug!("interpolation check on a zero field, ratio reported as 0");
        return Ok(0.0);
    }
    Ok(num / den)
}
