use std::io::Write;

use serde::{Deserialize, Serialize};

use super::besov::{block_energies, AnisoBesovIndex, BlockTable};
use crate::error::{Error, Result};
use crate::spectral::{BandRange, Grid, SpectralField3};

/// Time exponent of a Chemin-Lerner norm.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum LpTime {
    L1,
    L2,
    LInf,
}

/// Per-block time records of a phase-weighted field: `int ||.|| dt`,
/// `int ||.||^2 dt` and `max ||.||`, accumulated with left-endpoint
/// rectangles.
#[derive(Debug, Clone, PartialEq)]
pub struct NormAccumulator {
    components: usize,
    h: BandRange,
    v: BandRange,
    p1: Vec<f64>,
    p2: Vec<f64>,
    pinf: Vec<f64>,
    time: f64,
    samples: usize,
}

impl NormAccumulator {
    pub fn new(grid: &Grid, components: usize) -> Self {
        let (h, v) = (grid.h_range(), grid.v_range());
        let len = components * h.len() * v.len();
        NormAccumulator {
            components,
            h,
            v,
            p1: vec![0.0; len],
            p2: vec![0.0; len],
            pinf: vec![0.0; len],
            time: 0.0,
            samples: 0,
        }
    }

    pub fn components(&self) -> usize {
        self.components
    }

    /// Total integrated time.
    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn samples(&self) -> usize {
        self.samples
    }

    fn slot(&self, c: usize, k: i32, l: i32) -> usize {
        (c * self.h.len() + (k - self.h.min) as usize) * self.v.len() + (l - self.v.min) as usize
    }

    fn check(&self, t: &BlockTable) -> Result<()> {
        if t.components() != self.components || t.h_range() != self.h || t.v_range() != self.v {
            return Err(Error::GridMismatch);
        }
        Ok(())
    }

    /// Adds the sample `f_phase` held over an interval of length `dt`.
    pub fn accumulate(&mut self, f_phase: &SpectralField3, dt: f64) -> Result<()> {
        self.accumulate_table(&block_energies(f_phase, 0.0), dt)
    }

    pub fn accumulate_table(&mut self, table: &BlockTable, dt: f64) -> Result<()> {
        if !(dt > 0.0) {
            return Err(Error::InvalidParameter(format!("dt must be positive, got {dt}")));
        }
        self.check(table)?;
        for c in 0..self.components {
            for (k, l) in table.blocks() {
                let e = table.energy(c, k, l);
                let s = self.slot(c, k, l);
                let nrm = e.sqrt();
                self.p1[s] += dt * nrm;
                self.p2[s] += dt * e;
                self.pinf[s] = self.pinf[s].max(nrm);
            }
        }
        self.time += dt;
        self.samples += 1;
        Ok(())
    }

    /// Updates only the running maxima (used for the final state of a run).
    pub fn observe_table(&mut self, table: &BlockTable) -> Result<()> {
        self.check(table)?;
        for c in 0..self.components {
            for (k, l) in table.blocks() {
                let s = self.slot(c, k, l);
                self.pinf[s] = self.pinf[s].max(table.norm(c, k, l));
            }
        }
        Ok(())
    }

    /// `||Delta_k^h Delta_l^v u_c||_{L^p_t(L^2)}`
    pub fn block_value(&self, c: usize, k: i32, l: i32, p: LpTime) -> f64 {
        let s = self.slot(c, k, l);
        match p {
            LpTime::L1 => self.p1[s],
            LpTime::L2 => self.p2[s].sqrt(),
            LpTime::LInf => self.pinf[s],
        }
    }

    pub fn norm_components(&self, comps: std::ops::Range<usize>, p: LpTime, idx: AnisoBesovIndex) -> f64 {
        let mut total = 0.0;
        for c in comps {
            for k in self.h.iter() {
                for l in self.v.iter() {
                    total += idx.weight(k, l) * self.block_value(c, k, l, p);
                }
            }
        }
        total
    }

    /// `||u||_{L~^p_t(B^{sigma,s})}`, summed over components.
    pub fn norm(&self, p: LpTime, idx: AnisoBesovIndex) -> f64 {
        self.norm_components(0..self.components, p, idx)
    }

    /// CSV dump of one component: `k,l,p1_integral,p2_square_integral,pinf_max`.
    pub fn write_csv<W: Write>(&self, mut w: W, c: usize) -> Result<()> {
        writeln!(w, "k,l,p1_integral,p2_square_integral,pinf_max")?;
        for k in self.h.iter() {
            for l in self.v.iter() {
                let s = self.slot(c, k, l);
                writeln!(w, "{k},{l},{:e},{:e},{:e}", self.p1[s], self.p2[s], self.pinf[s])?;
            }
        }
        Ok(())
    }
}

/// Functional form of [`NormAccumulator::accumulate`].
pub fn cl_accumulate(mut acc: NormAccumulator, f_phase: &SpectralField3, dt: f64) -> Result<NormAccumulator> {
    acc.accumulate(f_phase, dt)?;
    Ok(acc)
}

pub fn cl_norm(acc: &NormAccumulator, p: LpTime, idx: AnisoBesovIndex) -> f64 {
    acc.norm(p, idx)
}
