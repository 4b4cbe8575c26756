use serde::{Deserialize, Serialize};

use super::besov::{block_energies, AnisoBesovIndex};
use crate::error::{Error, Result};
use crate::spectral::ops::div;
use crate::spectral::SpectralField3;

/// Largest admissible exponent `r |xi|_max` of the phase multiplier.
pub const PHASE_LIMIT: f64 = 700.0;

/// Analytic band state: `Phi(t, xi) = (delta - lambda theta(t)) |xi|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhaseState {
    pub delta: f64,
    pub lambda: f64,
    pub theta: f64,
    pub gamma: f64,
}

impl PhaseState {
    pub fn new(delta: f64, lambda: f64, gamma: f64) -> Self {
        PhaseState {
            delta,
            lambda,
            theta: 0.0,
            gamma,
        }
    }

    /// `delta - lambda theta`
    pub fn band(&self) -> f64 {
        self.delta - self.lambda * self.theta
    }

    /// `f_Phi` at the current band; fails once the band is negative.
    pub fn apply(&self, f: &SpectralField3) -> Result<SpectralField3> {
        let r = self.band();
        if r < 0.0 {
            return Err(Error::BandExhausted(r));
        }
        apply_phase(f, r)
    }
}

/// Errors when `e^{r|xi|}` would overflow on `f`'s grid.
pub fn check_phase(f: &SpectralField3, r: f64) -> Result<()> {
    let top = r * f.grid().xi_max();
    if top > PHASE_LIMIT {
        return Err(Error::PhaseOverflow(top));
    }
    Ok(())
}

/// `F^{-1}(e^{r|xi|} f^)`
pub fn apply_phase(f: &SpectralField3, r: f64) -> Result<SpectralField3> {
    check_phase(f, r)?;
    if r == 0.0 {
        return Ok(f.clone());
    }
    let grid = f.grid().clone();
    Ok(f.map_real(move |i| (r * grid.iso_abs(i)).exp()))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct XNorms {
    pub x1: f64,
    pub x2: f64,
    pub x3: f64,
}

impl XNorms {
    pub fn x1_indices(gamma: f64) -> [AnisoBesovIndex; 3] {
        [
            AnisoBesovIndex::new(1.0 - gamma, 0.5 + gamma),
            AnisoBesovIndex::new(1.0 + gamma, 0.5 - gamma),
            AnisoBesovIndex::new(gamma, 1.5 - gamma),
        ]
    }

    pub fn x2_indices(gamma: f64) -> [AnisoBesovIndex; 2] {
        [
            AnisoBesovIndex::new(-0.5 + gamma, -gamma),
            AnisoBesovIndex::new(0.0, -0.5),
        ]
    }

    pub fn x3_indices(gamma: f64) -> [AnisoBesovIndex; 2] {
        [
            AnisoBesovIndex::new(gamma, 0.5 - gamma),
            AnisoBesovIndex::new(-gamma, 0.5 + gamma),
        ]
    }
}

/// Data norms of `(a0, v0)` with the static band `delta`.
pub fn x_norms(a0: &SpectralField3, v0: &SpectralField3, delta: f64, gamma: f64) -> Result<XNorms> {
    a0.ensure_components(1)?;
    v0.ensure_components(3)?;
    a0.ensure_same_grid(v0)?;
    check_phase(a0, delta)?;
    let scale = v0.l2_norm();
    let d = div(v0)?.l2_norm();
    if d > 1e-8 * scale.max(f64::MIN_POSITIVE) && scale > 0.0 {
        return Err(Error::Precondition(format!(
            "v0 is not divergence free (|div v0| = {d:e})"
        )));
    }
    let ta = block_energies(a0, delta);
    let tv = block_energies(v0, delta);
    Ok(XNorms {
        x1: XNorms::x1_indices(gamma).iter().map(|&i| ta.besov(i)).sum(),
        x2: XNorms::x2_indices(gamma).iter().map(|&i| tv.besov(i)).sum(),
        x3: XNorms::x3_indices(gamma).iter().map(|&i| tv.besov(i)).sum(),
    })
}
