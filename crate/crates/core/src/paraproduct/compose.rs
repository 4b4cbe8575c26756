use serde::Serialize;

use crate::error::{Error, Result};
use crate::norms::{block_energies, AnisoBesovIndex, LpTime, NormAccumulator};
use crate::spectral::ops::dealias_in_place;
use crate::spectral::SpectralField3;

/// Default smallness `epsilon` in `||a_Phi||_{L~inf(B^{1,1/2})} <= epsilon`.
pub const DEFAULT_SMALLNESS: f64 = 0.01;

/// `G(a) = a / (1 + a)` evaluated pointwise, dealiased.
pub fn compose_g(a: &SpectralField3) -> Result<SpectralField3> {
    a.ensure_components(1)?;
    let mut p = a.to_physical();
    let min = p.min();
    if 1.0 + min <= 0.0 {
        return Err(Error::DensityPositivity(1.0 + min));
    }
    for x in p.values_mut() {
        *x /= 1.0 + *x;
    }
    let mut out = p.to_spectral();
    dealias_in_place(&mut out);
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GCheck {
    /// `||a_Phi||_{L~inf(B^{1,1/2})}`
    pub smallness: f64,
    pub epsilon: f64,
    pub precondition_held: bool,
    /// `||[G(a)]_Phi|| / ||a_Phi||` in the requested index; absent when the
    /// precondition failed.
    pub ratio: Option<f64>,
    pub pass: bool,
}

/// Checks `||[G(a)]_Phi||_{L~inf(B)} <= 2 ||a_Phi||_{L~inf(B)}` over a series
/// of `(a(t), band r(t))` samples.
pub fn g_smallness_check(series: &[(SpectralField3, f64)], idx: AnisoBesovIndex, epsilon: f64) -> Result<GCheck> {
    let first = &series.first().ok_or(Error::EmptySeries)?.0;
    let grid = first.grid();
    let mut acc_a = NormAccumulator::new(grid, 1);
    let mut acc_g = NormAccumulator::new(grid, 1);
    for (a, r) in series {
        crate::norms::check_phase(a, *r)?;
        acc_a.observe_table(&block_energies(a, *r))?;
    }
    let smallness = acc_a.norm(LpTime::LInf, AnisoBesovIndex::new(1.0, 0.5));
    if smallness > epsilon {
        log::warn!("smallness precondition violated ({smallness:e} > {epsilon:e}); check skipped");
        return Ok(GCheck {
            smallness,
            epsilon,
            precondition_held: false,
            ratio: None,
            pass: false,
        });
    }
    for (a, r) in series {
        acc_g.observe_table(&block_energies(&compose_g(a)?, *r))?;
    }
    let den = acc_a.norm(LpTime::LInf, idx);
    let ratio = if den == 0.0 { 0.0 } else { acc_g.norm(LpTime::LInf, idx) / den };
    Ok(GCheck {
        smallness,
        epsilon,
        precondition_held: true,
        ratio: Some(ratio),
        pass: ratio <= 2.0,
    })
}
