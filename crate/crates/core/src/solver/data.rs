use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::semigroup::EpsParams;
use crate::spectral::ops::{dealias, leray_project};
use crate::spectral::random::{random_field, random_solenoidal, trial_seed};
use crate::spectral::{Grid, PhysicalField, SpectralField3};

use super::config::Profile;

fn normalized(f: SpectralField3, amplitude: f64) -> SpectralField3 {
    let n = f.l2_norm();
    if n == 0.0 {
        f
    } else {
        f.scaled(amplitude / n)
    }
}

/// Density perturbation for `profile`, dealiased.
pub fn scalar_profile(grid: &Grid, profile: &Profile, seed: u64) -> SpectralField3 {
    let f = match *profile {
        Profile::Zero => return SpectralField3::scalar_zeros(grid),
        Profile::Cosine { amplitude, mode } => PhysicalField::from_fn(grid, 1, |x, _| {
            amplitude * (mode[0] as f64 * x[0] + mode[1] as f64 * x[1] + mode[2] as f64 * x[2]).cos()
        })
        .to_spectral(),
        Profile::TaylorGreen { amplitude } => {
            PhysicalField::from_fn(grid, 1, |x, _| amplitude * x[0].cos() * x[1].cos() * x[2].cos()).to_spectral()
        }
        Profile::Shear { amplitude } => {
            PhysicalField::from_fn(grid, 1, |x, _| amplitude * x[1].sin() * x[2].cos()).to_spectral()
        }
        Profile::Random { amplitude, envelope } => {
            return normalized(random_field(grid, 1, seed, envelope, true), amplitude);
        }
    };
    dealias(&f)
}

/// Divergence-free velocity for `profile`, dealiased.
pub fn vector_profile(grid: &Grid, profile: &Profile, seed: u64) -> Result<SpectralField3> {
    let f = match *profile {
        Profile::Zero => return Ok(SpectralField3::vector_zeros(grid)),
        Profile::Cosine { amplitude, mode } => PhysicalField::from_fn(grid, 3, |x, _| {
            amplitude * (mode[0] as f64 * x[0] + mode[1] as f64 * x[1] + mode[2] as f64 * x[2]).cos()
        })
        .to_spectral(),
        Profile::TaylorGreen { amplitude } => PhysicalField::from_fn(grid, 3, |x, c| match c {
            0 => amplitude * x[0].sin() * x[1].cos() * x[2].cos(),
            1 => -amplitude * x[0].cos() * x[1].sin() * x[2].cos(),
            _ => 0.0,
        })
        .to_spectral(),
        Profile::Shear { amplitude } => PhysicalField::from_fn(grid, 3, |x, c| {
            if c == 0 {
                amplitude * x[1].sin() * x[2].cos()
            } else {
                0.0
            }
        })
        .to_spectral(),
        Profile::Random { amplitude, envelope } => {
            return Ok(normalized(random_solenoidal(grid, seed, envelope, true), amplitude));
        }
    };
    leray_project(&dealias(&f))
}

/// Initial pair in the rescaled variables; the two seeds derive from `seed`.
pub fn initial_data(grid: &Grid, a0: &Profile, v0: &Profile, seed: u64) -> Result<(SpectralField3, SpectralField3)> {
    Ok((
        scalar_profile(grid, a0, trial_seed(seed, 0)),
        vector_profile(grid, v0, trial_seed(seed, 1))?,
    ))
}

/// Rescaled data and the physical fields they encode.
#[derive(Debug, Clone, PartialEq)]
pub struct IllPrepared {
    pub a0: SpectralField3,
    pub v0: SpectralField3,
    /// `1 + eps^beta a0(x_h, eps x3)`
    pub rho0: PhysicalField,
    /// `(eps^{1-alpha} v0^h, eps^{-alpha} v0^3)(x_h, eps x3)`
    pub u0: PhysicalField,
}

/// The physical fields live on `[0, 2pi)^2 x [0, 2pi/eps)`: a rescaled mode
/// `m3` becomes the mode of the same index on the stretched period, so the
/// slow variable is a pure reindexing and the sample values coincide with
/// the rescaled ones at `x3 = y3 / eps`.
pub fn make_ill_prepared(
    grid: &Grid,
    a0: &Profile,
    v0: &Profile,
    params: &EpsParams,
    seed: u64,
) -> Result<IllPrepared> {
    if grid.lengths() != [2.0 * PI; 3] {
        return Err(Error::InvalidGrid("rescaled data live on the 2pi-periodic torus".into()));
    }
    let (a, v) = initial_data(grid, a0, v0, seed)?;
    let l = grid.lengths();
    let physical = Grid::with_lengths(grid.n(), [l[0], l[1], l[2] / params.eps])?;

    let ap = a.to_physical();
    let scale = params.eps.powf(params.beta);
    let rho: Vec<f64> = ap.values().iter().map(|x| 1.0 + scale * x).collect();
    let rho0 = PhysicalField::from_values(&physical, 1, rho)?;

    let vp = v.to_physical();
    let mut u = vp.values().to_vec();
    let len = grid.len();
    let (sh, sv) = (params.eps.powf(1.0 - params.alpha), params.eps.powf(-params.alpha));
    for (c, chunk) in u.chunks_mut(len).enumerate() {
        let s = if c < 2 { sh } else { sv };
        chunk.iter_mut().for_each(|x| *x *= s);
    }
    let u0 = PhysicalField::from_values(&physical, 3, u)?;

    // round trip: the physical samples must reproduce the rescaled field
    let back = u0.to_spectral();
    let mut err = 0.0f64;
    for c in 0..3 {
        let s = if c < 2 { sh } else { sv };
        for (x, y) in back.component(c).iter().zip(v.component(c)) {
            err = err.max((x / s - y).norm());
        }
    }
    let size = v.max_abs_coeff().max(f64::MIN_POSITIVE);
    if err > 1e-8 * size.max(1.0) {
        return Err(Error::NotRepresentable(err));
    }
    Ok(IllPrepared { a0: a, v0: v, rho0, u0 })
}
