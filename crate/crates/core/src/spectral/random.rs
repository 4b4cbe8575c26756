//! Seeded random real fields with an exponential spectral envelope.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::field::{PhysicalField, SpectralField3};
use super::grid::Grid;
use super::ops::{dealias_in_place, leray_project};

/// Stream seed for trial `trial` of a run seeded with `seed`.
pub fn trial_seed(seed: u64, trial: u64) -> u64 {
    // splitmix64 finalizer
    let mut z = seed ^ trial.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Real Gaussian noise filtered by `e^{-envelope |xi|}`, mean and Nyquist
/// modes removed, optionally 2/3-truncated.
pub fn random_field(grid: &Grid, components: usize, seed: u64, envelope: f64, dealias: bool) -> SpectralField3 {
    let mut r = rng(seed);
    random_field_with(grid, components, &mut r, envelope, dealias)
}

pub fn random_field_with(
    grid: &Grid,
    components: usize,
    rng: &mut ChaCha8Rng,
    envelope: f64,
    dealias: bool,
) -> SpectralField3 {
    let values: Vec<f64> = (0..grid.len() * components)
        .map(|_| StandardNormal.sample(rng))
        .collect();
    let noise = PhysicalField::from_values(grid, components, values).expect("sized to grid");
    let mut f = noise.to_spectral();
    let g = grid.clone();
    f.map_real_in_place(move |i| {
        let [i1, i2, i3] = g.unravel(i);
        if i == 0 || g.is_nyquist(0, i1) || g.is_nyquist(1, i2) || g.is_nyquist(2, i3) {
            0.0
        } else {
            (-envelope * g.iso_abs(i)).exp()
        }
    });
    if dealias {
        dealias_in_place(&mut f);
    }
    f
}

/// Divergence-free random vector field (Leray projection of `random_field`).
pub fn random_solenoidal(grid: &Grid, seed: u64, envelope: f64, dealias: bool) -> SpectralField3 {
    let v = random_field(grid, 3, seed, envelope, dealias);
    leray_project(&v).expect("three components")
}

/// Random scalar whose spectrum lies in one band pattern: every mode is
/// multiplied by `weight(index)` after generation.
pub fn random_masked<F>(grid: &Grid, seed: u64, weight: F) -> SpectralField3
where
    F: Fn(usize) -> f64 + Sync + Send,
{
    let mut f = random_field(grid, 1, seed, 0.0, false);
    f.map_real_in_place(weight);
    f
}
