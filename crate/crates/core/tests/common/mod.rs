#![allow(dead_code)]

use std::f64::consts::PI;

use aniso_lp::spectral::{CutoffPair, Grid, SpectralField3};
use num_complex::Complex64;

/// Real field `sum amp * cos(m . x + phase)` built mode by mode.
pub fn modes(grid: &Grid, terms: &[([i64; 3], f64)]) -> SpectralField3 {
    let n = grid.n();
    let mut f = SpectralField3::scalar_zeros(grid);
    for &(m, amp) in terms {
        let w = |k: i64, n: usize| k.rem_euclid(n as i64) as usize;
        let p = grid.index(w(m[0], n[0]), w(m[1], n[1]), w(m[2], n[2]));
        let q = grid.index(w(-m[0], n[0]), w(-m[1], n[1]), w(-m[2], n[2]));
        f.coeffs_mut()[p] += Complex64::new(amp / 2.0, 0.0);
        f.coeffs_mut()[q] += Complex64::new(amp / 2.0, 0.0);
    }
    f
}

/// Normalized DFT of real samples by direct summation (O(N^2)); returns a map
/// of integer wavevector to coefficient.
pub fn direct_dft(n: [usize; 3], values: &[f64]) -> Vec<([i64; 3], Complex64)> {
    let total = (n[0] * n[1] * n[2]) as f64;
    let wn = |i: usize, n: usize| if i < n / 2 { i as i64 } else { i as i64 - n as i64 };
    let mut out = Vec::new();
    for k1 in 0..n[0] {
        for k2 in 0..n[1] {
            for k3 in 0..n[2] {
                let m = [wn(k1, n[0]), wn(k2, n[1]), wn(k3, n[2])];
                let mut acc = Complex64::new(0.0, 0.0);
                for i1 in 0..n[0] {
                    for i2 in 0..n[1] {
                        for i3 in 0..n[2] {
                            let ph = 2.0 * PI
                                * ((k1 * i1) as f64 / n[0] as f64
                                    + (k2 * i2) as f64 / n[1] as f64
                                    + (k3 * i3) as f64 / n[2] as f64);
                            let v = values[(i1 * n[1] + i2) * n[2] + i3];
                            acc += Complex64::from_polar(v, -ph);
                        }
                    }
                }
                out.push((m, acc / total));
            }
        }
    }
    out
}

/// Brute-force anisotropic Besov norm from a list of (wavevector, coefficient)
/// using the cutoff profile directly.
pub fn oracle_besov(coeffs: &[([i64; 3], Complex64)], sigma: f64, s: f64, r: f64) -> f64 {
    let cut = CutoffPair::standard();
    let mut total = 0.0;
    for k in -3..8 {
        for l in -3..8 {
            let mut e = 0.0;
            for (m, c) in coeffs {
                let h = ((m[0] * m[0] + m[1] * m[1]) as f64).sqrt();
                let v = (m[2] as f64).abs();
                let iso = ((m[0] * m[0] + m[1] * m[1] + m[2] * m[2]) as f64).sqrt();
                let w = cut.phi(h / f64::powi(2.0, k)) * cut.phi(v / f64::powi(2.0, l));
                e += (w * (r * iso).exp()).powi(2) * c.norm_sqr();
            }
            total += f64::powf(2.0, k as f64 * sigma + l as f64 * s) * e.sqrt();
        }
    }
    total
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(1e-300)
}
