//! Smooth radial cutoffs generating the dyadic partition of unity.
//!
//! `chi` equals one on `[0, 3/4]`, vanishes beyond `4/3` and is a `C^inf`
//! monotone step in between. `phi(tau) = chi(tau / 2) - chi(tau)` is then
//! supported in `[3/4, 8/3]` and the dilates `phi(2^-j tau)` telescope to one.

/// The pair `(chi, phi)` defining every dyadic projector.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CutoffPair {
    inner: f64,
    outer: f64,
}

/// Dyadic indices `j` with `phi(2^-j tau) > 0`, together with the weights.
///
/// The support ratio `(8/3) / (3/4) < 4` means a given `tau` belongs to at
/// most two consecutive bands.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct BandHits {
    len: u8,
    items: [(i32, f64); 2],
}

impl BandHits {
    pub fn len(&self) -> usize {
        self.len as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn iter(&self) -> impl Iterator<Item = (i32, f64)> + '_ {
        self.items[..self.len as usize].iter().copied()
    }

    /// Weight of band `j`, zero when `j` is not hit.
    pub fn weight(&self, j: i32) -> f64 {
        self.iter().find(|&(b, _)| b == j).map_or(0.0, |(_, w)| w)
    }

    fn push(&mut self, j: i32, w: f64) {
        assert!(self.len < 2, "a radius belongs to at most two dyadic bands");
        self.items[self.len as usize] = (j, w);
        self.len += 1;
    }
}

/// Builds the standard cutoff pair used throughout the crate.
pub fn build_cutoffs() -> CutoffPair {
    CutoffPair::standard()
}

/// `exp(-1/x)` for `x > 0`, zero otherwise.
fn bump_primitive(x: f64) -> f64 {
    if x > 0.0 {
        (-1.0 / x).exp()
    } else {
        0.0
    }
}

/// Smooth step from 1 at `t <= 0` to 0 at `t >= 1`.
fn smooth_step_down(t: f64) -> f64 {
    if t <= 0.0 {
        return 1.0;
    }
    if t >= 1.0 {
        return 0.0;
    }
    let up = bump_primitive(1.0 - t);
    up / (up + bump_primitive(t))
}

impl CutoffPair {
    pub const fn standard() -> Self {
        CutoffPair {
            inner: 0.75,
            outer: 4.0 / 3.0,
        }
    }

    pub fn chi(&self, tau: f64) -> f64 {
        let t = tau.abs();
        if t <= self.inner {
            1.0
        } else if t >= self.outer {
            0.0
        } else {
            smooth_step_down((t - self.inner) / (self.outer - self.inner))
        }
    }

    pub fn phi(&self, tau: f64) -> f64 {
        self.chi(0.5 * tau) - self.chi(tau)
    }

    /// Lower edge of `supp phi`.
    pub fn phi_support_min(&self) -> f64 {
        self.inner
    }

    /// Upper edge of `supp phi`.
    pub fn phi_support_max(&self) -> f64 {
        2.0 * self.outer
    }

    /// All `j` with `phi(2^-j tau) > 0` and the corresponding weights.
    pub fn bands(&self, tau: f64) -> BandHits {
        let mut hits = BandHits::default();
        let t = tau.abs();
        if t == 0.0 {
            return hits;
        }
        let lo = (t / self.phi_support_max()).log2().floor() as i32;
        let hi = (t / self.phi_support_min()).log2().ceil() as i32;
        for j in lo..=hi {
            let w = self.phi(t * (-j as f64).exp2());
            if w > 0.0 {
                hits.push(j, w);
            }
        }
        hits
    }

    /// `sum_{j in Z} phi(2^-j tau)`.
    pub fn partition_sum(&self, tau: f64) -> f64 {
        self.bands(tau).iter().map(|(_, w)| w).sum()
    }

    /// `chi(tau) + sum_{j >= 0} phi(2^-j tau)`.
    pub fn inhomogeneous_partition_sum(&self, tau: f64) -> f64 {
        self.chi(tau)
            + self
                .bands(tau)
                .iter()
                .filter(|&(j, _)| j >= 0)
                .map(|(_, w)| w)
                .sum::<f64>()
    }
}

impl Default for CutoffPair {
    fn default() -> Self {
        Self::standard()
    }
}
