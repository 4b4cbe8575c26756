use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::norms::{besov_norm, AnisoBesovIndex, LpTime, NormAccumulator};
use crate::norms::apply_phase;
use crate::semigroup::EpsParams;
use crate::spectral::SpectralField3;

/// Threshold on `eps` below which the bootstrap argument closes, for the
/// density smallness `eps_small`.
pub fn epsilon_zero(c: f64, k0: f64, delta: f64, x2_norm: f64, beta: f64, gamma: f64, eps_small: f64) -> Result<f64> {
    for (name, x) in [
        ("C", c),
        ("K0", k0),
        ("delta", delta),
        ("X2 norm", x2_norm),
        ("beta", beta),
        ("gamma", gamma),
        ("eps_small", eps_small),
    ] {
        if !(x > 0.0) {
            return Err(Error::InvalidParameter(format!("{name} must be positive, got {x}")));
        }
    }
    if !(beta > gamma) {
        return Err(Error::InvalidParameter(format!("need beta > gamma, got {beta} <= {gamma}")));
    }
    let terms = [
        (eps_small / k0).powf(1.0 / beta),
        (1.0 / (2.0 * c * k0)).powf(1.0 / (beta - gamma)),
        (1.0 / (8.0 * c * k0)).powf(1.0 / gamma),
        (delta / (16.0 * c * c * x2_norm)).powf(1.0 / gamma),
    ];
    Ok(terms.into_iter().fold(f64::INFINITY, f64::min))
}

/// The bootstrap thresholds `theta <= 4C eps^gamma |v0|_X2`, `Psi <= K0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Bootstrap {
    pub c: f64,
    pub theta_bound: f64,
    pub k0: f64,
}

impl Bootstrap {
    pub fn new(c: f64, eps: f64, gamma: f64, x1: f64, x2: f64, x3: f64) -> Self {
        Bootstrap {
            c,
            theta_bound: 4.0 * c * eps.powf(gamma) * x2,
            k0: 4.0 * c * (x1 + x3),
        }
    }

    pub fn check(&self, t: f64, theta: f64, psi: f64) -> Option<BootstrapViolation> {
        if theta > self.theta_bound {
            Some(BootstrapViolation {
                t,
                quantity: "theta".into(),
                value: theta,
                bound: self.theta_bound,
            })
        } else if psi > self.k0 {
            Some(BootstrapViolation {
                t,
                quantity: "psi".into(),
                value: psi,
                bound: self.k0,
            })
        } else {
            None
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BootstrapViolation {
    pub t: f64,
    pub quantity: String,
    pub value: f64,
    pub bound: f64,
}

/// One transport estimate evaluated with unit constant: `lhs <= data + C * rest`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransportLine {
    pub sigma: f64,
    pub s: f64,
    pub lhs: f64,
    pub data: f64,
    pub rest: f64,
    /// `max(lhs - data, 0) / rest`, 0 when both vanish.
    pub implied_c: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TransportReport {
    pub lambda: f64,
    pub lines: Vec<TransportLine>,
    pub max_implied_c: f64,
}

fn line(idx: AnisoBesovIndex, lhs: f64, data: f64, rest: f64) -> TransportLine {
    let excess = (lhs - data).max(0.0);
    let implied_c = if rest > 0.0 {
        excess / rest
    } else if excess > 0.0 {
        f64::INFINITY
    } else {
        0.0
    };
    TransportLine {
        sigma: idx.sigma,
        s: idx.s,
        lhs,
        data,
        rest,
        implied_c,
    }
}

/// Implied constants of the transport estimates for the four density norms
/// in `Psi1`, from a run's `a_Phi` and `v_Phi` records.
pub fn transport_estimate_monitor(
    a0: &SpectralField3,
    delta: f64,
    lambda: f64,
    acc_a: &NormAccumulator,
    acc_v: &NormAccumulator,
    p: &EpsParams,
) -> Result<TransportReport> {
    let g = p.gamma;
    let adv = p.eps.powf(1.0 - p.alpha);
    let ix = AnisoBesovIndex::new;
    let a_data = apply_phase(a0, delta)?;
    let lhs = |i: AnisoBesovIndex| acc_a.norm(LpTime::LInf, i);
    let data = |i: AnisoBesovIndex| besov_norm(&a_data, i);
    let vh = |i: AnisoBesovIndex| acc_v.norm_components(0..2, LpTime::L1, i);

    let i0 = ix(1.0, 0.5);
    let im = ix(1.0 - g, 0.5 + g);
    let ip = ix(1.0 + g, 0.5 - g);
    let iv = ix(g, 1.5 - g);
    let (l0, lm, lp, lv) = (lhs(i0), lhs(im), lhs(ip), lhs(iv));
    let lines = vec![
        line(i0, l0, data(i0), (1.0 / lambda + adv * acc_v.norm(LpTime::L1, ix(2.0, 0.5))) * l0),
        line(im, lm, data(im), (lm + l0) / lambda + adv * vh(ix(2.0 - g, 0.5 + g)) * l0),
        line(ip, lp, data(ip), (lp + l0) / lambda + adv * vh(ix(2.0 + g, 0.5 - g)) * l0),
        line(
            iv,
            lv,
            data(iv),
            lv / lambda + adv * (vh(ix(1.0, 1.5)) * lp + acc_v.norm(LpTime::L1, ix(1.0 + g, 1.5 - g)) * l0),
        ),
    ];
    let max_implied_c = lines.iter().map(|l| l.implied_c).fold(0.0, f64::max);
    Ok(TransportReport {
        lambda,
        lines,
        max_implied_c,
    })
}
