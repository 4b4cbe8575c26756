use std::path::PathBuf;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::par;
use crate::solver::{run, RunConfig, Verdict};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRun {
    pub eps: f64,
    pub verdict: Verdict,
    pub t_halt: f64,
    pub steps: usize,
    pub max_theta: f64,
    pub max_psi: f64,
    pub min_band: f64,
    pub bootstrap_violated: bool,
    pub implied_c_theta: f64,
    pub implied_c_psi: f64,
    pub epsilon_zero: Option<f64>,
}

impl SweepRun {
    fn rank(&self) -> u8 {
        match (self.verdict, self.bootstrap_violated) {
            (Verdict::Completed, false) => 0,
            (Verdict::Completed, true) => 1,
            _ => 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepReport {
    pub gamma: f64,
    pub seed: u64,
    pub grid: [usize; 3],
    pub runs: Vec<SweepRun>,
    /// Least-squares slope of `ln max theta` against `ln eps`.
    pub slope: Option<f64>,
    /// Fewer than two runs with `max theta > 0`.
    pub degenerate: bool,
    /// Smaller eps never received a worse verdict (soft check).
    pub monotone_verdicts: bool,
    /// Largest implied bootstrap constant over the sweep.
    pub implied_c_max: f64,
    /// Slope within `gamma +- slope_tolerance` and every run completed with a
    /// positive band.
    pub pass: bool,
    pub slope_tolerance: f64,
    /// Excluded from reproducibility comparisons.
    pub wall_time_s: f64,
}

pub fn fit_slope(points: &[(f64, f64)]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = points
        .iter()
        .filter(|(x, y)| *x > 0.0 && *y > 0.0)
        .map(|(x, y)| (x.ln(), y.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    Some(sxy / sxx)
}

/// Runs `template` once per eps with the same data and fits the scaling of
/// `max theta`. Runs write under `<output>/eps_<eps>` when the template has an
/// output directory.
pub fn eps_sweep(template: &RunConfig, eps: &[f64], jobs: Option<usize>) -> Result<SweepReport> {
    let start = Instant::now();
    if eps.is_empty() {
        return Err(Error::InvalidParameter("empty eps list".into()));
    }
    let configs: Vec<RunConfig> = eps
        .iter()
        .map(|&e| {
            let mut c = template.clone();
            c.params.eps = e;
            c.output = template.output.as_ref().map(|d| d.join(format!("eps_{e}")));
            c.validate().map(|_| c)
        })
        .collect::<Result<_>>()?;
    let outcomes = par::with_jobs(jobs, || par::map_slice(&configs, run));
    let mut runs = Vec::with_capacity(eps.len());
    for (c, o) in configs.iter().zip(outcomes) {
        let o = o?;
        let min_band = o.records.iter().map(|r| r.band).fold(f64::INFINITY, f64::min);
        runs.push(SweepRun {
            eps: c.params.eps,
            verdict: o.verdict.verdict,
            t_halt: o.verdict.t_halt,
            steps: o.summary.steps,
            max_theta: o.summary.max_theta,
            max_psi: o.summary.max_psi,
            min_band,
            bootstrap_violated: o.verdict.first_bootstrap_violation.is_some(),
            implied_c_theta: o.summary.implied_c_theta,
            implied_c_psi: o.summary.implied_c_psi,
            epsilon_zero: o.summary.epsilon_zero,
        });
    }

    let slope = fit_slope(&runs.iter().map(|r| (r.eps, r.max_theta)).collect::<Vec<_>>());
    let degenerate = slope.is_none();
    if degenerate {
        log::info!("sweep slope undefined: fewer than two runs with positive theta");
    }
    let mut by_eps: Vec<&SweepRun> = runs.iter().collect();
    by_eps.sort_by(|a, b| b.eps.total_cmp(&a.eps));
    let monotone_verdicts = by_eps.windows(2).all(|w| w[1].rank() <= w[0].rank());
    if !monotone_verdicts {
        log::warn!("a smaller eps received a worse verdict than a larger one");
    }
    let implied_c_max = runs
        .iter()
        .map(|r| r.implied_c_theta.max(r.implied_c_psi))
        .fold(0.0, f64::max);
    if runs.iter().any(|r| r.bootstrap_violated) {
        log::info!("bootstrap bounds hold after rescaling C to {implied_c_max:.3e}");
    }
    let gamma = template.params.gamma;
    let slope_tolerance = 0.3;
    let pass = slope.is_some_and(|s| (s - gamma).abs() <= slope_tolerance)
        && runs.iter().all(|r| r.verdict == Verdict::Completed && r.min_band > 0.0);
    Ok(SweepReport {
        gamma,
        seed: template.seed,
        grid: template.grid,
        runs,
        slope,
        degenerate,
        monotone_verdicts,
        implied_c_max,
        pass,
        slope_tolerance,
        wall_time_s: start.elapsed().as_secs_f64(),
    })
}

/// Report directory: `ANISO_LP_REPORT_DIR` when set, else `fallback`.
pub fn report_dir(fallback: impl Into<PathBuf>) -> PathBuf {
    std::env::var_os("ANISO_LP_REPORT_DIR")
        .map(PathBuf::from)
        .unwrap_or_else(|| fallback.into())
}
