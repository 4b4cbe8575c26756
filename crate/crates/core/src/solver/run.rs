use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::Path;
use std::time::Instant;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::norms::{x_norms, XNorms};
use crate::pressure::{pressure_estimate_monitor, PressureMonitorReport};
use crate::semigroup::ConstraintReport;
use crate::spectral::snapshot::write_snapshot;

use super::config::RunConfig;
use super::data::initial_data;
use super::monitor::{epsilon_zero, transport_estimate_monitor, Bootstrap, BootstrapViolation, TransportReport};
use super::state::{div_residual, min_density, SolverState, StepConfig};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticsRecord {
    pub t: f64,
    pub theta: f64,
    pub band: f64,
    pub psi1: f64,
    pub psi2: f64,
    pub psi3: f64,
    pub psi4: f64,
    pub psi: f64,
    pub energy: f64,
    pub div_residual: f64,
    pub pressure_iters: usize,
    pub pressure_residual: f64,
    pub min_density: f64,
}

pub const DIAGNOSTICS_HEADER: &str =
    "t,theta,band,psi1,psi2,psi3,psi4,psi,energy,div_residual,pressure_iters,pressure_residual,min_density";

impl DiagnosticsRecord {
    fn from_state(s: &SolverState, cfg: &StepConfig) -> Result<Self> {
        let parts = s.psi_parts(&cfg.params);
        let e = s.v.l2_norm();
        Ok(DiagnosticsRecord {
            t: s.t,
            theta: s.theta(),
            band: s.band(),
            psi1: parts.psi1,
            psi2: parts.psi2,
            psi3: parts.psi3,
            psi4: parts.psi4,
            psi: parts.total(),
            energy: e * e,
            div_residual: div_residual(&s.v)?,
            pressure_iters: s.pressure_iters,
            pressure_residual: s.pressure_residual,
            min_density: min_density(&s.a, &cfg.params),
        })
    }

    pub fn csv_row(&self) -> String {
        format!(
            "{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{:e},{},{:e},{:e}",
            self.t,
            self.theta,
            self.band,
            self.psi1,
            self.psi2,
            self.psi3,
            self.psi4,
            self.psi,
            self.energy,
            self.div_residual,
            self.pressure_iters,
            self.pressure_residual,
            self.min_density
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Completed,
    BandExhausted,
    DensityLost,
    PressureFailed,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerdictReport {
    pub verdict: Verdict,
    pub t_halt: f64,
    pub first_bootstrap_violation: Option<BootstrapViolation>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunSummary {
    pub constraints: ConstraintReport,
    pub x_norms: XNorms,
    pub bootstrap: Bootstrap,
    /// `None` when a data norm vanishes and the threshold is unbounded.
    pub epsilon_zero: Option<f64>,
    pub steps: usize,
    pub max_theta: f64,
    pub max_psi: f64,
    /// Smallest `C` for which the run keeps `theta <= 4C eps^gamma |v0|_X2`.
    pub implied_c_theta: f64,
    /// Smallest `C` for which the run keeps `Psi <= 4C (|a0|_X1 + |v0|_X3)`.
    pub implied_c_psi: f64,
    pub transport: TransportReport,
    pub pressure_monitor: PressureMonitorReport,
    /// Excluded from reproducibility comparisons.
    pub wall_time_s: f64,
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub records: Vec<DiagnosticsRecord>,
    pub verdict: VerdictReport,
    pub summary: RunSummary,
    pub state: SolverState,
}

fn halt_verdict(e: &Error) -> Option<Verdict> {
    match e {
        Error::BandExhausted(_) => Some(Verdict::BandExhausted),
        Error::DensityPositivity(_) => Some(Verdict::DensityLost),
        Error::PressureNonConvergence { .. } => Some(Verdict::PressureFailed),
        _ => None,
    }
}

fn implied(value: f64, unit: f64) -> f64 {
    if value == 0.0 {
        0.0
    } else if unit > 0.0 {
        value / unit
    } else {
        f64::INFINITY
    }
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut w = BufWriter::new(File::create(path)?);
    serde_json::to_writer_pretty(&mut w, value)?;
    writeln!(w)?;
    w.flush()?;
    Ok(())
}

fn write_snapshots(dir: &Path, step: usize, s: &SolverState) -> Result<()> {
    let dir = dir.join("snapshots");
    fs::create_dir_all(&dir)?;
    for (name, f) in [("a", &s.a), ("v", &s.v), ("q", &s.q)] {
        let mut w = BufWriter::new(File::create(dir.join(format!("{name}_{step:06}.bin")))?);
        write_snapshot(&mut w, f, s.t)?;
        w.flush()?;
    }
    Ok(())
}

/// Integrates `config` to `t_end` or until a halting condition; writes the
/// run directory when `config.output` is set.
pub fn run(config: &RunConfig) -> Result<RunOutcome> {
    let start = Instant::now();
    config.validate()?;
    let constraints = config.params.constraints();
    log::info!("parameter constraints: {constraints:?}");
    let grid = config.grid()?;
    let (a0, v0) = initial_data(&grid, &config.a0, &config.v0, config.seed)?;
    let p = config.params;
    let xn = x_norms(&a0, &v0, config.delta, p.gamma)?;
    let bootstrap = Bootstrap::new(config.bootstrap_c, p.eps, p.gamma, xn.x1, xn.x2, xn.x3);
    let eps_zero = epsilon_zero(
        config.bootstrap_c,
        bootstrap.k0,
        config.delta,
        xn.x2,
        p.beta,
        p.gamma,
        config.eps_small,
    )
    .ok();

    let out = config.output.as_deref();
    if let Some(dir) = out {
        fs::create_dir_all(dir)?;
        write_json(&dir.join("config.json"), config)?;
    }

    let cfg = StepConfig {
        params: p,
        physics: config.physics,
        pressure: config.pressure,
    };
    let mut state = SolverState::new(a0.clone(), v0, config.delta, config.lambda, &cfg)?;
    let mut records = vec![DiagnosticsRecord::from_state(&state, &cfg)?];
    let mut violation = bootstrap.check(0.0, records[0].theta, records[0].psi);
    if let (Some(dir), Some(_)) = (out, config.snapshot_every) {
        write_snapshots(dir, 0, &state)?;
    }

    let mut verdict = Verdict::Completed;
    let mut step = 0usize;
    while state.t < config.t_end * (1.0 - 1e-12) {
        let target = ((step + 1) as f64 * config.dt).min(config.t_end);
        let dt = target - state.t;
        match state.step(dt, &cfg) {
            Ok(()) => {}
            Err(e) => match halt_verdict(&e) {
                Some(v) => {
                    log::warn!("run halted at t = {}: {e}", state.t);
                    verdict = v;
                    break;
                }
                None => return Err(e),
            },
        }
        state.t = target;
        step += 1;
        let rec = DiagnosticsRecord::from_state(&state, &cfg)?;
        if violation.is_none() {
            violation = bootstrap.check(rec.t, rec.theta, rec.psi);
            if let Some(v) = &violation {
                log::info!("bootstrap bound on {} first exceeded at t = {}", v.quantity, v.t);
            }
        }
        records.push(rec);
        if let (Some(dir), Some(k)) = (out, config.snapshot_every) {
            if step % k == 0 {
                write_snapshots(dir, step, &state)?;
            }
        }
    }

    let max_theta = records.iter().map(|r| r.theta).fold(0.0, f64::max);
    let max_psi = records.iter().map(|r| r.psi).fold(0.0, f64::max);
    let transport = transport_estimate_monitor(&a0, config.delta, config.lambda, &state.psi.a, &state.psi.v, &p)?;
    let pressure_monitor = pressure_estimate_monitor(&state.pressure, &p, max_theta, max_psi);
    let summary = RunSummary {
        constraints,
        x_norms: xn,
        bootstrap,
        epsilon_zero: eps_zero,
        steps: step,
        max_theta,
        max_psi,
        implied_c_theta: implied(max_theta, 4.0 * p.eps.powf(p.gamma) * xn.x2),
        implied_c_psi: implied(max_psi, 4.0 * (xn.x1 + xn.x3)),
        transport,
        pressure_monitor,
        wall_time_s: start.elapsed().as_secs_f64(),
    };
    let verdict = VerdictReport {
        verdict,
        t_halt: state.t,
        first_bootstrap_violation: violation,
    };
    if let Some(dir) = out {
        write_outputs(dir, &records, &verdict, &summary, &state)?;
    }
    Ok(RunOutcome {
        records,
        verdict,
        summary,
        state,
    })
}

fn write_outputs(
    dir: &Path,
    records: &[DiagnosticsRecord],
    verdict: &VerdictReport,
    summary: &RunSummary,
    state: &SolverState,
) -> Result<()> {
    let mut w = BufWriter::new(File::create(dir.join("diagnostics.csv"))?);
    writeln!(w, "{DIAGNOSTICS_HEADER}")?;
    for r in records {
        writeln!(w, "{}", r.csv_row())?;
    }
    w.flush()?;
    write_json(&dir.join("verdict.json"), verdict)?;
    write_json(&dir.join("summary.json"), summary)?;
    state.psi.a.write_csv(BufWriter::new(File::create(dir.join("cl_a.csv"))?), 0)?;
    for c in 0..3 {
        let f = File::create(dir.join(format!("cl_v{}.csv", c + 1)))?;
        state.psi.v.write_csv(BufWriter::new(f), c)?;
    }
    state.pressure.write_csv(BufWriter::new(File::create(dir.join("pressure.csv"))?))?;
    Ok(())
}
