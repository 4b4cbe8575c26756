//! Time integration of the rescaled system with the analytic-band and
//! `Psi` bookkeeping, plus the monitors built on a finished run.

mod config;
mod data;
mod monitor;
mod run;
mod state;

pub use config::{Physics, Profile, RunConfig};
pub use data::{initial_data, make_ill_prepared, scalar_profile, vector_profile, IllPrepared};
pub use monitor::{
    epsilon_zero, transport_estimate_monitor, Bootstrap, BootstrapViolation, TransportLine, TransportReport,
};
pub use run::{run, DiagnosticsRecord, RunOutcome, RunSummary, Verdict, VerdictReport, DIAGNOSTICS_HEADER};
pub use state::{
    div_residual, min_density, step, theta_dot, theta_dot_table, PsiAccumulators, PsiParts, SolverState, StepConfig,
    ThetaSample,
};
