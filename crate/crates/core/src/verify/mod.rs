//! Inequality suites and eps sweeps, with JSON reports under `reports/`.

mod report;
mod suites;
mod sweep;

pub use report::{write_report, CaseReport, IndexEntry, SuiteReport};
pub use suites::{default_laws, run_suite, Suite, SuiteOptions};
pub use sweep::{eps_sweep, fit_slope, report_dir, SweepReport, SweepRun};

use crate::error::Result;
use crate::par;

/// Runs several suites as independent jobs; reports come back in input order.
pub fn run_suites(suites: &[Suite], opts: &SuiteOptions, jobs: Option<usize>) -> Result<Vec<SuiteReport>> {
    par::with_jobs(jobs, || par::map_slice(suites, |s| run_suite(*s, opts)))
        .into_iter()
        .collect()
}
