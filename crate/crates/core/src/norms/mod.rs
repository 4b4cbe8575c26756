//! Anisotropic Besov norms, the analytic phase, data norms and Chemin-Lerner
//! accumulators.

mod besov;
mod chemin_lerner;
mod phase;

pub use besov::{besov_norm, block_energies, interpolation_check, AnisoBesovIndex, BlockTable};
pub use chemin_lerner::{cl_accumulate, cl_norm, LpTime, NormAccumulator};
pub use phase::{apply_phase, check_phase, x_norms, PhaseState, XNorms, PHASE_LIMIT};
