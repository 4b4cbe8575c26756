//! Periodic spectral representation, dyadic cutoffs and block projectors.

pub mod cutoff;
mod fft;
pub mod field;
pub mod grid;
pub mod ops;
pub mod random;
pub mod snapshot;

pub use cutoff::{build_cutoffs, BandHits, CutoffPair};
pub use field::{PhysicalField, SpectralField3};
pub use grid::{BandRange, Grid};
pub use ops::{Direction, Projector};
