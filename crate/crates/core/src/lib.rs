//! Anisotropic Littlewood-Paley toolkit on the periodic torus, together with a
//! pseudo-spectral solver for the rescaled inhomogeneous Navier-Stokes system
//! and numerical checks of the associated estimates.

pub mod error;
pub mod norms;
pub mod par;
pub mod paraproduct;
pub mod pressure;
pub mod solver;
pub mod semigroup;
pub mod spectral;
pub mod verify;

pub use error::{Error, Result};
pub use spectral::{Direction, Grid, PhysicalField, SpectralField3};
