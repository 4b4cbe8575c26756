//! Bony decompositions, product-law fits and the density composition `G`.

mod bony;
mod compose;
mod laws;

pub use bony::{bony, double_bony, paraproduct_bands, BonyPieces, DoubleBony, Family};
pub use compose::{compose_g, g_smallness_check, GCheck, DEFAULT_SMALLNESS};
pub use laws::{law_ratio, product_law_fit, FitOptions, FitReport, ProductLaw};
pub(crate) use laws::median;
