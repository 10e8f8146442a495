//! Vortex structure of two-dimensional Ginzburg-Landau minimizers for a
//! nematic Q-tensor model with a radially inhomogeneous potential well.
//!
//! The crate computes discrete minimizers on square grids, radial and
//! Painleve-II reductions, and diagnostics that detect vortices and classify
//! the resulting phase.

pub mod analyze;
mod error;
pub mod fields;
mod functional;
pub mod io;
pub mod minimize;
pub mod painleve;
mod precond;
pub mod radial;
pub mod sweep;

pub use error::{Error, Result};
pub use functional::StepRule;
