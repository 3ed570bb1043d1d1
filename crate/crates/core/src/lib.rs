//! Classical and quantum mechanics of a spinning particle confined to the
//! centerline of a Möbius strip.
//!
//! - [`geometry`]: the strip embedding, tangent frames and normal holonomy.
//! - [`classical`]: canonical structure, constraint residuals and a
//!   leapfrog integrator with frame transport.
//! - [`quantum`]: effective mass, closed-form spectra and numerical
//!   eigensolvers for the 4π-periodic ring and the radial Coulomb problem.
//! - [`validation`]: the acceptance checks, runnable as a batch.

pub mod classical;
pub mod error;
pub mod format;
pub mod geometry;
pub mod quantum;
pub mod validation;

pub use error::{Error, Result};
