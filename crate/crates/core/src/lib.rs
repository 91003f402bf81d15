//! Complex quantum trajectories of one-dimensional closed-form states, the
//! probability densities built from their velocity field, and independent
//! checks of the conservation structure.
//!
//! All quantities are dimensionless (ħ = m = ω = 1, positions in units of 1/α);
//! [`probability::PhysicalScale`] converts widths back to metres.

pub mod continuity;
pub mod error;
pub mod export;
pub mod grid;
pub mod probability;
pub mod quadrature;
pub mod svg;
pub mod trajectory;
pub mod verify;
pub mod wavefunction;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use wavefunction::{ComplexPoint, QuantumState, StateKind};
