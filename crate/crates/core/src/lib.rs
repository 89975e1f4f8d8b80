//! Bures-distance projections onto symmetry-invariant matrix cones.

pub mod apps;
pub mod error;
pub mod hermitian;
pub mod solver;
pub mod symmetry;

pub use error::{Error, Result};
