//! Exact and spectral solutions of the open quantum Brownian motion master
//! equation on the real line.

pub mod closed_delta0;
pub mod closed_gammaz0;
pub mod closed_omega0;
pub mod error;
pub mod field;
pub mod fourier;
pub mod grid;
pub mod initial;
pub mod params;
pub mod quadrature;
pub mod specfun;
pub mod spectral;

pub use error::{Error, Result};
pub use field::{from_bloch, to_bloch, BlochField, DensityField};
pub use grid::SpatialGrid;
pub use initial::{sample_initial, InitialCondition};
pub use params::Params;
