//! Reference solvers used to check the closed forms and the spectral route:
//! a finite-difference integrator of the density-matrix equations and a
//! trapezoid inverse Fourier transform of the symbol exponential.
//!
//! Nothing here calls the special functions, the FFT path or the closed
//! forms of `oqbm`; only its data types are shared.

pub mod fd;
pub mod initial;
pub mod quad;

pub use fd::{
    auto_step, fd_integrate, fd_snapshots, spatial_richardson, FdSnapshot, SpatialEstimate,
};
pub use initial::initial_density;
pub use quad::{
    expm, quad_inverse_fourier, quad_inverse_scalar, symbol, symbol_exponential, CMat, QuadResult,
};
