//! General solution by diagonalising the Fourier symbol of the coupled
//! system and transforming back on a grid.

pub mod eigen;
pub mod expm;
pub mod green;
pub mod solve;
pub mod symbol;

pub use eigen::{
    cardano_eigenvalues, eigensystem, numeric_eigenvalues, stability_check, EigenSystem,
    StabilityReport,
};
pub use expm::{exp_by_squaring, exp_symbol, exp_symbol_auto};
pub use green::{green_function, GreenMatrix};
pub use solve::solve;
pub use symbol::{build_symbol, char_coeffs, char_poly, SymbolMatrix};
