use nalgebra::Vector3;
use num_complex::Complex64;

use crate::params::Params;
use crate::spectral::eigen::{eigensystem, EigenSystem};
use crate::spectral::symbol::{CMat3, SymbolMatrix};

/// `exp(t Q)` through the eigenbasis when one is supplied, otherwise by
/// scaling and squaring.
pub fn exp_symbol(sm: &SymbolMatrix, t: f64, es: Option<&EigenSystem>) -> CMat3 {
    if t == 0.0 {
        return CMat3::identity();
    }
    match es {
        Some(es) => {
            let d = Vector3::from(es.lambdas.map(|l| (l * t).exp()));
            es.vectors * CMat3::from_diagonal(&d) * es.inverse
        }
        None => exp_by_squaring(sm, t),
    }
}

/// Padé scaling-and-squaring exponential of `t Q`.
pub fn exp_by_squaring(sm: &SymbolMatrix, t: f64) -> CMat3 {
    (sm.q * Complex64::new(t, 0.0)).exp()
}

/// `exp(t Q)`, diagonalising when the eigenbasis is well conditioned.
pub fn exp_symbol_auto(sm: &SymbolMatrix, p: &Params, t: f64) -> CMat3 {
    match eigensystem(sm, p) {
        Ok(es) => exp_symbol(sm, t, Some(&es)),
        Err(_) => exp_by_squaring(sm, t),
    }
}
