use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fourier;
use crate::grid::SpatialGrid;
use crate::initial::EPS_TAIL;
use crate::params::Params;
use crate::spectral::expm::exp_symbol_auto;
use crate::spectral::symbol::{build_symbol, CMat3};

/// Sampled 3x3 kernel. `entries[i][j]` holds the regular part of entry
/// `(i, j)` at the grid nodes; `delta_shifts[i][j]` lists Dirac masses as
/// `(location, weight)`.
#[derive(Debug, Clone, PartialEq)]
pub struct GreenMatrix {
    pub grid: SpatialGrid,
    pub t: f64,
    pub entries: [[Vec<f64>; 3]; 3],
    pub delta_shifts: [[Vec<(f64, f64)>; 3]; 3],
    /// Largest imaginary part dropped when transforming back.
    pub imag_residue: f64,
}

impl GreenMatrix {
    pub fn zeros(grid: SpatialGrid, t: f64) -> Self {
        let n = grid.len();
        GreenMatrix {
            grid,
            t,
            entries: std::array::from_fn(|_| std::array::from_fn(|_| vec![0.0; n])),
            delta_shifts: Default::default(),
            imag_residue: 0.0,
        }
    }

    /// Largest entrywise difference of the regular parts.
    pub fn max_abs_diff(&self, other: &GreenMatrix) -> Result<f64> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        let mut worst = 0.0f64;
        for i in 0..3 {
            for j in 0..3 {
                for (a, b) in self.entries[i][j].iter().zip(&other.entries[i][j]) {
                    worst = worst.max((a - b).abs());
                }
            }
        }
        Ok(worst)
    }

    pub fn peak(&self) -> f64 {
        self.entries
            .iter()
            .flatten()
            .flatten()
            .fold(0.0f64, |m, v| m.max(v.abs()))
    }
}

/// Symbol exponentials `exp(t Q(xi_k))` at all grid frequencies, with
/// entries that underflow set to zero.
pub fn symbol_exponentials(p: &Params, t: f64, grid: &SpatialGrid) -> Vec<CMat3> {
    grid.fourier_nodes()
        .par_iter()
        .map(|&xi| {
            if 2.0 * p.gamma_p * xi * xi * t > 745.0 {
                CMat3::zeros()
            } else {
                exp_symbol_auto(&build_symbol(xi, p), p, t)
            }
        })
        .collect()
}

/// Rejects grids that cannot resolve the heat kernel at time `t`.
pub fn check_resolution(p: &Params, t: f64, grid: &SpatialGrid) -> Result<()> {
    let required = p.diffusion_width(t) / 8.0;
    if grid.dx() > required {
        return Err(Error::GridUnderResolved {
            dx: grid.dx(),
            required,
        });
    }
    Ok(())
}

/// The matrix Green's function by inverse discrete Fourier transform of
/// `exp(t Q(xi))`.
pub fn green_function(p: &Params, t: f64, grid: &SpatialGrid) -> Result<GreenMatrix> {
    if !(t > 0.0) {
        return Err(Error::NonPositiveTime(t));
    }
    check_resolution(p, t, grid)?;
    let expo = symbol_exponentials(p, t, grid);
    let mut g = GreenMatrix::zeros(*grid, t);
    let mut residue = 0.0f64;
    for i in 0..3 {
        for j in 0..3 {
            let spec: Vec<Complex64> = expo.iter().map(|m| m[(i, j)]).collect();
            let (vals, res) = fourier::inverse(grid, &spec);
            residue = residue.max(res);
            g.entries[i][j] = vals;
        }
    }
    g.imag_residue = residue;
    let peak = g.peak();
    let n = grid.len();
    let boundary = g
        .entries
        .iter()
        .flatten()
        .map(|e| e[0].abs().max(e[n - 1].abs()))
        .fold(0.0, f64::max);
    if boundary > EPS_TAIL * peak {
        return Err(Error::TailNotDecayed { boundary });
    }
    Ok(g)
}
