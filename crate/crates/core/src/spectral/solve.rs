use num_complex::Complex64;

use crate::closed_omega0::solve_cr;
use crate::error::{Error, Result};
use crate::field::BlochField;
use crate::fourier;
use crate::grid::SpatialGrid;
use crate::initial::{mixture_fourier, sample_initial, InitialCondition, EPS_TAIL};
use crate::params::Params;
use crate::spectral::green::{check_resolution, symbol_exponentials};

/// Transforms of the coupled initial components `(rho_plus, c_i, rho_minus)`
/// at the grid frequencies.
pub fn initial_spectra(ic: &InitialCondition, grid: &SpatialGrid) -> Result<[Vec<Complex64>; 3]> {
    match ic.profiles() {
        Some(b) => {
            let xi = grid.fourier_nodes();
            let tr = |m| {
                xi.iter()
                    .map(|&k| mixture_fourier(m, k))
                    .collect::<Vec<_>>()
            };
            Ok([tr(&b.rho_plus), tr(&b.c_i), tr(&b.rho_minus)])
        }
        None => {
            let u = sample_initial(ic, grid)?.to_bloch();
            Ok([
                fourier::forward(grid, &u.rho_plus),
                fourier::forward(grid, &u.c_i),
                fourier::forward(grid, &u.rho_minus),
            ])
        }
    }
}

/// Rejects grids on which the solution at time `t` would reach the boundary.
pub fn check_extent(p: &Params, ic: &InitialCondition, t: f64, grid: &SpatialGrid) -> Result<()> {
    if matches!(ic, InitialCondition::Custom(_)) {
        return Ok(());
    }
    let r = grid.half_width() - p.drift(t) - 6.0 * p.diffusion_width(t);
    let tail = if r > 0.0 { ic.tail_mass(r) } else { 1.0 };
    if tail > EPS_TAIL {
        return Err(Error::DomainTooNarrow {
            tail_mass: tail,
            tolerance: EPS_TAIL,
        });
    }
    Ok(())
}

/// Solution at time `t` computed as `exp(t Q) u0_hat` followed by one
/// inverse transform per component.
pub fn solve(p: &Params, ic: &InitialCondition, t: f64, grid: &SpatialGrid) -> Result<BlochField> {
    if t < 0.0 {
        return Err(Error::NonPositiveTime(t));
    }
    let u0 = sample_initial(ic, grid)?.to_bloch();
    if t == 0.0 {
        return Ok(u0);
    }
    check_resolution(p, t, grid)?;
    check_extent(p, ic, t, grid)?;
    let spectra = initial_spectra(ic, grid)?;
    let expo = symbol_exponentials(p, t, grid);
    let mut out = BlochField::zeros(*grid, t);
    for (i, target) in out.coupled_mut().into_iter().enumerate() {
        let spec: Vec<Complex64> = expo
            .iter()
            .enumerate()
            .map(|(k, m)| (0..3).map(|j| m[(i, j)] * spectra[j][k]).sum())
            .collect();
        *target = fourier::inverse(grid, &spec).0;
    }
    out.c_r = solve_cr(ic, t, grid, p)?;
    Ok(out)
}
