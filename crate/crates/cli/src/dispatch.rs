use oqbm::closed_delta0::solve_delta0;
use oqbm::closed_gammaz0::solve_laplace_coherent;
use oqbm::closed_omega0::solve_omega0;
use oqbm::initial::{required_half_width, Profile, EPS_TAIL};
use oqbm::spectral;
use oqbm::{BlochField, InitialCondition, Params, SpatialGrid};
use rayon::prelude::*;
use serde::Serialize;

use crate::config::RunConfig;
use crate::error::CliError;

/// Budget for the trapezoid error that kinks in the initial data contribute
/// to the mass at `t = 0`.
pub const KINK_MASS_TOL: f64 = 6e-8;

/// Default largest spacing.
pub const BASE_DX: f64 = 1.0 / 64.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Regime {
    /// `omega = 0` only.
    Undriven,
    /// `delta = 0` only.
    Uncoupled,
    /// `gamma_z = 0` only.
    Undephased,
    General,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Route {
    ClosedOmega0,
    ClosedDelta0,
    ClosedGammaz0,
    Spectral,
}

pub fn regime(p: &Params) -> Regime {
    match (p.omega == 0.0, p.delta == 0.0, p.gamma_z == 0.0) {
        (true, false, false) => Regime::Undriven,
        (false, true, false) => Regime::Uncoupled,
        (false, false, true) => Regime::Undephased,
        _ => Regime::General,
    }
}

/// Closed forms where they apply. Without dephasing only the
/// Laplace-coherent state with matching scale has one.
pub fn route(p: &Params, ic: &InitialCondition) -> Route {
    match regime(p) {
        Regime::Undriven => Route::ClosedOmega0,
        Regime::Uncoupled => Route::ClosedDelta0,
        Regime::Undephased => match *ic {
            InitialCondition::LaplaceCoherent { scale, .. }
                if (scale - p.delta / p.omega).abs() <= 1e-12 * scale =>
            {
                Route::ClosedGammaz0
            }
            _ => Route::Spectral,
        },
        Regime::General => Route::Spectral,
    }
}

pub fn solve_with(
    route: Route,
    p: &Params,
    ic: &InitialCondition,
    t: f64,
    grid: &SpatialGrid,
) -> oqbm::Result<BlochField> {
    match route {
        Route::ClosedOmega0 => solve_omega0(p, ic, t, grid),
        Route::ClosedDelta0 => solve_delta0(p, ic, t, grid),
        Route::ClosedGammaz0 => solve_laplace_coherent(p, ic, t, grid),
        Route::Spectral => spectral::solve(p, ic, t, grid),
    }
}

/// Largest spacing allowed by the initial data: Gaussians need eight nodes
/// per width, and Laplace kinks must keep the trapezoid mass error within
/// [`KINK_MASS_TOL`].
fn data_spacing(ic: &InitialCondition) -> f64 {
    let Some(prof) = ic.profiles() else {
        return BASE_DX;
    };
    let mut dx = BASE_DX;
    let mut kinks = 0.0;
    for (w, f) in &prof.rho_plus {
        match *f {
            Profile::Gaussian { sigma }
            | Profile::GaussianCos { sigma, .. }
            | Profile::GaussianSin { sigma, .. } => dx = dx.min(sigma / 8.0),
            Profile::Laplace { scale } => kinks += w.abs() / (scale * scale),
            Profile::Uniform { half_width } => dx = dx.min(half_width / 8.0),
        }
    }
    if kinks > 0.0 {
        dx = dx.min((12.0 * KINK_MASS_TOL / kinks).sqrt());
    }
    dx
}

/// Dyadic grid wide enough for the largest snapshot time and fine enough
/// for the data and, on the spectral route, for the smallest positive time.
pub fn auto_grid(cfg: &RunConfig, route: Route) -> Result<SpatialGrid, CliError> {
    if let (Some(l), Some(n)) = (cfg.half_width, cfg.n_points) {
        return Ok(SpatialGrid::new(l, n)?);
    }
    let p = &cfg.params;
    let half = required_half_width(&cfg.ic, p, cfg.t_max(), EPS_TAIL);
    let mut dx = data_spacing(&cfg.ic);
    if route == Route::Spectral {
        if let Some(t) = cfg
            .times
            .iter()
            .copied()
            .filter(|t| *t > 0.0)
            .reduce(f64::min)
        {
            dx = dx.min(p.diffusion_width(t) / 8.0);
        }
    }
    Ok(SpatialGrid::dyadic(half, dx)?)
}

/// Computed snapshots of one configuration.
#[derive(Debug, Clone)]
pub struct Run {
    pub config: RunConfig,
    pub regime: Regime,
    pub route: Route,
    pub grid: SpatialGrid,
    pub snapshots: Vec<BlochField>,
}

pub fn compute(cfg: &RunConfig) -> Result<Run, CliError> {
    cfg.validate()?;
    let route = route(&cfg.params, &cfg.ic);
    let grid = auto_grid(cfg, route)?;
    let snapshots = cfg
        .times
        .par_iter()
        .map(|&t| solve_with(route, &cfg.params, &cfg.ic, t, &grid))
        .collect::<oqbm::Result<Vec<_>>>()?;
    Ok(Run {
        config: cfg.clone(),
        regime: regime(&cfg.params),
        route,
        grid,
        snapshots,
    })
}
