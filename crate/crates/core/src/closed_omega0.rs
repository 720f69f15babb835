//! Closed-form solutions without driving (`omega = 0`): the two populations
//! drift apart at speed `2 delta` while spreading diffusively, and the
//! coherences decay at rate `2 gamma_z`.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::field::BlochField;
use crate::fourier;
use crate::grid::SpatialGrid;
use crate::initial::{mixture_heat, sample_initial, InitialCondition, Mixture, Profile};
use crate::params::Params;
use crate::specfun::gaussian;
use crate::spectral::green::GreenMatrix;

fn require_undriven(p: &Params) -> Result<()> {
    if p.omega != 0.0 {
        return Err(Error::WrongRegime(format!(
            "omega = {} but the closed forms need omega = 0",
            p.omega
        )));
    }
    Ok(())
}

/// Green's matrix at one point. The diagonal corner entries are the mean of
/// the two drifted heat kernels and the off-diagonal corners half their
/// difference, which is the overflow-free form of the cosh/sinh expression.
pub fn green_omega0(p: &Params, t: f64, x: f64) -> Result<[[f64; 3]; 3]> {
    require_undriven(p)?;
    if !(t > 0.0) {
        return Err(Error::NonPositiveTime(t));
    }
    let var = 4.0 * p.gamma_p * t;
    let right = gaussian(x - p.drift(t), var);
    let left = gaussian(x + p.drift(t), var);
    let even = 0.5 * (right + left);
    let odd = 0.5 * (right - left);
    let mid = gaussian(x, var) * (-2.0 * p.gamma_z * t).exp();
    Ok([[even, 0.0, odd], [0.0, mid, 0.0], [odd, 0.0, even]])
}

/// [`green_omega0`] sampled on a grid.
pub fn green_omega0_grid(p: &Params, t: f64, grid: &SpatialGrid) -> Result<GreenMatrix> {
    let mut g = GreenMatrix::zeros(*grid, t);
    for (k, x) in grid.nodes().into_iter().enumerate() {
        let m = green_omega0(p, t, x)?;
        for i in 0..3 {
            for j in 0..3 {
                g.entries[i][j][k] = m[i][j];
            }
        }
    }
    Ok(g)
}

/// Real coherence at time `t`: `exp(-2 gamma_z t)` times the heat-propagated
/// initial real coherence. This component is decoupled in every regime.
pub fn solve_cr(ic: &InitialCondition, t: f64, grid: &SpatialGrid, p: &Params) -> Result<Vec<f64>> {
    let damp = (-2.0 * p.gamma_z * t).exp();
    match ic.profiles() {
        Some(b) => Ok(grid
            .nodes()
            .iter()
            .map(|&x| damp * mixture_heat(&b.c_r, t, x, p.gamma_p))
            .collect()),
        None => {
            let c0: Vec<f64> = sample_initial(ic, grid)?
                .rho12
                .iter()
                .map(|z| z.re)
                .collect();
            if t == 0.0 {
                return Ok(c0);
            }
            let gp = p.gamma_p;
            Ok(fourier::apply_multiplier(grid, &c0, |xi| {
                (damp * (-2.0 * gp * xi * xi * t).exp()).into()
            }))
        }
    }
}

/// Populations `(rho11, rho22)` at `(t, x)` for diagonal mixtures of one
/// profile family.
fn drifted_pair(p: &Params, weight: f64, f1: Profile, f2: Profile, t: f64, x: f64) -> (f64, f64) {
    let s = p.drift(t);
    (
        weight * f1.heat(t, x - s, p.gamma_p),
        (1.0 - weight) * f2.heat(t, x + s, p.gamma_p),
    )
}

fn to_pq((r11, r22): (f64, f64)) -> (f64, f64) {
    (r11 + r22, r11 - r22)
}

/// Probability density and population imbalance for Gaussian populations:
/// drifted normals with variances `sigma_i^2 + 4 gamma_p t`.
pub fn gaussian_solution(p: &Params, ic: &InitialCondition, t: f64, x: f64) -> Result<(f64, f64)> {
    require_undriven(p)?;
    match *ic {
        InitialCondition::GaussianMixture {
            p: w,
            sigma1,
            sigma2,
        } => Ok(to_pq(drifted_pair(
            p,
            w,
            Profile::Gaussian { sigma: sigma1 },
            Profile::Gaussian { sigma: sigma2 },
            t,
            x,
        ))),
        _ => Err(Error::WrongRegime("expected a Gaussian mixture".into())),
    }
}

/// As [`gaussian_solution`] for Laplace populations (erfc forms).
pub fn laplace_solution(p: &Params, ic: &InitialCondition, t: f64, x: f64) -> Result<(f64, f64)> {
    require_undriven(p)?;
    match *ic {
        InitialCondition::LaplaceMixture { p: w, a, b } => Ok(to_pq(drifted_pair(
            p,
            w,
            Profile::Laplace { scale: a },
            Profile::Laplace { scale: b },
            t,
            x,
        ))),
        _ => Err(Error::WrongRegime("expected a Laplace mixture".into())),
    }
}

/// As [`gaussian_solution`] for uniform populations (erf differences).
pub fn uniform_solution(p: &Params, ic: &InitialCondition, t: f64, x: f64) -> Result<(f64, f64)> {
    require_undriven(p)?;
    match *ic {
        InitialCondition::UniformMixture { p: w, a, b } => Ok(to_pq(drifted_pair(
            p,
            w,
            Profile::Uniform { half_width: a },
            Profile::Uniform { half_width: b },
            t,
            x,
        ))),
        _ => Err(Error::WrongRegime("expected a uniform mixture".into())),
    }
}

/// Full field for any initial condition.
pub fn solve_omega0(
    p: &Params,
    ic: &InitialCondition,
    t: f64,
    grid: &SpatialGrid,
) -> Result<BlochField> {
    require_undriven(p)?;
    if t < 0.0 {
        return Err(Error::NonPositiveTime(t));
    }
    let u0 = sample_initial(ic, grid)?.to_bloch();
    if t == 0.0 {
        return Ok(u0);
    }
    let s = p.drift(t);
    let damp = (-2.0 * p.gamma_z * t).exp();
    let gp = p.gamma_p;
    let (r11, r22, ci) = match ic.profiles() {
        Some(b) => {
            let half = |m: &Mixture, sign: f64| -> Mixture {
                m.iter()
                    .map(|(w, f)| (0.5 * w, *f))
                    .chain(b.rho_minus.iter().map(|(w, f)| (0.5 * sign * w, *f)))
                    .collect()
            };
            let m11 = half(&b.rho_plus, 1.0);
            let m22 = half(&b.rho_plus, -1.0);
            let x = grid.nodes();
            (
                x.iter()
                    .map(|&x| mixture_heat(&m11, t, x - s, gp))
                    .collect(),
                x.iter()
                    .map(|&x| mixture_heat(&m22, t, x + s, gp))
                    .collect::<Vec<_>>(),
                x.iter()
                    .map(|&x| damp * mixture_heat(&b.c_i, t, x, gp))
                    .collect(),
            )
        }
        None => {
            let d = u0.to_density();
            let heat = move |xi: f64| (-2.0 * gp * xi * xi * t).exp();
            let shift =
                |sign: f64| move |xi: f64| heat(xi) * Complex64::new(0.0, -sign * s * xi).exp();
            (
                fourier::apply_multiplier(grid, &d.rho11, shift(1.0)),
                fourier::apply_multiplier(grid, &d.rho22, shift(-1.0)),
                fourier::apply_multiplier(grid, &u0.c_i, |xi| (damp * heat(xi)).into()),
            )
        }
    };
    let rho_plus = r11.iter().zip(&r22).map(|(a, b)| a + b).collect();
    let rho_minus = r11.iter().zip(&r22).map(|(a, b)| a - b).collect();
    let c_r = solve_cr(ic, t, grid, p)?;
    BlochField::new(*grid, t, rho_plus, ci, rho_minus, c_r)
}
