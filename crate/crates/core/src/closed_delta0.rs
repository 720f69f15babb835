//! Closed-form solutions without coin coupling (`delta = 0`). Every entry of
//! the Green's matrix is the heat kernel times a function of time, whose form
//! depends on the sign of `gamma_z^2 - 4 omega^2`.

use std::f64::consts::PI;

use crate::closed_omega0::solve_cr;
use crate::error::{Error, Result};
use crate::field::BlochField;
use crate::fourier;
use crate::grid::SpatialGrid;
use crate::initial::{mixture_heat, sample_initial, InitialCondition};
use crate::params::Params;
use crate::specfun::gaussian;
use crate::spectral::green::GreenMatrix;

/// Relative window around `gamma_z = 2 omega` treated as critical.
pub const TOL_CRIT: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DampingKind {
    /// `gamma_z > 2 omega`.
    Over,
    /// `gamma_z < 2 omega`.
    Under,
    /// `gamma_z = 2 omega` within [`TOL_CRIT`].
    Critical,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DampingRegime {
    pub kind: DampingKind,
    /// `sqrt(|gamma_z^2 - 4 omega^2|)`.
    pub omega_pm: f64,
}

impl DampingRegime {
    pub fn classify(p: &Params) -> Self {
        let (gz, w2) = (p.gamma_z, 2.0 * p.omega);
        let omega_pm = (gz * gz - w2 * w2).abs().sqrt();
        let kind = if (gz - w2).abs() <= TOL_CRIT * (gz + w2) {
            DampingKind::Critical
        } else if gz > w2 {
            DampingKind::Over
        } else {
            DampingKind::Under
        };
        DampingRegime { kind, omega_pm }
    }
}

fn require_uncoupled(p: &Params) -> Result<()> {
    if p.delta != 0.0 {
        return Err(Error::WrongRegime(format!(
            "delta = {} but the closed forms need delta = 0",
            p.delta
        )));
    }
    Ok(())
}

/// `(C, S)` with `C = cosh(sqrt(d) t)` and `S = sinh(sqrt(d) t) / sqrt(d)`,
/// continued analytically to `d <= 0`.
fn even_odd(d: f64, t: f64, kind: DampingKind) -> (f64, f64) {
    let y = d * t * t;
    if kind == DampingKind::Critical {
        return (1.0, t);
    }
    if y.abs() < 1.0 {
        let (mut c, mut s) = (1.0, 1.0);
        let (mut tc, mut ts) = (1.0, 1.0);
        for k in 1..30 {
            let k = k as f64;
            tc *= y / ((2.0 * k - 1.0) * (2.0 * k));
            ts *= y / ((2.0 * k) * (2.0 * k + 1.0));
            c += tc;
            s += ts;
            if tc.abs() < 1e-18 && ts.abs() < 1e-18 {
                break;
            }
        }
        return (c, t * s);
    }
    let r = d.abs().sqrt();
    if d > 0.0 {
        ((r * t).cosh(), (r * t).sinh() / r)
    } else {
        ((r * t).cos(), (r * t).sin() / r)
    }
}

/// The constant-in-`x` factor `M(t)` with `G(t, x) = g(t, x) M(t)`.
pub fn internal_matrix(p: &Params, t: f64) -> [[f64; 3]; 3] {
    let regime = DampingRegime::classify(p);
    let gz = p.gamma_z;
    let d = gz * gz - 4.0 * p.omega * p.omega;
    let (c, s) = even_odd(d, t, regime.kind);
    let e = (-gz * t).exp();
    [
        [1.0, 0.0, 0.0],
        [0.0, e * (c - gz * s), p.omega * e * s],
        [0.0, -4.0 * p.omega * e * s, e * (c + gz * s)],
    ]
}

/// Green's matrix at one point.
pub fn green_delta0(p: &Params, t: f64, x: f64) -> Result<[[f64; 3]; 3]> {
    require_uncoupled(p)?;
    if !(t > 0.0) {
        return Err(Error::NonPositiveTime(t));
    }
    let g = gaussian(x, 4.0 * p.gamma_p * t);
    Ok(internal_matrix(p, t).map(|row| row.map(|v| g * v)))
}

/// [`green_delta0`] sampled on a grid.
pub fn green_delta0_grid(p: &Params, t: f64, grid: &SpatialGrid) -> Result<GreenMatrix> {
    require_uncoupled(p)?;
    if !(t > 0.0) {
        return Err(Error::NonPositiveTime(t));
    }
    let m = internal_matrix(p, t);
    let g: Vec<f64> = grid
        .nodes()
        .iter()
        .map(|&x| gaussian(x, 4.0 * p.gamma_p * t))
        .collect();
    let mut out = GreenMatrix::zeros(*grid, t);
    for i in 0..3 {
        for j in 0..3 {
            out.entries[i][j] = g.iter().map(|v| v * m[i][j]).collect();
        }
    }
    Ok(out)
}

fn require_underdamped(p: &Params) -> Result<DampingRegime> {
    require_uncoupled(p)?;
    let r = DampingRegime::classify(p);
    if r.kind != DampingKind::Under {
        return Err(Error::WrongRegime(
            "the imbalance forms need gamma_z < 2 omega".into(),
        ));
    }
    Ok(r)
}

/// Time factors `(A, B)` of the imbalance `Q = A (g * Im psi12) + B (g * (psi11 - psi22))`.
fn imbalance_factors(p: &Params, w: f64, t: f64) -> (f64, f64) {
    let e = (-p.gamma_z * t).exp();
    let (s, c) = (w * t).sin_cos();
    (-4.0 * p.omega / w * e * s, e * (c + p.gamma_z / w * s))
}

/// Heat-kernel convolution of sampled data evaluated at an arbitrary point.
fn heat_of_samples(grid: &SpatialGrid, values: &[f64], t: f64, gamma_p: f64, x: f64) -> f64 {
    if t == 0.0 {
        let j = grid.nearest(x).unwrap_or(0);
        return values[j];
    }
    let var = 4.0 * gamma_p * t;
    let terms: Vec<f64> = grid
        .nodes()
        .iter()
        .zip(values)
        .map(|(y, v)| gaussian(x - y, var) * v)
        .collect();
    grid.trapezoid(&terms)
}

/// Population imbalance for any initial condition in the underdamped
/// regime. Uses the explicit Gaussian forms when they apply.
pub fn imbalance_general(p: &Params, ic: &InitialCondition, t: f64, x: f64) -> Result<f64> {
    let regime = require_underdamped(p)?;
    match ic {
        InitialCondition::GaussianMixture { .. } => return imbalance_gaussian(p, ic, t, x),
        InitialCondition::GaussianCoherent { .. } => return imbalance_coherent(p, ic, t, x),
        _ => {}
    }
    let (a, b) = imbalance_factors(p, regime.omega_pm, t);
    match ic.profiles() {
        Some(prof) => {
            let ci = mixture_heat(&prof.c_i, t, x, p.gamma_p);
            let rm = mixture_heat(&prof.rho_minus, t, x, p.gamma_p);
            Ok(a * ci + b * rm)
        }
        None => {
            let InitialCondition::Custom(d) = ic else {
                unreachable!()
            };
            let u = d.to_bloch();
            let ci = heat_of_samples(&d.grid, &u.c_i, t, p.gamma_p, x);
            let rm = heat_of_samples(&d.grid, &u.rho_minus, t, p.gamma_p, x);
            Ok(a * ci + b * rm)
        }
    }
}

/// Explicit imbalance for diagonal Gaussian populations: a time factor
/// `exp(-gamma_z t) (gamma_z sin + omega_- cos) / omega_-` times the
/// difference of the spread populations.
pub fn imbalance_gaussian(p: &Params, ic: &InitialCondition, t: f64, x: f64) -> Result<f64> {
    let regime = require_underdamped(p)?;
    let InitialCondition::GaussianMixture {
        p: w,
        sigma1,
        sigma2,
    } = *ic
    else {
        return Err(Error::WrongRegime("expected a Gaussian mixture".into()));
    };
    let om = regime.omega_pm;
    let (s, c) = (om * t).sin_cos();
    let factor = (-p.gamma_z * t).exp() * (p.gamma_z * s + om * c) / ((2.0 * PI).sqrt() * om);
    let v1 = 4.0 * p.gamma_p * t + sigma1 * sigma1;
    let v2 = 4.0 * p.gamma_p * t + sigma2 * sigma2;
    let spread = w * (-x * x / (2.0 * v1)).exp() / v1.sqrt()
        - (1.0 - w) * (-x * x / (2.0 * v2)).exp() / v2.sqrt();
    Ok(factor * spread)
}

/// Explicit imbalance for the Gaussian coherent initial condition.
pub fn imbalance_coherent(p: &Params, ic: &InitialCondition, t: f64, x: f64) -> Result<f64> {
    let regime = require_underdamped(p)?;
    let InitialCondition::GaussianCoherent { p: w, mu, k, sigma } = *ic else {
        return Err(Error::WrongRegime(
            "expected a Gaussian coherent state".into(),
        ));
    };
    let om = regime.omega_pm;
    let (s, c) = (om * t).sin_cos();
    let s2 = sigma * sigma;
    let v = 4.0 * p.gamma_p * t + s2;
    let norm = om * (2.0 * PI * v).sqrt();
    let e = (-p.gamma_z * t).exp();
    let coherence = -4.0 * p.omega * mu * (w * (1.0 - w)).sqrt() * e * s / norm
        * (-(4.0 * p.gamma_p * k * k * s2 * t + x * x) / (2.0 * v)).exp()
        * (k * x * s2 / v).sin();
    let population =
        (2.0 * w - 1.0) * e * (p.gamma_z * s + om * c) / norm * (-x * x / (2.0 * v)).exp();
    Ok(coherence + population)
}

/// Times `tau_n = (n pi - arctan(omega_- / gamma_z)) / omega_-`, `n = 1..=n_max`,
/// at which the population factor of the imbalance vanishes.
pub fn imbalance_zeros(p: &Params, n_max: usize) -> Result<Vec<f64>> {
    let regime = require_underdamped(p)?;
    let w = regime.omega_pm;
    let phase = w.atan2(p.gamma_z);
    let taus: Vec<f64> = (1..=n_max).map(|n| (n as f64 * PI - phase) / w).collect();
    for &tau in &taus {
        let (s, c) = (w * tau).sin_cos();
        let residual = (p.gamma_z * s + w * c).abs();
        if residual >= 1e-12 * w * (1.0 + tau * w) {
            return Err(Error::QuadratureNotConverged {
                order: 0,
                change: residual,
            });
        }
    }
    Ok(taus)
}

/// Probability density: the heat-propagated initial trace.
pub fn density_delta0(p: &Params, ic: &InitialCondition, t: f64, x: f64) -> Result<f64> {
    require_uncoupled(p)?;
    match ic.profiles() {
        Some(prof) => Ok(mixture_heat(&prof.rho_plus, t, x, p.gamma_p)),
        None => {
            let InitialCondition::Custom(d) = ic else {
                unreachable!()
            };
            Ok(heat_of_samples(&d.grid, &d.probability(), t, p.gamma_p, x))
        }
    }
}

/// Full field in any damping regime.
pub fn solve_delta0(
    p: &Params,
    ic: &InitialCondition,
    t: f64,
    grid: &SpatialGrid,
) -> Result<BlochField> {
    require_uncoupled(p)?;
    if t < 0.0 {
        return Err(Error::NonPositiveTime(t));
    }
    let u0 = sample_initial(ic, grid)?.to_bloch();
    if t == 0.0 {
        return Ok(u0);
    }
    let gp = p.gamma_p;
    let [hp, hi, hm]: [Vec<f64>; 3] = match ic.profiles() {
        Some(prof) => {
            let x = grid.nodes();
            let heat = |m| {
                x.iter()
                    .map(|&x| mixture_heat(m, t, x, gp))
                    .collect::<Vec<_>>()
            };
            [heat(&prof.rho_plus), heat(&prof.c_i), heat(&prof.rho_minus)]
        }
        None => {
            let mult = |xi: f64| (-2.0 * gp * xi * xi * t).exp().into();
            [
                fourier::apply_multiplier(grid, &u0.rho_plus, mult),
                fourier::apply_multiplier(grid, &u0.c_i, mult),
                fourier::apply_multiplier(grid, &u0.rho_minus, mult),
            ]
        }
    };
    let m = internal_matrix(p, t);
    let c_i = hi
        .iter()
        .zip(&hm)
        .map(|(a, b)| m[1][1] * a + m[1][2] * b)
        .collect();
    let rho_minus = hi
        .iter()
        .zip(&hm)
        .map(|(a, b)| m[2][1] * a + m[2][2] * b)
        .collect();
    BlochField::new(*grid, t, hp, c_i, rho_minus, solve_cr(ic, t, grid, p)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fig6() -> Params {
        Params::new(1e-3, 1e-3, 0.0, 1e-2).unwrap()
    }

    #[test]
    fn regimes_are_classified() {
        let k = |gz: f64| DampingRegime::classify(&Params::new(1.0, gz, 0.0, 0.5).unwrap()).kind;
        assert_eq!(k(0.5), DampingKind::Under);
        assert_eq!(k(1.0), DampingKind::Critical);
        assert_eq!(k(2.0), DampingKind::Over);
        assert_eq!(k(1.0 + 1e-10), DampingKind::Critical);
    }

    #[test]
    fn undriven_limit() {
        let p = Params::new(1.0, 0.3, 0.0, 0.0).unwrap();
        let m = internal_matrix(&p, 2.0);
        assert!((m[1][1] - (-1.2f64).exp()).abs() < 1e-15);
        assert!((m[2][2] - 1.0).abs() < 1e-15);
        assert_eq!(m[1][2], 0.0);
    }

    #[test]
    fn critical_matrix_matches_closed_entry() {
        let p = Params::new(1.0, 1.0, 0.0, 0.5).unwrap();
        let t = 1.7;
        let m = internal_matrix(&p, t);
        assert!((m[1][1] - (1.0 - t) * (-t).exp()).abs() < 1e-15);
    }

    #[test]
    fn continuity_across_critical_point() {
        let t = 25.0;
        let crit = internal_matrix(&Params::new(1e-3, 0.02, 0.0, 0.01).unwrap(), t);
        for gz in [0.02 - 1e-6, 0.02 + 1e-6] {
            let m = internal_matrix(&Params::new(1e-3, gz, 0.0, 0.01).unwrap(), t);
            for i in 0..3 {
                for j in 0..3 {
                    assert!((m[i][j] - crit[i][j]).abs() < 1e-4, "{gz} {i}{j}");
                }
            }
        }
    }

    #[test]
    fn first_zero_time() {
        let taus = imbalance_zeros(&fig6(), 3).unwrap();
        let w = (399.0f64).sqrt() * 1e-3;
        let closed =
            1000.0 * (399.0f64).sqrt() / 399.0 * (PI / 2.0 + (1.0 / (399.0f64).sqrt()).atan());
        assert!((taus[0] - closed).abs() < 1e-9 * closed);
        assert!((taus[0] - 81.14235059009694).abs() < 1e-9);
        assert!((taus[1] - taus[0] - PI / w).abs() < 1e-9);
    }

    #[test]
    fn imbalance_vanishes_at_zero_times() {
        let ic = InitialCondition::GaussianMixture {
            p: 0.75,
            sigma1: 2.0,
            sigma2: 1.0,
        };
        let tau = imbalance_zeros(&fig6(), 1).unwrap()[0];
        let peak = imbalance_gaussian(&fig6(), &ic, 0.0, 0.0).unwrap().abs();
        for x in [-3.0, 0.0, 1.5] {
            assert!(imbalance_gaussian(&fig6(), &ic, tau, x).unwrap().abs() < 1e-12 * peak);
        }
    }

    #[test]
    fn explicit_forms_match_profile_route() {
        let p = Params::new(1e-2, 0.1, 0.0, 0.3).unwrap();
        let regime = DampingRegime::classify(&p);
        let cases = [
            InitialCondition::GaussianMixture {
                p: 0.75,
                sigma1: 2.0,
                sigma2: 1.0,
            },
            InitialCondition::GaussianCoherent {
                p: 0.75,
                mu: 0.8,
                k: 1.0,
                sigma: 1.0,
            },
        ];
        for ic in cases {
            let prof = ic.profiles().unwrap();
            for (t, x) in [(3.0, 0.4), (7.0, -1.2)] {
                let (a, b) = imbalance_factors(&p, regime.omega_pm, t);
                let generic = a * mixture_heat(&prof.c_i, t, x, p.gamma_p)
                    + b * mixture_heat(&prof.rho_minus, t, x, p.gamma_p);
                let closed = imbalance_general(&p, &ic, t, x).unwrap();
                assert!((generic - closed).abs() < 1e-15, "{ic:?}");
            }
        }
    }

    #[test]
    fn overdamped_imbalance_is_rejected() {
        let p = Params::new(1e-3, 1.0, 0.0, 0.1).unwrap();
        assert!(matches!(imbalance_zeros(&p, 1), Err(Error::WrongRegime(_))));
    }

    #[test]
    fn density_is_spread_mixture() {
        let ic = InitialCondition::GaussianMixture {
            p: 0.75,
            sigma1: 2.0,
            sigma2: 1.0,
        };
        let t = 100.0;
        let v = density_delta0(&fig6(), &ic, t, 0.3).unwrap();
        let want = 0.75 * gaussian(0.3, 4.0 + 0.4) + 0.25 * gaussian(0.3, 1.0 + 0.4);
        assert!((v - want).abs() < 1e-16);
    }
}
