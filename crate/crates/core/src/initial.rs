//! Initial density matrices and their decomposition into elementary profiles.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::field::{BlochField, DensityField};
use crate::grid::SpatialGrid;
use crate::params::Params;
use crate::specfun::{erfc, gaussian, heat_box, heat_laplace};

/// Default bound on the probability mass outside the grid.
pub const EPS_TAIL: f64 = 1e-8;

/// Initial density matrix families.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "ic", rename_all = "snake_case")]
pub enum InitialCondition {
    /// Diagonal, with centred normal populations of widths `sigma1`, `sigma2`
    /// and weights `p`, `1 - p`.
    GaussianMixture { p: f64, sigma1: f64, sigma2: f64 },
    /// A normal envelope of width `sigma` times the pure-state-like matrix
    /// `[[p, mu c e^{ikx}], [mu c e^{-ikx}, 1 - p]]`, `c = sqrt(p (1 - p))`.
    GaussianCoherent { p: f64, mu: f64, k: f64, sigma: f64 },
    /// Diagonal, with Laplace populations of scales `a` and `b`.
    LaplaceMixture { p: f64, a: f64, b: f64 },
    /// Diagonal, with uniform populations on `[-a, a]` and `[-b, b]`.
    UniformMixture { p: f64, a: f64, b: f64 },
    /// A Laplace envelope of the given scale times
    /// `[[p, c (r + iq)], [c (r - iq), 1 - p]]`.
    LaplaceCoherent { p: f64, r: f64, q: f64, scale: f64 },
    /// Arbitrary sampled data.
    #[serde(skip)]
    Custom(DensityField),
}

/// Normalised elementary shapes. Each integrates to one except the
/// modulated Gaussians, which are a normal density times `cos(kx)` or
/// `sin(kx)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Profile {
    Gaussian { sigma: f64 },
    Laplace { scale: f64 },
    Uniform { half_width: f64 },
    GaussianCos { sigma: f64, k: f64 },
    GaussianSin { sigma: f64, k: f64 },
}

/// A weighted sum of profiles.
pub type Mixture = Vec<(f64, Profile)>;

/// Each Bloch component of an initial condition as a [`Mixture`].
#[derive(Debug, Clone, PartialEq)]
pub struct BlochProfiles {
    pub rho_plus: Mixture,
    pub c_i: Mixture,
    pub rho_minus: Mixture,
    pub c_r: Mixture,
}

impl Profile {
    pub fn value(&self, x: f64) -> f64 {
        match *self {
            Profile::Gaussian { sigma } => gaussian(x, sigma * sigma),
            Profile::Laplace { scale } => (-x.abs() / scale).exp() / (2.0 * scale),
            Profile::Uniform { half_width } => {
                let h = 1.0 / (2.0 * half_width);
                match x.abs().partial_cmp(&half_width) {
                    Some(std::cmp::Ordering::Less) => h,
                    Some(std::cmp::Ordering::Equal) => 0.5 * h,
                    _ => 0.0,
                }
            }
            Profile::GaussianCos { sigma, k } => gaussian(x, sigma * sigma) * (k * x).cos(),
            Profile::GaussianSin { sigma, k } => gaussian(x, sigma * sigma) * (k * x).sin(),
        }
    }

    /// Fourier transform `int f(x) e^{-i xi x} dx`.
    pub fn fourier(&self, xi: f64) -> Complex64 {
        let gauss = |s: f64, w: f64| (-0.5 * s * s * w * w).exp();
        match *self {
            Profile::Gaussian { sigma } => gauss(sigma, xi).into(),
            Profile::Laplace { scale } => (1.0 / (1.0 + scale * scale * xi * xi)).into(),
            Profile::Uniform { half_width } => {
                let u = half_width * xi;
                if u.abs() < 1e-8 {
                    (1.0 - u * u / 6.0).into()
                } else {
                    (u.sin() / u).into()
                }
            }
            Profile::GaussianCos { sigma, k } => {
                (0.5 * (gauss(sigma, xi - k) + gauss(sigma, xi + k))).into()
            }
            Profile::GaussianSin { sigma, k } => {
                Complex64::new(0.0, -0.5 * (gauss(sigma, xi - k) - gauss(sigma, xi + k)))
            }
        }
    }

    /// Integral of `|f|` outside `[-r, r]`, or an upper bound for it.
    pub fn tail_mass(&self, r: f64) -> f64 {
        match *self {
            Profile::Gaussian { sigma }
            | Profile::GaussianCos { sigma, .. }
            | Profile::GaussianSin { sigma, .. } => erfc(r / (sigma * std::f64::consts::SQRT_2)),
            Profile::Laplace { scale } => (-r / scale).exp(),
            Profile::Uniform { half_width } => {
                if r >= half_width {
                    0.0
                } else {
                    1.0 - r / half_width
                }
            }
        }
    }

    /// Radius outside which at most `eps` of the mass lies.
    pub fn tail_radius(&self, eps: f64) -> f64 {
        let l = (1.0 / eps).ln();
        match *self {
            Profile::Gaussian { sigma }
            | Profile::GaussianCos { sigma, .. }
            | Profile::GaussianSin { sigma, .. } => sigma * (2.0 * l).sqrt(),
            Profile::Laplace { scale } => scale * l,
            Profile::Uniform { half_width } => half_width,
        }
    }

    /// Convolution with the heat kernel of variance `4 gamma_p t`,
    /// evaluated at `x`. At `t = 0` this is [`Profile::value`].
    pub fn heat(&self, t: f64, x: f64, gamma_p: f64) -> f64 {
        if t <= 0.0 {
            return self.value(x);
        }
        let s2 = 4.0 * gamma_p * t;
        match *self {
            Profile::Gaussian { sigma } => gaussian(x, sigma * sigma + s2),
            Profile::Laplace { scale } => heat_laplace(t, x, scale, gamma_p),
            Profile::Uniform { half_width } => heat_box(t, x, half_width, gamma_p),
            Profile::GaussianCos { sigma, k } | Profile::GaussianSin { sigma, k } => {
                let v = sigma * sigma + s2;
                let env = (-(s2 * k * k * sigma * sigma + x * x) / (2.0 * v)).exp()
                    / (2.0 * PI * v).sqrt();
                let phase = k * x * sigma * sigma / v;
                if matches!(self, Profile::GaussianCos { .. }) {
                    env * phase.cos()
                } else {
                    env * phase.sin()
                }
            }
        }
    }
}

pub fn mixture_value(m: &Mixture, x: f64) -> f64 {
    m.iter().map(|(w, p)| w * p.value(x)).sum()
}

pub fn mixture_fourier(m: &Mixture, xi: f64) -> Complex64 {
    m.iter().map(|(w, p)| *w * p.fourier(xi)).sum()
}

pub fn mixture_heat(m: &Mixture, t: f64, x: f64, gamma_p: f64) -> f64 {
    m.iter().map(|(w, p)| w * p.heat(t, x, gamma_p)).sum()
}

fn check_weight(p: f64) -> Result<()> {
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::InvalidInitialCondition(format!(
            "weight p = {p} must lie in (0, 1)"
        )));
    }
    Ok(())
}

fn check_scale(name: &str, v: f64) -> Result<()> {
    if !(v > 0.0 && v.is_finite()) {
        return Err(Error::InvalidInitialCondition(format!(
            "{name} = {v} must be positive"
        )));
    }
    Ok(())
}

impl InitialCondition {
    /// The Laplace-coherent family with its scale tied to `delta / omega`.
    pub fn laplace_coherent(p: f64, r: f64, q: f64, params: &Params) -> Result<Self> {
        if params.omega <= 0.0 || params.delta <= 0.0 {
            return Err(Error::DegenerateParams(
                "the Laplace scale delta/omega needs delta, omega > 0",
            ));
        }
        let ic = InitialCondition::LaplaceCoherent {
            p,
            r,
            q,
            scale: params.delta / params.omega,
        };
        ic.validate()?;
        Ok(ic)
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            InitialCondition::GaussianMixture { p, sigma1, sigma2 } => {
                check_weight(p)?;
                check_scale("sigma1", sigma1)?;
                check_scale("sigma2", sigma2)
            }
            InitialCondition::GaussianCoherent { p, mu, k, sigma } => {
                check_weight(p)?;
                check_scale("sigma", sigma)?;
                if !(mu > 0.0 && mu < 1.0) {
                    return Err(Error::InvalidInitialCondition(format!(
                        "mu = {mu} must lie in (0, 1)"
                    )));
                }
                if !k.is_finite() {
                    return Err(Error::InvalidInitialCondition("k must be finite".into()));
                }
                Ok(())
            }
            InitialCondition::LaplaceMixture { p, a, b }
            | InitialCondition::UniformMixture { p, a, b } => {
                check_weight(p)?;
                check_scale("a", a)?;
                check_scale("b", b)
            }
            InitialCondition::LaplaceCoherent { p, r, q, scale } => {
                check_weight(p)?;
                check_scale("scale", scale)?;
                if !(r * r + q * q <= 1.0) {
                    return Err(Error::InvalidInitialCondition(format!(
                        "r^2 + q^2 = {} exceeds 1",
                        r * r + q * q
                    )));
                }
                Ok(())
            }
            InitialCondition::Custom(ref d) => {
                let mass = d.trace_integral();
                if !((mass - 1.0).abs() <= 1e-6) {
                    return Err(Error::InvalidInitialCondition(format!(
                        "trace integrates to {mass}"
                    )));
                }
                Ok(())
            }
        }
    }

    /// Analytic decomposition, or `None` for sampled data.
    pub fn profiles(&self) -> Option<BlochProfiles> {
        use Profile::*;
        let diag = |p: f64, f1: Profile, f2: Profile| BlochProfiles {
            rho_plus: vec![(p, f1), (1.0 - p, f2)],
            c_i: vec![],
            rho_minus: vec![(p, f1), (-(1.0 - p), f2)],
            c_r: vec![],
        };
        Some(match *self {
            InitialCondition::GaussianMixture { p, sigma1, sigma2 } => {
                diag(p, Gaussian { sigma: sigma1 }, Gaussian { sigma: sigma2 })
            }
            InitialCondition::LaplaceMixture { p, a, b } => {
                diag(p, Laplace { scale: a }, Laplace { scale: b })
            }
            InitialCondition::UniformMixture { p, a, b } => {
                diag(p, Uniform { half_width: a }, Uniform { half_width: b })
            }
            InitialCondition::GaussianCoherent { p, mu, k, sigma } => {
                let c = mu * (p * (1.0 - p)).sqrt();
                BlochProfiles {
                    rho_plus: vec![(1.0, Gaussian { sigma })],
                    c_i: vec![(c, GaussianSin { sigma, k })],
                    rho_minus: vec![(2.0 * p - 1.0, Gaussian { sigma })],
                    c_r: vec![(c, GaussianCos { sigma, k })],
                }
            }
            InitialCondition::LaplaceCoherent { p, r, q, scale } => {
                let c = (p * (1.0 - p)).sqrt();
                let f = Laplace { scale };
                BlochProfiles {
                    rho_plus: vec![(1.0, f)],
                    c_i: vec![(q * c, f)],
                    rho_minus: vec![(2.0 * p - 1.0, f)],
                    c_r: vec![(r * c, f)],
                }
            }
            InitialCondition::Custom(_) => return None,
        })
    }

    /// Radius containing all but `eps` of the trace mass.
    pub fn tail_radius(&self, eps: f64) -> f64 {
        match self.profiles() {
            Some(b) => b
                .rho_plus
                .iter()
                .map(|(_, p)| p.tail_radius(eps))
                .fold(0.0, f64::max),
            None => match self {
                InitialCondition::Custom(d) => d.grid.half_width(),
                _ => unreachable!(),
            },
        }
    }

    /// Trace mass outside `[-r, r]`, bounded from above.
    pub fn tail_mass(&self, r: f64) -> f64 {
        match self.profiles() {
            Some(b) => b
                .rho_plus
                .iter()
                .map(|(w, p)| w.abs() * p.tail_mass(r))
                .sum(),
            None => 0.0,
        }
    }
}

/// Half width prescribed by the tail rule: the initial tail radius, plus the
/// drift excursion `2 delta t_max`, plus six diffusion widths.
pub fn required_half_width(ic: &InitialCondition, params: &Params, t_max: f64, eps: f64) -> f64 {
    ic.tail_radius(eps) + params.drift(t_max) + 6.0 * params.diffusion_width(t_max)
}

/// Samples the initial density matrix on `grid`.
pub fn sample_initial(ic: &InitialCondition, grid: &SpatialGrid) -> Result<DensityField> {
    sample_initial_with(ic, grid, EPS_TAIL)
}

pub fn sample_initial_with(
    ic: &InitialCondition,
    grid: &SpatialGrid,
    eps_tail: f64,
) -> Result<DensityField> {
    ic.validate()?;
    if let InitialCondition::Custom(d) = ic {
        if d.grid != *grid {
            return Err(Error::GridMismatch);
        }
        return Ok(d.clone());
    }
    let tail = ic.tail_mass(grid.half_width() - grid.dx());
    if tail > eps_tail {
        return Err(Error::DomainTooNarrow {
            tail_mass: tail,
            tolerance: eps_tail,
        });
    }
    let b = sample_bloch(ic, grid);
    Ok(b.to_density())
}

/// Bloch components of an analytic initial condition at the grid nodes.
fn sample_bloch(ic: &InitialCondition, grid: &SpatialGrid) -> BlochField {
    let prof = ic.profiles().expect("analytic initial condition");
    let x = grid.nodes();
    let eval = |m: &Mixture| x.iter().map(|&xx| mixture_value(m, xx)).collect::<Vec<_>>();
    BlochField {
        grid: *grid,
        t: 0.0,
        rho_plus: eval(&prof.rho_plus),
        c_i: eval(&prof.c_i),
        rho_minus: eval(&prof.rho_minus),
        c_r: eval(&prof.c_r),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> SpatialGrid {
        SpatialGrid::dyadic(40.0, 1.0 / 256.0).unwrap()
    }

    fn at(d: &DensityField, x: f64) -> (f64, f64, Complex64) {
        let j = d.grid.nearest(x).unwrap();
        assert_eq!(d.grid.node(j), x);
        (d.rho11[j], d.rho22[j], d.rho12[j])
    }

    #[test]
    fn gaussian_mixture_at_origin() {
        let ic = InitialCondition::GaussianMixture {
            p: 0.75,
            sigma1: 1.0,
            sigma2: 2.0,
        };
        let d = sample_initial(&ic, &grid()).unwrap();
        let (r11, r22, _) = at(&d, 0.0);
        let s = (2.0 * PI).sqrt();
        assert!((r11 - 0.75 / s).abs() < 1e-16);
        assert!((r22 - 0.25 / (2.0 * s)).abs() < 1e-16);
    }

    #[test]
    fn gaussian_mixture_minus_component() {
        let ic = InitialCondition::GaussianMixture {
            p: 0.75,
            sigma1: 1.0,
            sigma2: 2.0,
        };
        let b = sample_initial(&ic, &grid()).unwrap().to_bloch();
        for (j, x) in b.grid.nodes().iter().enumerate().step_by(97) {
            let want = 0.75 * gaussian(*x, 1.0) - 0.25 * gaussian(*x, 4.0);
            assert!((b.rho_minus[j] - want).abs() < 1e-16);
        }
    }

    #[test]
    fn uniform_mixture_plateau_and_jump() {
        let ic = InitialCondition::UniformMixture {
            p: 0.75,
            a: 3.0,
            b: 2.0,
        };
        let d = sample_initial(&ic, &grid()).unwrap();
        let (r11, r22, _) = at(&d, 2.5);
        assert_eq!(r11, 0.75 / 6.0);
        assert_eq!(r22, 0.0);
        let (r11, _, _) = at(&d, 3.0);
        assert_eq!(r11, 0.5 * 0.75 / 6.0);
    }

    #[test]
    fn laplace_coherent_imaginary_coherence() {
        let params = Params::new(1e-2, 0.0, 1e-1, 1e-2).unwrap();
        let ic = InitialCondition::laplace_coherent(0.25, 0.0, -0.5, &params).unwrap();
        let g = SpatialGrid::dyadic(200.0, 0.25).unwrap();
        let d = sample_initial(&ic, &g).unwrap();
        let (_, _, r12) = at(&d, 0.0);
        assert_eq!(r12.re, 0.0);
        assert!((r12.im + 0.5 * (3.0f64 / 16.0).sqrt() * 0.05).abs() < 1e-16);
    }

    #[test]
    fn every_variant_has_unit_trace() {
        let params = Params::new(1e-2, 0.0, 1e-1, 1e-2).unwrap();
        let cases = [
            InitialCondition::GaussianMixture {
                p: 0.75,
                sigma1: 1.0,
                sigma2: 2.0,
            },
            InitialCondition::GaussianCoherent {
                p: 0.75,
                mu: 0.8,
                k: 1.0,
                sigma: 1.0,
            },
            InitialCondition::LaplaceMixture {
                p: 0.25,
                a: 1.0,
                b: 2.0,
            },
            InitialCondition::UniformMixture {
                p: 0.75,
                a: 3.0,
                b: 2.0,
            },
            InitialCondition::laplace_coherent(0.25, 0.0, 0.0, &params).unwrap(),
        ];
        for ic in cases {
            let r = ic.tail_radius(EPS_TAIL);
            let g = SpatialGrid::dyadic(r + 1.0, 1.0 / 4096.0).unwrap();
            let mass = sample_initial(&ic, &g).unwrap().trace_integral();
            assert!((mass - 1.0).abs() < EPS_TAIL, "{ic:?}: {mass}");
        }
    }

    #[test]
    fn narrow_domain_is_rejected() {
        let ic = InitialCondition::LaplaceMixture {
            p: 0.25,
            a: 1.0,
            b: 2.0,
        };
        let g = SpatialGrid::new(8.0, 1024).unwrap();
        assert!(matches!(
            sample_initial(&ic, &g),
            Err(Error::DomainTooNarrow { .. })
        ));
    }

    #[test]
    fn invalid_parameters_are_rejected() {
        let bad = [
            InitialCondition::GaussianMixture {
                p: 1.0,
                sigma1: 1.0,
                sigma2: 2.0,
            },
            InitialCondition::GaussianCoherent {
                p: 0.5,
                mu: 1.0,
                k: 1.0,
                sigma: 1.0,
            },
            InitialCondition::UniformMixture {
                p: 0.5,
                a: 0.0,
                b: 2.0,
            },
            InitialCondition::LaplaceCoherent {
                p: 0.5,
                r: 0.8,
                q: 0.8,
                scale: 1.0,
            },
        ];
        for ic in bad {
            assert!(ic.validate().is_err(), "{ic:?}");
        }
    }

    #[test]
    fn heat_at_zero_time_is_identity() {
        let profs = [
            Profile::Gaussian { sigma: 1.3 },
            Profile::Laplace { scale: 0.7 },
            Profile::GaussianSin { sigma: 1.0, k: 2.0 },
        ];
        for p in profs {
            for x in [-1.0, 0.3, 2.0] {
                assert!((p.heat(1e-14, x, 1.0) - p.value(x)).abs() < 1e-6);
            }
        }
    }
}
