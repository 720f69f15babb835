//! Closed forms without dephasing (`gamma_z = 0`). The Green's matrix is
//! assembled from the heat kernel, its Laplace-smoothed tails `h+-` and the
//! light-cone kernels `kappa0`, `kappa1`; every convolution against a cone
//! kernel is an angular integral over `y = 2 delta t cos(theta)`.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::field::BlochField;
use crate::fourier;
use crate::grid::SpatialGrid;
use crate::initial::{sample_initial, InitialCondition};
use crate::params::Params;
use crate::quadrature::{integrate_theta, GaussLegendre, THETA_TOL};
use crate::specfun::{j0, j1, KernelSet};
use crate::spectral::green::GreenMatrix;

/// Distance beyond the light cone, in units of `sqrt(8 gamma_p t)`, past
/// which the far-field forms are used.
pub const FAR_FIELD_MARGIN: f64 = 5.0;

/// Agreement required between the far-field forms and quadrature at the
/// first node where the solver switches between them.
pub const SELF_CHECK_TOL: f64 = 1e-9;

fn undephased(p: &Params, t: f64) -> Result<KernelSet> {
    if p.gamma_z != 0.0 {
        return Err(Error::WrongRegime(format!(
            "gamma_z = {} but the closed forms need gamma_z = 0",
            p.gamma_z
        )));
    }
    let k = KernelSet::new(p, t)?;
    k.laplace_ready()?;
    Ok(k)
}

/// `int_0^pi` of `f(x - c cos(theta), J1(z), sin(theta) J0(z))` with
/// `z = 2 t omega sin(theta)`.
fn cone_integrals<const K: usize>(
    k: &KernelSet,
    x: f64,
    f: impl Fn(f64, f64, f64) -> [f64; K],
) -> Result<[f64; K]> {
    let c = k.cone();
    let z = 2.0 * k.t * k.omega;
    let r = integrate_theta(THETA_TOL, |th| {
        let (s, co) = th.sin_cos();
        f(x - c * co, j1(z * s), s * j0(z * s))
    })?;
    Ok(r.value)
}

/// Green's matrix at one point.
pub fn green_gammaz0_point(p: &Params, t: f64, x: f64) -> Result<[[f64; 3]; 3]> {
    let k = undephased(p, t)?;
    green_at(&k, p.gamma_p, x)
}

fn green_at(k: &KernelSet, gamma_p: f64, x: f64) -> Result<[[f64; 3]; 3]> {
    let (t, w, d) = (k.t, k.omega, k.delta);
    let c = k.cone();
    let [ig1, ihp1, ihm1, ig0, ixg0] = cone_integrals(k, x, |y, j1v, sj0| {
        let g = k.g(y);
        let [hp, hm, _, _] = k.tails(y);
        [g * j1v, hp * j1v, hm * j1v, g * sj0, y * g * sj0]
    })?;
    let g = k.g(x);
    let (hp, hm) = (k.h_plus(x), k.h_minus(x));
    let g_k1 = 0.5 * (k.g(x - c) + k.g(x + c)) - t * w * ig1;
    let hp_k1 = 0.5 * (k.h_plus(x - c) + k.h_plus(x + c)) - t * w * ihp1;
    let hm_k1 = 0.5 * (k.h_minus(x - c) + k.h_minus(x + c)) - t * w * ihm1;
    let g_k0 = 0.5 * t * ig0;
    let corner = d / (2.0 * gamma_p * t) * 0.5 * t * ixg0;
    Ok([
        [hp + g_k1 - hp_k1, -2.0 * hm + 2.0 * hm_k1, corner],
        [0.5 * hm - 0.5 * hm_k1, g - hp + hp_k1, w * g_k0],
        [corner, -4.0 * w * g_k0, g_k1],
    ])
}

/// Green's matrix on a grid. All entries are regular; the Dirac masses of
/// `kappa1` are absorbed by the convolutions.
pub fn green_gammaz0(p: &Params, t: f64, grid: &SpatialGrid) -> Result<GreenMatrix> {
    let k = undephased(p, t)?;
    let rows: Vec<[[f64; 3]; 3]> = grid
        .nodes()
        .par_iter()
        .map(|&x| green_at(&k, p.gamma_p, x))
        .collect::<Result<_>>()?;
    let mut out = GreenMatrix::zeros(*grid, t);
    for (n, m) in rows.iter().enumerate() {
        for i in 0..3 {
            for j in 0..3 {
                out.entries[i][j][n] = m[i][j];
            }
        }
    }
    Ok(out)
}

/// Largest discrepancies of the kernel identities on a grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdentityReport {
    /// `g * f_L = h+`.
    pub heat_laplace: f64,
    /// `g * (sgn f_L) = h-`.
    pub heat_signed_laplace: f64,
    /// `(x g) * f_L = (4 gamma_p t omega / delta) h-`.
    pub moment_laplace: f64,
    /// `f_L * f_L = (omega |x| + delta) f_L / (2 delta)`.
    pub laplace_laplace: f64,
    /// `f_L * kappa1 = f_L` outside the cone.
    pub cone_kappa1: f64,
    /// `f_L * kappa0 = t f_L` outside the cone.
    pub cone_kappa0: f64,
}

impl IdentityReport {
    pub fn worst(&self) -> f64 {
        [
            self.heat_laplace,
            self.heat_signed_laplace,
            self.moment_laplace,
            self.laplace_laplace,
            self.cone_kappa1,
            self.cone_kappa0,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

/// `(f_L * f_L)(x)` by Gauss-Legendre on pieces split at the kinks `0` and `x`.
fn laplace_self_convolution(a: f64, x: f64) -> f64 {
    let f = |y: f64| (-y.abs() / a).exp() / (2.0 * a);
    let gl = GaussLegendre::cached(32);
    let (lo, hi) = (x.min(0.0), x.max(0.0));
    let reach = 40.0 * a;
    let pieces = [(lo - reach, lo), (lo, hi), (hi, hi + reach)];
    let mut total = 0.0;
    for (a0, b0) in pieces {
        let h = (b0 - a0) / 8.0;
        for i in 0..8 {
            let s = a0 + i as f64 * h;
            total += gl.integrate(s, s + h, |y| f(y) * f(x - y));
        }
    }
    total
}

/// Checks the kernel identities against the closed forms. Heat-kernel
/// left-hand sides are products of exact transforms inverted on the grid;
/// `f_L * f_L` is integrated piecewise and the cone identities by angular
/// quadrature, each at up to 256 nodes.
pub fn convolution_identities_check(
    p: &Params,
    t: f64,
    grid: &SpatialGrid,
) -> Result<IdentityReport> {
    let k = undephased(p, t)?;
    let (d, w, gp) = (p.delta, p.omega, p.gamma_p);
    let a = k.scale();
    let xi = grid.fourier_nodes();
    let invert = |f: &dyn Fn(f64) -> Complex64| {
        fourier::inverse(grid, &xi.iter().map(|&s| f(s)).collect::<Vec<_>>()).0
    };
    let heat = |s: f64| (-2.0 * gp * t * s * s).exp();
    let lap = |s: f64| 1.0 / (1.0 + a * a * s * s);
    let signed = |s: f64| Complex64::new(0.0, -s * a) * lap(s);

    let lhs_hl = invert(&|s| (heat(s) * lap(s)).into());
    let lhs_hs = invert(&|s| heat(s) * signed(s));
    let lhs_ml = invert(&|s| Complex64::new(0.0, -4.0 * gp * t * s) * heat(s) * lap(s));

    let mut rep = IdentityReport {
        heat_laplace: 0.0,
        heat_signed_laplace: 0.0,
        moment_laplace: 0.0,
        laplace_laplace: 0.0,
        cone_kappa1: 0.0,
        cone_kappa0: 0.0,
    };
    for (j, &x) in grid.nodes().iter().enumerate() {
        let (hp, hm) = (k.h_plus(x), k.h_minus(x));
        rep.heat_laplace = rep.heat_laplace.max((lhs_hl[j] - hp).abs());
        rep.heat_signed_laplace = rep.heat_signed_laplace.max((lhs_hs[j] - hm).abs());
        rep.moment_laplace = rep
            .moment_laplace
            .max((lhs_ml[j] - 4.0 * gp * t * w / d * hm).abs());
    }
    let nodes = grid.nodes();
    let stride = nodes.len().div_ceil(256).max(1);
    for &x in nodes.iter().step_by(stride) {
        let ll = (w * x.abs() + d) * k.f_laplace(x) / (2.0 * d);
        rep.laplace_laplace = rep
            .laplace_laplace
            .max((laplace_self_convolution(a, x) - ll).abs());
    }

    let c = k.cone();
    let outside: Vec<f64> = grid.nodes().into_iter().filter(|&x| x > c).collect();
    let stride = outside.len().div_ceil(256).max(1);
    let errs: Vec<(f64, f64)> = outside
        .par_iter()
        .step_by(stride)
        .map(|&x| {
            let [i1, i0] = cone_integrals(&k, x, |y, j1v, sj0| {
                let f = k.f_laplace(y);
                [f * j1v, f * sj0]
            })?;
            let f = k.f_laplace(x);
            let k1 = 0.5 * (k.f_laplace(x - c) + k.f_laplace(x + c)) - t * w * i1;
            Ok(((k1 - f).abs(), (0.5 * t * i0 - t * f).abs()))
        })
        .collect::<Result<_>>()?;
    for (e1, e0) in errs {
        rep.cone_kappa1 = rep.cone_kappa1.max(e1);
        rep.cone_kappa0 = rep.cone_kappa0.max(e0);
    }
    Ok(rep)
}

/// Coefficients of the Laplace-coherent initial state
/// `f_L (1, q c, 2p - 1)` with real coherence `r c f_L`, `c = sqrt(p (1 - p))`.
#[derive(Debug, Clone, Copy)]
struct Coherent {
    /// `q c`.
    qc: f64,
    /// `2p - 1`.
    pol: f64,
    /// `r c`.
    rc: f64,
}

impl Coherent {
    fn from_ic(p: &Params, ic: &InitialCondition) -> Result<Self> {
        let InitialCondition::LaplaceCoherent { p: w, r, q, scale } = *ic else {
            return Err(Error::WrongRegime(
                "expected a Laplace coherent initial condition".into(),
            ));
        };
        ic.validate()?;
        if p.omega <= 0.0 || p.delta <= 0.0 {
            return Err(Error::DegenerateParams("delta and omega must be positive"));
        }
        let expected = p.delta / p.omega;
        if (scale - expected).abs() > 1e-12 * expected {
            return Err(Error::ScaleMismatch {
                expected,
                found: scale,
            });
        }
        let c = (w * (1.0 - w)).sqrt();
        Ok(Coherent {
            qc: q * c,
            pol: 2.0 * w - 1.0,
            rc: r * c,
        })
    }

    fn mirrored(self) -> Self {
        Coherent {
            qc: -self.qc,
            pol: -self.pol,
            rc: self.rc,
        }
    }
}

/// `(rho_plus, c_i, rho_minus)` at one point by angular quadrature.
fn near_field(k: &KernelSet, s: Coherent, x: f64) -> Result<[f64; 3]> {
    let (t, w) = (k.t, k.omega);
    let c = k.cone();
    let [ih1, ip1, im1, ih0, ihm0] = cone_integrals(k, x, |y, j1v, sj0| {
        let [hp, hm, pp, pm] = k.tails(y);
        [hp * j1v, pp * j1v, pm * j1v, hp * sj0, hm * sj0]
    })?;
    let [hp, _, pp, pm] = k.tails(x);
    let lo = k.tails(x - c);
    let hi = k.tails(x + c);
    let mean = |i: usize| 0.5 * (lo[i] + hi[i]);
    let hp_k1 = mean(0) - t * w * ih1;
    let pp_k1 = mean(2) - t * w * ip1;
    let pm_k1 = mean(3) - t * w * im1;
    let hp_k0 = 0.5 * t * ih0;
    let hm_k0 = 0.5 * t * ihm0;
    Ok([
        pp + hp_k1 - pp_k1 - 2.0 * s.qc * (pm - pm_k1) + 2.0 * w * s.pol * hm_k0,
        0.5 * (pm - pm_k1) + s.qc * (hp - pp + pp_k1) + w * s.pol * hp_k0,
        2.0 * w * hm_k0 - 4.0 * w * s.qc * hp_k0 + s.pol * hp_k1,
    ])
}

/// Closed forms to the right of the cone, `x >= far_field_radius`.
fn far_right(k: &KernelSet, s: Coherent, x: f64) -> [f64; 3] {
    let (t, w) = (k.t, k.omega);
    let a = 2.0 * w * w * t * t;
    let (hp, hm) = (k.h_plus(x), k.h_minus(x));
    [
        (1.0 + a) * hp + (2.0 * t * w * s.pol - 2.0 * s.qc * a) * hm,
        0.5 * a * hm + (s.qc * (1.0 - a) + t * w * s.pol) * hp,
        2.0 * t * w * hm + (s.pol - 4.0 * w * s.qc * t) * hp,
    ]
}

/// Closed forms on either side of the cone. The left side follows from the
/// reflection `x -> -x`, which flips `c_i` and `rho_minus`.
fn far_field_at(k: &KernelSet, s: Coherent, x: f64) -> [f64; 3] {
    if x >= 0.0 {
        far_right(k, s, x)
    } else {
        let [u1, u2, u3] = far_right(k, s.mirrored(), -x);
        [u1, -u2, -u3]
    }
}

fn far_field_radius(k: &KernelSet) -> f64 {
    k.cone() + FAR_FIELD_MARGIN * (8.0 * k.gamma_p * k.t).sqrt()
}

/// `(rho_plus, c_i, rho_minus)` from the closed far-field forms. Valid for
/// `|x| >= 2 delta t + 5 sqrt(8 gamma_p t)`.
pub fn far_field(p: &Params, ic: &InitialCondition, t: f64, x: f64) -> Result<[f64; 3]> {
    let s = Coherent::from_ic(p, ic)?;
    let k = undephased(p, t)?;
    let reach = far_field_radius(&k);
    if x.abs() < reach {
        return Err(Error::WrongRegime(format!(
            "|x| = {} is inside the far-field radius {reach}",
            x.abs()
        )));
    }
    Ok(far_field_at(&k, s, x))
}

/// Solution for the Laplace-coherent initial state by quadrature, switching
/// to the far-field forms outside the cone. The switch is checked at the
/// first node on each side.
pub fn solve_laplace_coherent(
    p: &Params,
    ic: &InitialCondition,
    t: f64,
    grid: &SpatialGrid,
) -> Result<BlochField> {
    let s = Coherent::from_ic(p, ic)?;
    if p.gamma_z != 0.0 {
        return Err(Error::WrongRegime(format!(
            "gamma_z = {} but the closed forms need gamma_z = 0",
            p.gamma_z
        )));
    }
    if t < 0.0 {
        return Err(Error::NonPositiveTime(t));
    }
    if t == 0.0 {
        return Ok(sample_initial(ic, grid)?.to_bloch());
    }
    let k = undephased(p, t)?;
    let reach = far_field_radius(&k);
    let nodes = grid.nodes();
    let vals: Vec<[f64; 3]> = nodes
        .par_iter()
        .map(|&x| {
            if x.abs() >= reach {
                Ok(far_field_at(&k, s, x))
            } else {
                near_field(&k, s, x)
            }
        })
        .collect::<Result<_>>()?;

    let edges = [
        nodes.iter().position(|&x| x >= reach),
        nodes.iter().rposition(|&x| x <= -reach),
    ];
    for j in edges.into_iter().flatten() {
        let x = nodes[j];
        let near = near_field(&k, s, x)?;
        let scale = vals.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()));
        let gap = (0..3)
            .map(|i| (near[i] - vals[j][i]).abs())
            .fold(0.0, f64::max);
        if gap > SELF_CHECK_TOL * scale.max(1.0) {
            return Err(Error::SelfCheckFailed {
                x,
                discrepancy: gap,
            });
        }
    }

    let mut out = BlochField::zeros(*grid, t);
    for (j, v) in vals.iter().enumerate() {
        out.rho_plus[j] = v[0];
        out.c_i[j] = v[1];
        out.rho_minus[j] = v[2];
        out.c_r[j] = s.rc * k.h_plus(nodes[j]);
    }
    Ok(out)
}

/// Probability density at one point, written as the two boundary terms at
/// `x -+ 2 delta t` plus three angular integrals.
pub fn coherent_density(p: &Params, ic: &InitialCondition, t: f64, x: f64) -> Result<f64> {
    let s = Coherent::from_ic(p, ic)?;
    let k = undephased(p, t)?;
    let (tw, c) = (t * p.omega, k.cone());
    let [lead, odd, cross] = cone_integrals(&k, x, |y, j1v, sj0| {
        let [hp, hm, pp, pm] = k.tails(y);
        [(hp - pp) * j1v, pm * j1v, hm * sj0]
    })?;
    let [_, _, pp, pm] = k.tails(x);
    let lo = k.tails(x - c);
    let hi = k.tails(x + c);
    Ok(pp + 0.5 * (lo[0] - lo[2] + hi[0] - hi[2])
        - tw * lead
        - 2.0 * s.qc * (pm - 0.5 * (lo[3] + hi[3]) + tw * odd)
        + s.pol * tw * cross)
}

/// Population imbalance at one point: boundary terms in `h+` and three
/// angular integrals.
pub fn coherent_imbalance(p: &Params, ic: &InitialCondition, t: f64, x: f64) -> Result<f64> {
    let s = Coherent::from_ic(p, ic)?;
    let k = undephased(p, t)?;
    let (tw, c) = (t * p.omega, k.cone());
    let [odd, even, lead] = cone_integrals(&k, x, |y, j1v, sj0| {
        let (hp, hm) = (k.h_plus(y), k.h_minus(y));
        [hm * sj0, hp * sj0, hp * j1v]
    })?;
    Ok(0.5 * s.pol * (k.h_plus(x - c) + k.h_plus(x + c)) + tw * odd
        - 2.0 * tw * s.qc * even
        - s.pol * tw * lead)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::green::green_function;

    fn params() -> Params {
        Params::new(0.05, 0.0, 0.5, 0.3).unwrap()
    }

    fn coherent(p: &Params, q: f64) -> InitialCondition {
        InitialCondition::laplace_coherent(0.25, 0.3, q, p).unwrap()
    }

    #[test]
    fn dephasing_is_rejected() {
        let p = Params::new(0.05, 0.1, 0.5, 0.3).unwrap();
        assert!(matches!(
            green_gammaz0_point(&p, 1.0, 0.0),
            Err(Error::WrongRegime(_))
        ));
    }

    #[test]
    fn scale_must_match() {
        let p = params();
        let ic = InitialCondition::LaplaceCoherent {
            p: 0.25,
            r: 0.0,
            q: 0.0,
            scale: 1.0,
        };
        assert!(matches!(
            coherent_density(&p, &ic, 1.0, 0.0),
            Err(Error::ScaleMismatch { .. })
        ));
    }

    #[test]
    fn green_matches_spectral() {
        let p = params();
        let grid = SpatialGrid::new(64.0, 4096).unwrap();
        for t in [0.5, 4.0] {
            let spec = green_function(&p, t, &grid).unwrap();
            for j in (0..grid.len()).step_by(37) {
                let m = green_gammaz0_point(&p, t, grid.node(j)).unwrap();
                for i in 0..3 {
                    for l in 0..3 {
                        let e = (m[i][l] - spec.entries[i][l][j]).abs();
                        assert!(e < 1e-9, "t={t} x={} ({i},{l}) {e}", grid.node(j));
                    }
                }
            }
        }
    }

    #[test]
    fn weak_driving_limit() {
        let p = Params::new(0.05, 0.0, 0.5, 1e-9).unwrap();
        let (t, x) = (3.0, 1.2);
        let m = green_gammaz0_point(&p, t, x).unwrap();
        let k = KernelSet::new(&p, t).unwrap();
        assert!(m[1][2].abs() < 1e-8 && m[2][1].abs() < 1e-8);
        assert!((m[2][2] - 0.5 * (k.g(x - 3.0) + k.g(x + 3.0))).abs() < 1e-12);
    }

    #[test]
    fn identities_hold() {
        let p = params();
        let grid = SpatialGrid::new(64.0, 4096).unwrap();
        let rep = convolution_identities_check(&p, 2.0, &grid).unwrap();
        assert!(rep.worst() < 1e-10, "{rep:?}");
    }

    #[test]
    fn pointwise_forms_match_solver() {
        let p = params();
        let grid = SpatialGrid::new(32.0, 256).unwrap();
        for q in [0.0, -0.5] {
            let ic = coherent(&p, q);
            let u = solve_laplace_coherent(&p, &ic, 3.0, &grid).unwrap();
            for j in (0..grid.len()).step_by(13) {
                let x = grid.node(j);
                assert!((coherent_density(&p, &ic, 3.0, x).unwrap() - u.rho_plus[j]).abs() < 1e-9);
                assert!(
                    (coherent_imbalance(&p, &ic, 3.0, x).unwrap() - u.rho_minus[j]).abs() < 1e-9
                );
            }
        }
    }

    #[test]
    fn far_field_matches_quadrature_on_both_sides() {
        let p = params();
        let ic = coherent(&p, -0.5);
        let s = Coherent::from_ic(&p, &ic).unwrap();
        let t = 3.0;
        let k = KernelSet::new(&p, t).unwrap();
        let reach = far_field_radius(&k);
        for x in [reach, reach + 1.5, -reach, -reach - 4.0] {
            let far = far_field(&p, &ic, t, x).unwrap();
            let near = near_field(&k, s, x).unwrap();
            for i in 0..3 {
                assert!(
                    (far[i] - near[i]).abs() < 1e-9,
                    "{x} {i}: {} {}",
                    far[i],
                    near[i]
                );
            }
        }
        assert!(far_field(&p, &ic, t, 0.5 * reach).is_err());
    }

    #[test]
    fn short_time_recovers_initial_state() {
        let p = params();
        let ic = coherent(&p, -0.5);
        let s = Coherent::from_ic(&p, &ic).unwrap();
        let k = KernelSet::new(&p, 1e-6).unwrap();
        let x = 0.7;
        let f = k.f_laplace(x);
        let u = near_field(&k, s, x).unwrap();
        assert!((u[0] - f).abs() < 1e-5 * f);
        assert!((u[1] - s.qc * f).abs() < 1e-5 * f);
        assert!((u[2] - s.pol * f).abs() < 1e-5 * f);
    }

    #[test]
    fn balanced_incoherent_imbalance_is_one_integral() {
        let p = params();
        let ic = InitialCondition::laplace_coherent(0.5, 0.0, 0.0, &p).unwrap();
        let (t, x) = (2.0, 0.4);
        let k = KernelSet::new(&p, t).unwrap();
        let [i] = cone_integrals(&k, x, |y, _, sj0| [k.h_minus(y) * sj0]).unwrap();
        let q = coherent_imbalance(&p, &ic, t, x).unwrap();
        assert!((q - t * p.omega * i).abs() < 1e-15);
    }
}
