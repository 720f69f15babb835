//! Error functions, Bessel functions of the first kind, and the scalar
//! kernels built from them.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use crate::error::{Error, Result};
use crate::params::Params;

const FRAC_1_SQRT_PI: f64 = 5.641_895_835_477_563e-1;

const ERF_A: [f64; 5] = [
    3.161_123_743_870_565_6e0,
    1.138_641_541_510_501_6e2,
    3.774_852_376_853_020_2e2,
    3.209_377_589_138_469_5e3,
    1.857_777_061_846_031_5e-1,
];
const ERF_B: [f64; 4] = [
    2.360_129_095_234_412_1e1,
    2.440_246_379_344_441_7e2,
    1.282_616_526_077_372_3e3,
    2.844_236_833_439_170_6e3,
];
const ERF_C: [f64; 9] = [
    5.641_884_969_886_700_9e-1,
    8.883_149_794_388_376e0,
    6.611_919_063_714_163e1,
    2.986_351_381_974_001_3e2,
    8.819_522_212_417_691e2,
    1.712_047_612_634_070_6e3,
    2.051_078_377_826_071_5e3,
    1.230_339_354_797_997_2e3,
    2.153_115_354_744_038_5e-8,
];
const ERF_D: [f64; 8] = [
    1.574_492_611_070_983_5e1,
    1.176_939_508_913_125e2,
    5.371_811_018_620_098_6e2,
    1.621_389_574_566_690_2e3,
    3.290_799_235_733_459_6e3,
    4.362_619_090_143_247e3,
    3.439_367_674_143_721_6e3,
    1.230_339_354_803_749_4e3,
];
const ERF_P: [f64; 6] = [
    3.053_266_349_612_323_4e-1,
    3.603_448_999_498_044_4e-1,
    1.257_817_261_112_292_5e-1,
    1.608_378_514_874_227_7e-2,
    6.587_491_615_298_378e-4,
    1.631_538_713_730_209_8e-2,
];
const ERF_Q: [f64; 5] = [
    2.568_520_192_289_822_4e0,
    1.872_952_849_923_467_3e0,
    5.279_051_029_514_284e-1,
    6.051_834_131_244_132e-2,
    2.335_204_976_268_691_8e-3,
];

/// `erf(x)` for `|x| <= 0.5`.
fn erf_small(x: f64) -> f64 {
    let y = x * x;
    let mut num = ERF_A[4] * y;
    let mut den = y;
    for i in 0..3 {
        num = (num + ERF_A[i]) * y;
        den = (den + ERF_B[i]) * y;
    }
    x * (num + ERF_A[3]) / (den + ERF_B[3])
}

/// `erfcx(y)` for `y > 0.5`.
fn erfcx_large(y: f64) -> f64 {
    if y <= 4.0 {
        let mut num = ERF_C[8] * y;
        let mut den = y;
        for i in 0..7 {
            num = (num + ERF_C[i]) * y;
            den = (den + ERF_D[i]) * y;
        }
        (num + ERF_C[7]) / (den + ERF_D[7])
    } else {
        let z = 1.0 / (y * y);
        let mut num = ERF_P[5] * z;
        let mut den = z;
        for i in 0..4 {
            num = (num + ERF_P[i]) * z;
            den = (den + ERF_Q[i]) * z;
        }
        let r = z * (num + ERF_P[4]) / (den + ERF_Q[4]);
        (FRAC_1_SQRT_PI - r) / y
    }
}

/// `exp(-y^2)` split so that the rounding of `y^2` does not leak into the
/// result.
fn exp_neg_square(y: f64) -> f64 {
    let head = (y * 16.0).trunc() / 16.0;
    let tail = (y - head) * (y + head);
    (-head * head).exp() * (-tail).exp()
}

/// `erfc(y)` for `y > 0.5`.
fn erfc_positive(y: f64) -> f64 {
    if y >= 26.6 {
        return 0.0;
    }
    exp_neg_square(y) * erfcx_large(y)
}

pub fn erf(x: f64) -> f64 {
    let y = x.abs();
    if y <= 0.5 {
        erf_small(x)
    } else {
        let v = 1.0 - erfc_positive(y);
        if x < 0.0 {
            -v
        } else {
            v
        }
    }
}

pub fn erfc(x: f64) -> f64 {
    let y = x.abs();
    if y <= 0.5 {
        1.0 - erf_small(x)
    } else if x > 0.0 {
        erfc_positive(y)
    } else {
        2.0 - erfc_positive(y)
    }
}

/// Scaled complementary error function `exp(x^2) erfc(x)`.
pub fn erfcx(x: f64) -> f64 {
    let y = x.abs();
    if y <= 0.5 {
        (x * x).exp() * (1.0 - erf_small(x))
    } else if x > 0.0 {
        erfcx_large(y)
    } else {
        let e = (y * y).exp();
        2.0 * e - erfcx_large(y)
    }
}

/// `exp(a) erfc(b)` without intermediate overflow.
pub fn exp_erfc(a: f64, b: f64) -> f64 {
    exp_erfc_split(a, b, a - b * b)
}

/// As [`exp_erfc`] with the exponent `a - b^2` supplied by the caller, who
/// can often form it without cancellation.
pub fn exp_erfc_split(a: f64, b: f64, a_minus_b2: f64) -> f64 {
    if b >= 0.0 {
        a_minus_b2.exp() * erfcx(b)
    } else {
        a.exp() * erfc(b)
    }
}

/// `erf(v) - erf(u)` evaluated through whichever tail avoids cancellation.
pub fn erf_diff(u: f64, v: f64) -> f64 {
    if u >= 0.0 && v >= 0.0 {
        erfc(u) - erfc(v)
    } else if u <= 0.0 && v <= 0.0 {
        erfc(-v) - erfc(-u)
    } else {
        erf(v) - erf(u)
    }
}

fn bessel_series(z: f64, order: u32) -> f64 {
    let scale = if order == 0 { 1.0 } else { 0.5 * z };
    scale * bessel_series_sum(z, order)
}

/// `sum_k (-z^2/4)^k / (k! (k + order)!)` times `order!`.
fn bessel_series_sum(z: f64, order: u32) -> f64 {
    let q = -0.25 * z * z;
    let mut term = 1.0;
    let mut sum = term;
    let nu = order as f64;
    for k in 1..60 {
        let k = k as f64;
        term *= q / (k * (k + nu));
        sum += term;
        if term.abs() < 1e-17 * sum.abs() {
            break;
        }
    }
    sum
}

/// `(J0(z), J1(z))` by normalised backward recurrence.
fn bessel_miller(z: f64) -> (f64, f64) {
    let start = 2 * ((z + 15.0 + (40.0 * z).sqrt()) as usize / 2 + 1);
    let mut j = vec![0.0; start + 2];
    j[start] = 1e-30;
    for k in (1..=start).rev() {
        j[k - 1] = 2.0 * k as f64 / z * j[k] - j[k + 1];
        if j[k - 1].abs() > 1e250 {
            j.iter_mut().for_each(|v| *v *= 1e-250);
        }
    }
    let norm = j[0] + 2.0 * j.iter().skip(2).step_by(2).sum::<f64>();
    (j[0] / norm, j[1] / norm)
}

/// Hankel asymptotic amplitudes `(P, Q)` for order `nu`.
fn hankel_pq(z: f64, nu: f64) -> (f64, f64) {
    let mu = 4.0 * nu * nu;
    let (mut p, mut q) = (1.0, 0.0);
    let mut a = 1.0;
    let mut last = f64::INFINITY;
    for k in 1..80 {
        let odd = (2 * k - 1) as f64;
        a *= (mu - odd * odd) / (k as f64 * 8.0 * z);
        if a.abs() > last || a == 0.0 {
            break;
        }
        last = a.abs();
        let sign = if (k / 2) % 2 == 0 { 1.0 } else { -1.0 };
        if k % 2 == 0 {
            p += sign * a;
        } else {
            q += sign * a;
        }
        if a.abs() < 1e-17 {
            break;
        }
    }
    (p, q)
}

/// `J0` for any real argument.
pub fn j0(z: f64) -> f64 {
    let z = z.abs();
    if z < 8.0 {
        bessel_series(z, 0)
    } else if z < 25.0 {
        bessel_miller(z).0
    } else {
        let (p, q) = hankel_pq(z, 0.0);
        let (s, c) = z.sin_cos();
        let amp = (2.0 / (PI * z)).sqrt() * FRAC_1_SQRT_2;
        amp * (p * (c + s) - q * (s - c))
    }
}

/// `J1` for any real argument.
pub fn j1(z: f64) -> f64 {
    let sign = z.signum();
    let z = z.abs();
    let v = if z < 8.0 {
        bessel_series(z, 1)
    } else if z < 25.0 {
        bessel_miller(z).1
    } else {
        let (p, q) = hankel_pq(z, 1.0);
        let (s, c) = z.sin_cos();
        let amp = (2.0 / (PI * z)).sqrt() * FRAC_1_SQRT_2;
        amp * (p * (s - c) + q * (s + c))
    };
    sign * v
}

/// `J1(z) / z`, equal to `1/2` at the origin.
pub fn j1_over_z(z: f64) -> f64 {
    let y = z.abs();
    if y < 8.0 {
        0.5 * bessel_series_sum(y, 1)
    } else {
        j1(y) / y
    }
}

pub fn bessel_j0(z: f64) -> Result<f64> {
    if z < 0.0 {
        return Err(Error::NegativeArgument(z));
    }
    Ok(j0(z))
}

pub fn bessel_j1(z: f64) -> Result<f64> {
    if z < 0.0 {
        return Err(Error::NegativeArgument(z));
    }
    Ok(j1(z))
}

/// Centred normal density with the given variance.
pub fn gaussian(x: f64, variance: f64) -> f64 {
    (-0.5 * x * x / variance).exp() / (2.0 * PI * variance).sqrt()
}

/// Heat kernel `g(t, x) = exp(-x^2 / (8 gamma_p t)) / (2 sqrt(2 pi gamma_p t))`.
pub fn heat_kernel(t: f64, x: f64, gamma_p: f64) -> Result<f64> {
    if !(t > 0.0) {
        return Err(Error::NonPositiveTime(t));
    }
    Ok(gaussian(x, 4.0 * gamma_p * t))
}

/// Heat kernel convolved with the Laplace density `exp(-|x|/a) / (2a)`.
pub fn heat_laplace(t: f64, x: f64, a: f64, gamma_p: f64) -> f64 {
    let (minus, plus) = laplace_tail_terms(t, x, a, gamma_p);
    (minus + plus) / (4.0 * a)
}

/// The two products `exp(2 gamma_p t / a^2 -+ x/a) erfc(b-+)` appearing in
/// the heat-propagated Laplace density, with
/// `b-+ = (2 gamma_p t / a -+ x/2) / sqrt(2 gamma_p t)`.
fn laplace_tail_terms(t: f64, x: f64, a: f64, gamma_p: f64) -> (f64, f64) {
    let s = (2.0 * gamma_p * t).sqrt();
    let big = 2.0 * gamma_p * t / (a * a);
    let gauss = -x * x / (8.0 * gamma_p * t);
    let drift = 2.0 * gamma_p * t / a;
    let bm = (drift - 0.5 * x) / s;
    let bp = (drift + 0.5 * x) / s;
    (
        exp_erfc_split(big - x / a, bm, gauss),
        exp_erfc_split(big + x / a, bp, gauss),
    )
}

/// Heat kernel convolved with the uniform density on `[-a, a]`.
pub fn heat_box(t: f64, x: f64, a: f64, gamma_p: f64) -> f64 {
    let w = (8.0 * gamma_p * t).sqrt();
    erf_diff((x - a) / w, (x + a) / w) / (4.0 * a)
}

/// One sample of a kernel that may carry Dirac masses. The distribution is
/// `value` (as a function of `x`) plus `sum weight * delta(x - location)`.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelSample {
    pub value: f64,
    pub delta_shifts: Vec<(f64, f64)>,
}

/// Scalar kernels of the undephased problem at a fixed time.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelSet {
    pub t: f64,
    pub gamma_p: f64,
    pub delta: f64,
    pub omega: f64,
}

/// `[h+, h-, phi+, phi-]` at one point.
pub type TailValues = [f64; 4];

impl KernelSet {
    /// Requires `t > 0`; `h` and `phi` further need `delta > 0` and
    /// `omega > 0`, which is checked by [`KernelSet::laplace_ready`].
    pub fn new(p: &Params, t: f64) -> Result<Self> {
        if !(t > 0.0) {
            return Err(Error::NonPositiveTime(t));
        }
        Ok(KernelSet {
            t,
            gamma_p: p.gamma_p,
            delta: p.delta,
            omega: p.omega,
        })
    }

    pub fn laplace_ready(&self) -> Result<()> {
        if self.delta <= 0.0 {
            return Err(Error::DegenerateParams("delta must be positive"));
        }
        if self.omega <= 0.0 {
            return Err(Error::DegenerateParams("omega must be positive"));
        }
        Ok(())
    }

    /// Light-cone half width `2 delta t`.
    pub fn cone(&self) -> f64 {
        2.0 * self.delta * self.t
    }

    /// Laplace scale `delta / omega`.
    pub fn scale(&self) -> f64 {
        self.delta / self.omega
    }

    pub fn g(&self, x: f64) -> f64 {
        gaussian(x, 4.0 * self.gamma_p * self.t)
    }

    /// The Laplace density `f_L` with scale `delta / omega`.
    pub fn f_laplace(&self, x: f64) -> f64 {
        let a = self.scale();
        (-x.abs() / a).exp() / (2.0 * a)
    }

    pub fn h_plus(&self, x: f64) -> f64 {
        let (m, p) = laplace_tail_terms(self.t, x, self.scale(), self.gamma_p);
        0.25 * self.omega / self.delta * (m + p)
    }

    pub fn h_minus(&self, x: f64) -> f64 {
        let (m, p) = laplace_tail_terms(self.t, x, self.scale(), self.gamma_p);
        0.25 * self.omega / self.delta * (m - p)
    }

    /// `h+`, `h-`, `phi+ = h+ * f_L` and `phi- = h- * f_L`, sharing the
    /// erfc evaluations.
    pub fn tails(&self, x: f64) -> TailValues {
        let (d, w, t, gp) = (self.delta, self.omega, self.t, self.gamma_p);
        let (m, p) = laplace_tail_terms(t, x, d / w, gp);
        let h_plus = 0.25 * w / d * (m + p);
        let h_minus = 0.25 * w / d * (m - p);
        let d3 = d * d * d;
        let phi_plus = -w / (8.0 * d3)
            * ((4.0 * w * w * gp * t - d * d - w * d * x) * m
                + (4.0 * w * w * gp * t - d * d + w * d * x) * p)
            + w * w / (d * d) * (gp * t / (2.0 * PI)).sqrt() * (-x * x / (8.0 * gp * t)).exp();
        let phi_minus =
            w * w / (8.0 * d3) * ((4.0 * w * gp * t + d * x) * p - (4.0 * w * gp * t - d * x) * m);
        [h_plus, h_minus, phi_plus, phi_minus]
    }

    /// `kappa0`, supported on the open light cone.
    pub fn kappa0(&self, x: f64) -> f64 {
        let c = self.cone();
        if x.abs() >= c {
            return 0.0;
        }
        let r = ((c - x) * (c + x)).sqrt();
        j0(self.omega / self.delta * r) / (4.0 * self.delta)
    }

    /// Regular part of `kappa1` on the closed light cone.
    pub fn kappa1_smooth(&self, x: f64) -> f64 {
        let c = self.cone();
        if x.abs() > c {
            return 0.0;
        }
        let ratio = self.omega / self.delta;
        let r = ((c - x) * (c + x)).max(0.0).sqrt();
        -self.t * self.omega * ratio * j1_over_z(ratio * r)
    }

    /// The two half-weight Dirac masses of `kappa1` at `-+ 2 delta t`.
    pub fn kappa1_deltas(&self) -> Vec<(f64, f64)> {
        let c = self.cone();
        vec![(c, 0.5), (-c, 0.5)]
    }
}

fn laplace_kernels(p: &Params, t: f64) -> Result<KernelSet> {
    let k = KernelSet::new(p, t)?;
    k.laplace_ready()?;
    Ok(k)
}

pub fn h_plus(t: f64, x: f64, p: &Params) -> Result<f64> {
    Ok(laplace_kernels(p, t)?.h_plus(x))
}

pub fn h_minus(t: f64, x: f64, p: &Params) -> Result<f64> {
    Ok(laplace_kernels(p, t)?.h_minus(x))
}

pub fn phi_plus(t: f64, x: f64, p: &Params) -> Result<f64> {
    Ok(laplace_kernels(p, t)?.tails(x)[2])
}

pub fn phi_minus(t: f64, x: f64, p: &Params) -> Result<f64> {
    Ok(laplace_kernels(p, t)?.tails(x)[3])
}

fn cone_kernels(p: &Params, t: f64) -> Result<KernelSet> {
    let k = KernelSet::new(p, t)?;
    if k.delta <= 0.0 {
        return Err(Error::DegenerateParams("delta must be positive"));
    }
    Ok(k)
}

pub fn kg_kernel_0(t: f64, x: f64, p: &Params) -> Result<f64> {
    Ok(cone_kernels(p, t)?.kappa0(x))
}

pub fn kg_kernel_1(t: f64, x: f64, p: &Params) -> Result<KernelSample> {
    let k = cone_kernels(p, t)?;
    Ok(KernelSample {
        value: k.kappa1_smooth(x),
        delta_shifts: k.kappa1_deltas(),
    })
}
