//! Trapezoid-rule inverse Fourier transform of the symbol exponential, with
//! a self-contained matrix exponential.

use std::f64::consts::PI;

use num_complex::Complex64;
use oqbm::{Error, Params, Result};
use rayon::prelude::*;

pub type CMat = [[Complex64; 3]; 3];

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

fn mul(a: &CMat, b: &CMat) -> CMat {
    let mut c = [[ZERO; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            c[i][j] = (0..3).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    c
}

fn identity() -> CMat {
    let mut m = [[ZERO; 3]; 3];
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = Complex64::new(1.0, 0.0);
    }
    m
}

/// `exp(a)` by Taylor series on `a / 2^s` with `|a / 2^s|_1 <= 1/2`, then
/// `s` squarings.
pub fn expm(a: &CMat) -> CMat {
    let norm = (0..3)
        .map(|j| (0..3).map(|i| a[i][j].norm()).sum::<f64>())
        .fold(0.0, f64::max);
    let s = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as i32
    } else {
        0
    };
    let scale = 0.5f64.powi(s);
    let b = a.map(|row| row.map(|v| v * scale));
    let mut sum = identity();
    let mut term = identity();
    for k in 1..=24 {
        term = mul(&term, &b).map(|row| row.map(|v| v / k as f64));
        for i in 0..3 {
            for j in 0..3 {
                sum[i][j] += term[i][j];
            }
        }
    }
    for _ in 0..s {
        sum = mul(&sum, &sum);
    }
    sum
}

/// Fourier symbol of the coupled equations for `(rho_plus, c_i, rho_minus)`,
/// read off with `d/dx -> i xi`.
pub fn symbol(p: &Params, xi: f64) -> CMat {
    let diff = Complex64::new(-2.0 * p.gamma_p * xi * xi, 0.0);
    let drift = Complex64::new(0.0, -2.0 * p.delta * xi);
    let c = |v: f64| Complex64::new(v, 0.0);
    [
        [diff, ZERO, drift],
        [ZERO, diff - c(2.0 * p.gamma_z), c(p.omega)],
        [drift, c(-4.0 * p.omega), diff],
    ]
}

/// `exp(t Q(xi))`, with the scalar diffusion factor split off before the
/// matrix exponential.
pub fn symbol_exponential(p: &Params, t: f64, xi: f64) -> CMat {
    let decay = -2.0 * p.gamma_p * xi * xi * t;
    if decay < -745.0 {
        return [[ZERO; 3]; 3];
    }
    let mut q = symbol(p, xi);
    for (i, row) in q.iter_mut().enumerate() {
        row[i] -= decay / t;
    }
    expm(&q.map(|row| row.map(|v| v * t))).map(|row| row.map(|v| v * decay.exp()))
}

/// Sampled kernel and the largest imaginary part discarded.
#[derive(Debug, Clone)]
pub struct QuadResult {
    pub values: Vec<[[f64; 3]; 3]>,
    pub imag_residue: f64,
    pub intervals: usize,
    pub change: f64,
}

pub const QUAD_TOL: f64 = 1e-10;
pub const QUAD_CAP: usize = 1 << 22;

/// `(1/2 pi) int exp(i xi x) S(xi) d xi` over `[-xi_max, xi_max]` by the
/// trapezoid rule, doubling from `n_start` intervals until successive
/// estimates differ by less than [`QUAD_TOL`] everywhere.
pub fn quad_inverse_fourier(
    symbol: impl Fn(f64) -> CMat + Sync,
    x_points: &[f64],
    xi_max: f64,
    n_start: usize,
) -> Result<QuadResult> {
    let nx = x_points.len();
    let accumulate = |xis: &[f64], acc: &mut Vec<CMat>| {
        let vals: Vec<(f64, CMat)> = xis.par_iter().map(|&xi| (xi, symbol(xi))).collect();
        acc.par_iter_mut()
            .zip(x_points.par_iter())
            .for_each(|(a, &x)| {
                for (xi, s) in &vals {
                    let e = Complex64::new(0.0, xi * x).exp();
                    for i in 0..3 {
                        for j in 0..3 {
                            a[i][j] += s[i][j] * e;
                        }
                    }
                }
            });
    };
    let mut n = n_start.max(2);
    let mut h = 2.0 * xi_max / n as f64;
    let mut sums = vec![[[ZERO; 3]; 3]; nx];
    let ends: Vec<f64> = (0..=n).map(|j| -xi_max + j as f64 * h).collect();
    accumulate(&ends[1..n], &mut sums);
    let mut halves = vec![[[ZERO; 3]; 3]; nx];
    accumulate(&[-xi_max, xi_max], &mut halves);
    for (s, e) in sums.iter_mut().zip(&halves) {
        for i in 0..3 {
            for j in 0..3 {
                s[i][j] += 0.5 * e[i][j];
            }
        }
    }
    let estimate = |sums: &Vec<CMat>, h: f64| -> Vec<CMat> {
        sums.iter()
            .map(|m| m.map(|r| r.map(|v| v * h / (2.0 * PI))))
            .collect()
    };
    let mut prev = estimate(&sums, h);
    loop {
        let mids: Vec<f64> = (0..n).map(|j| -xi_max + (j as f64 + 0.5) * h).collect();
        accumulate(&mids, &mut sums);
        n *= 2;
        h *= 0.5;
        let next = estimate(&sums, h);
        let change = prev
            .iter()
            .zip(&next)
            .flat_map(|(a, b)| (0..9).map(move |k| (a[k / 3][k % 3] - b[k / 3][k % 3]).norm()))
            .fold(0.0, f64::max);
        if change < QUAD_TOL {
            let imag_residue = next
                .iter()
                .flatten()
                .flatten()
                .fold(0.0f64, |m, v| m.max(v.im.abs()));
            return Ok(QuadResult {
                values: next.iter().map(|m| m.map(|r| r.map(|v| v.re))).collect(),
                imag_residue,
                intervals: n,
                change,
            });
        }
        if n >= QUAD_CAP {
            return Err(Error::QuadratureNotConverged { order: n, change });
        }
        prev = next;
    }
}

/// Scalar version of [`quad_inverse_fourier`].
pub fn quad_inverse_scalar(
    symbol: impl Fn(f64) -> Complex64 + Sync,
    x_points: &[f64],
    xi_max: f64,
    n_start: usize,
) -> Result<Vec<f64>> {
    let r = quad_inverse_fourier(
        |xi| {
            let mut m = [[ZERO; 3]; 3];
            m[0][0] = symbol(xi);
            m
        },
        x_points,
        xi_max,
        n_start,
    )?;
    Ok(r.values.iter().map(|m| m[0][0]).collect())
}
