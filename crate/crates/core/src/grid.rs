//! Uniform discretisation of a truncated real line and its Fourier dual.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Nodes `x_j = -L + j dx`, `j = 0..n`, with `dx = 2L / n` and `n` a power of
/// two. The node `+L` is omitted, which makes the grid one period of a
/// periodic lattice.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpatialGrid {
    half_width: f64,
    n_points: usize,
}

impl SpatialGrid {
    pub fn new(half_width: f64, n_points: usize) -> Result<Self> {
        if !(half_width.is_finite() && half_width > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "half width {half_width} must be positive"
            )));
        }
        if n_points < 4 || !n_points.is_power_of_two() {
            return Err(Error::InvalidGrid(format!(
                "{n_points} points is not a power of two >= 4"
            )));
        }
        Ok(SpatialGrid {
            half_width,
            n_points,
        })
    }

    /// Smallest dyadic grid (both `L` and `dx` powers of two) with half-width
    /// at least `min_half_width` and spacing at most `max_dx`.
    ///
    /// Dyadic spacing puts integer and half-integer abscissae on nodes, which
    /// keeps jump points of piecewise data on the grid.
    pub fn dyadic(min_half_width: f64, max_dx: f64) -> Result<Self> {
        if !(min_half_width > 0.0 && max_dx > 0.0) {
            return Err(Error::InvalidGrid("sizes must be positive".into()));
        }
        let half_width = 2f64.powi(min_half_width.log2().ceil() as i32);
        let mut n = 4usize;
        while 2.0 * half_width / n as f64 > max_dx {
            n *= 2;
            if n > 1 << 26 {
                return Err(Error::InvalidGrid(format!(
                    "dx {max_dx} too small for half width {half_width}"
                )));
            }
        }
        SpatialGrid::new(half_width, n)
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn len(&self) -> usize {
        self.n_points
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn dx(&self) -> f64 {
        2.0 * self.half_width / self.n_points as f64
    }

    pub fn node(&self, j: usize) -> f64 {
        -self.half_width + j as f64 * self.dx()
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.n_points).map(|j| self.node(j)).collect()
    }

    /// Frequency of FFT bin `k`: `pi k / L` for `k < n/2`, `pi (k - n) / L`
    /// otherwise.
    pub fn fourier_node(&self, k: usize) -> f64 {
        let n = self.n_points as isize;
        let signed = if (k as isize) < n / 2 {
            k as isize
        } else {
            k as isize - n
        };
        PI * signed as f64 / self.half_width
    }

    /// All frequencies in FFT order.
    pub fn fourier_nodes(&self) -> Vec<f64> {
        (0..self.n_points).map(|k| self.fourier_node(k)).collect()
    }

    /// Nyquist frequency `pi / dx`.
    pub fn max_frequency(&self) -> f64 {
        PI / self.dx()
    }

    /// Trapezoid rule over the closed interval `[x_0, x_{n-1}]`.
    pub fn trapezoid(&self, values: &[f64]) -> f64 {
        debug_assert_eq!(values.len(), self.n_points);
        let n = values.len();
        let inner: f64 = values.iter().sum();
        self.dx() * (inner - 0.5 * (values[0] + values[n - 1]))
    }

    /// Index of the node closest to `x`, if `x` lies inside the grid.
    pub fn nearest(&self, x: f64) -> Option<usize> {
        let j = ((x + self.half_width) / self.dx()).round();
        (j >= 0.0 && (j as usize) < self.n_points).then_some(j as usize)
    }
}
