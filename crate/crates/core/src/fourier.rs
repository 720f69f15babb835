//! Discrete Fourier transforms on a [`SpatialGrid`], scaled to approximate
//! the continuous pair `u_hat(xi) = int u e^{-i xi x} dx`,
//! `u(x) = (1/2pi) int u_hat e^{i xi x} d xi`.

use num_complex::Complex64;
use rustfft::FftPlanner;

use crate::grid::SpatialGrid;

/// Sign `(-1)^k` that accounts for the grid starting at `-L`.
fn parity(k: usize) -> f64 {
    if k % 2 == 0 {
        1.0
    } else {
        -1.0
    }
}

/// Samples of the continuous transform at the grid frequencies (FFT order).
pub fn forward(grid: &SpatialGrid, values: &[f64]) -> Vec<Complex64> {
    let n = grid.len();
    let mut buf: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    FftPlanner::new().plan_fft_forward(n).process(&mut buf);
    let dx = grid.dx();
    buf.iter_mut()
        .enumerate()
        .for_each(|(k, z)| *z *= dx * parity(k));
    buf
}

/// Inverse of [`forward`]. Returns the real part and the largest imaginary
/// part discarded.
pub fn inverse(grid: &SpatialGrid, spectrum: &[Complex64]) -> (Vec<f64>, f64) {
    let n = grid.len();
    let scale = 1.0 / (2.0 * grid.half_width());
    let mut buf: Vec<Complex64> = spectrum
        .iter()
        .enumerate()
        .map(|(k, z)| z * (scale * parity(k)))
        .collect();
    FftPlanner::new().plan_fft_inverse(n).process(&mut buf);
    let residue = buf.iter().map(|z| z.im.abs()).fold(0.0, f64::max);
    (buf.iter().map(|z| z.re).collect(), residue)
}

/// Multiplies the spectrum of `values` by `multiplier(xi)` and transforms back.
pub fn apply_multiplier(
    grid: &SpatialGrid,
    values: &[f64],
    multiplier: impl Fn(f64) -> Complex64,
) -> Vec<f64> {
    let mut spec = forward(grid, values);
    spec.iter_mut()
        .enumerate()
        .for_each(|(k, z)| *z *= multiplier(grid.fourier_node(k)));
    inverse(grid, &spec).0
}
