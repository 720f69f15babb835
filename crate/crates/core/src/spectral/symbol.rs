use nalgebra::Matrix3;
use num_complex::Complex64;

use crate::params::Params;

pub type CMat3 = Matrix3<Complex64>;

/// The Fourier symbol `Q(xi)` of the coupled system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymbolMatrix {
    pub xi: f64,
    pub q: CMat3,
}

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn build_symbol(xi: f64, p: &Params) -> SymbolMatrix {
    let diff = -2.0 * p.gamma_p * xi * xi;
    let drift = c(0.0, -2.0 * xi * p.delta);
    #[rustfmt::skip]
    let q = CMat3::new(
        c(diff, 0.0), c(0.0, 0.0), drift,
        c(0.0, 0.0), c(diff - 2.0 * p.gamma_z, 0.0), c(p.omega, 0.0),
        drift, c(-4.0 * p.omega, 0.0), c(diff, 0.0),
    );
    SymbolMatrix { xi, q }
}

/// Coefficients of `det(lambda I - Q) = lambda^3 + a1 lambda^2 + a2 lambda + a3`.
pub fn char_coeffs(xi: f64, p: &Params) -> (f64, f64, f64) {
    let (gp, gz, d, w) = (p.gamma_p, p.gamma_z, p.delta, p.omega);
    let x2 = xi * xi;
    let a1 = 6.0 * gp * x2 + 2.0 * gz;
    let a2 = 12.0 * gp * gp * x2 * x2 + (4.0 * d * d + 8.0 * gp * gz) * x2 + 4.0 * w * w;
    let a3 = x2
        * (8.0 * gp.powi(3) * x2 * x2
            + (8.0 * d * d * gp + 8.0 * gp * gp * gz) * x2
            + 8.0 * w * w * gp
            + 8.0 * d * d * gz);
    (a1, a2, a3)
}

/// The characteristic cubic evaluated at `lambda`.
pub fn char_poly(xi: f64, p: &Params, lambda: Complex64) -> Complex64 {
    let (a1, a2, a3) = char_coeffs(xi, p);
    ((lambda + a1) * lambda + a2) * lambda + a3
}

/// Frobenius norm.
pub fn frobenius(m: &CMat3) -> f64 {
    m.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symbol_at_zero_frequency() {
        let p = Params::new(0.3, 0.2, 0.7, 0.5).unwrap();
        let s = build_symbol(0.0, &p);
        let z = c(0.0, 0.0);
        #[rustfmt::skip]
        let want = CMat3::new(z, z, z, z, c(-0.4, 0.0), c(0.5, 0.0), z, c(-2.0, 0.0), z);
        assert_eq!(s.q, want);
    }

    #[test]
    fn symbol_without_driving_or_dephasing() {
        let p = Params::new(1.0, 0.0, 1.0, 0.0).unwrap();
        let s = build_symbol(1.0, &p);
        let z = c(0.0, 0.0);
        #[rustfmt::skip]
        let want = CMat3::new(
            c(-2.0, 0.0), z, c(0.0, -2.0),
            z, c(-2.0, 0.0), z,
            c(0.0, -2.0), z, c(-2.0, 0.0),
        );
        assert_eq!(s.q, want);
    }

    #[test]
    fn coefficients_at_zero_frequency() {
        let p = Params::new(0.3, 0.2, 0.7, 0.5).unwrap();
        assert_eq!(char_coeffs(0.0, &p), (0.4, 1.0, 0.0));
    }

    #[test]
    fn hurwitz_combination_matches_closed_polynomial() {
        let p = Params::new(0.3, 0.2, 0.7, 0.5).unwrap();
        let (gp, gz, d, w) = (p.gamma_p, p.gamma_z, p.delta, p.omega);
        for xi in [0.1, 0.9, 2.5] {
            let (a1, a2, a3) = char_coeffs(xi, &p);
            let x2: f64 = xi * xi;
            let want = 64.0 * gp.powi(3) * x2.powi(3)
                + (16.0 * d * d * gp + 64.0 * gp * gp * gz) * x2 * x2
                + (16.0 * w * w * gp + 16.0 * gp * gz * gz) * x2
                + 8.0 * w * w * gz;
            assert!((a1 * a2 - a3 - want).abs() < 1e-12 * want, "{xi}");
        }
    }
}
