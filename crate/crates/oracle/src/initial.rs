use std::f64::consts::PI;

use num_complex::Complex64;
use oqbm::{DensityField, Error, InitialCondition, Result, SpatialGrid};

fn normal(x: f64, sigma: f64) -> f64 {
    (-0.5 * (x / sigma).powi(2)).exp() / (sigma * (2.0 * PI).sqrt())
}

fn laplace(x: f64, a: f64) -> f64 {
    (-x.abs() / a).exp() / (2.0 * a)
}

fn uniform(x: f64, a: f64) -> f64 {
    let h = 1.0 / (2.0 * a);
    if x.abs() < a {
        h
    } else if x.abs() == a {
        0.5 * h
    } else {
        0.0
    }
}

/// Samples an initial density matrix directly from its defining formulas.
pub fn initial_density(ic: &InitialCondition, grid: &SpatialGrid) -> Result<DensityField> {
    ic.validate()?;
    if let InitialCondition::Custom(d) = ic {
        if d.grid != *grid {
            return Err(Error::GridMismatch);
        }
        return Ok(d.clone());
    }
    let x = grid.nodes();
    let n = x.len();
    let (mut r11, mut r22, mut r12) = (
        vec![0.0; n],
        vec![0.0; n],
        vec![Complex64::new(0.0, 0.0); n],
    );
    for (j, &x) in x.iter().enumerate() {
        let (a, b, c) = match *ic {
            InitialCondition::GaussianMixture { p, sigma1, sigma2 } => (
                p * normal(x, sigma1),
                (1.0 - p) * normal(x, sigma2),
                Complex64::new(0.0, 0.0),
            ),
            InitialCondition::GaussianCoherent { p, mu, k, sigma } => {
                let f = normal(x, sigma);
                let coh = mu * (p * (1.0 - p)).sqrt() * f * Complex64::new(0.0, k * x).exp();
                (p * f, (1.0 - p) * f, coh)
            }
            InitialCondition::LaplaceMixture { p, a, b } => {
                (p * laplace(x, a), (1.0 - p) * laplace(x, b), 0.0.into())
            }
            InitialCondition::UniformMixture { p, a, b } => {
                (p * uniform(x, a), (1.0 - p) * uniform(x, b), 0.0.into())
            }
            InitialCondition::LaplaceCoherent { p, r, q, scale } => {
                let f = laplace(x, scale);
                let c = (p * (1.0 - p)).sqrt() * f;
                (p * f, (1.0 - p) * f, Complex64::new(r * c, q * c))
            }
            InitialCondition::Custom(_) => unreachable!(),
        };
        r11[j] = a;
        r22[j] = b;
        r12[j] = c;
    }
    DensityField::new(*grid, 0.0, r11, r22, r12)
}
