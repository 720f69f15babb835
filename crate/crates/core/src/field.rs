//! Sampled density-matrix and Bloch-coordinate fields.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::grid::SpatialGrid;

/// The 2x2 Hermitian density matrix sampled on a grid. Only `rho12` is
/// stored for the off-diagonal part; `rho21` is its conjugate.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityField {
    pub grid: SpatialGrid,
    pub t: f64,
    pub rho11: Vec<f64>,
    pub rho22: Vec<f64>,
    pub rho12: Vec<Complex64>,
}

/// Bloch coordinates `(rho_plus, c_i, rho_minus)` of the coupled system plus
/// the decoupled real coherence `c_r`.
#[derive(Debug, Clone, PartialEq)]
pub struct BlochField {
    pub grid: SpatialGrid,
    pub t: f64,
    pub rho_plus: Vec<f64>,
    pub c_i: Vec<f64>,
    pub rho_minus: Vec<f64>,
    pub c_r: Vec<f64>,
}

impl DensityField {
    pub fn new(
        grid: SpatialGrid,
        t: f64,
        rho11: Vec<f64>,
        rho22: Vec<f64>,
        rho12: Vec<Complex64>,
    ) -> Result<Self> {
        let n = grid.len();
        if rho11.len() != n || rho22.len() != n || rho12.len() != n {
            return Err(Error::GridMismatch);
        }
        Ok(DensityField {
            grid,
            t,
            rho11,
            rho22,
            rho12,
        })
    }

    pub fn zeros(grid: SpatialGrid, t: f64) -> Self {
        let n = grid.len();
        DensityField {
            grid,
            t,
            rho11: vec![0.0; n],
            rho22: vec![0.0; n],
            rho12: vec![Complex64::new(0.0, 0.0); n],
        }
    }

    /// Probability density `P = rho11 + rho22`.
    pub fn probability(&self) -> Vec<f64> {
        self.rho11
            .iter()
            .zip(&self.rho22)
            .map(|(a, b)| a + b)
            .collect()
    }

    /// Population imbalance `Q = rho11 - rho22`.
    pub fn imbalance(&self) -> Vec<f64> {
        self.rho11
            .iter()
            .zip(&self.rho22)
            .map(|(a, b)| a - b)
            .collect()
    }

    /// Trapezoid integral of the trace.
    pub fn trace_integral(&self) -> f64 {
        self.grid.trapezoid(&self.probability())
    }

    pub fn to_bloch(&self) -> BlochField {
        to_bloch(self)
    }
}

impl BlochField {
    pub fn new(
        grid: SpatialGrid,
        t: f64,
        rho_plus: Vec<f64>,
        c_i: Vec<f64>,
        rho_minus: Vec<f64>,
        c_r: Vec<f64>,
    ) -> Result<Self> {
        let n = grid.len();
        if [rho_plus.len(), c_i.len(), rho_minus.len(), c_r.len()]
            .iter()
            .any(|&m| m != n)
        {
            return Err(Error::GridMismatch);
        }
        Ok(BlochField {
            grid,
            t,
            rho_plus,
            c_i,
            rho_minus,
            c_r,
        })
    }

    pub fn zeros(grid: SpatialGrid, t: f64) -> Self {
        let n = grid.len();
        BlochField {
            grid,
            t,
            rho_plus: vec![0.0; n],
            c_i: vec![0.0; n],
            rho_minus: vec![0.0; n],
            c_r: vec![0.0; n],
        }
    }

    /// The coupled components in the order `(rho_plus, c_i, rho_minus)`.
    pub fn coupled(&self) -> [&[f64]; 3] {
        [&self.rho_plus, &self.c_i, &self.rho_minus]
    }

    pub fn coupled_mut(&mut self) -> [&mut Vec<f64>; 3] {
        [&mut self.rho_plus, &mut self.c_i, &mut self.rho_minus]
    }

    /// Largest pointwise difference over all four components.
    pub fn max_abs_diff(&self, other: &BlochField) -> Result<f64> {
        if self.grid != other.grid {
            return Err(Error::GridMismatch);
        }
        let pairs = [
            (&self.rho_plus, &other.rho_plus),
            (&self.c_i, &other.c_i),
            (&self.rho_minus, &other.rho_minus),
            (&self.c_r, &other.c_r),
        ];
        Ok(pairs
            .iter()
            .flat_map(|(a, b)| a.iter().zip(b.iter()).map(|(x, y)| (x - y).abs()))
            .fold(0.0, f64::max))
    }

    pub fn to_density(&self) -> DensityField {
        from_bloch(self)
    }
}

/// `rho_pm = rho11 +- rho22`, `c_r = Re rho12`, `c_i = Im rho12`.
pub fn to_bloch(d: &DensityField) -> BlochField {
    BlochField {
        grid: d.grid,
        t: d.t,
        rho_plus: d.probability(),
        c_i: d.rho12.iter().map(|z| z.im).collect(),
        rho_minus: d.imbalance(),
        c_r: d.rho12.iter().map(|z| z.re).collect(),
    }
}

/// Inverse of [`to_bloch`].
pub fn from_bloch(b: &BlochField) -> DensityField {
    let half_sum = |s: f64| move |(p, m): (&f64, &f64)| 0.5 * (p + s * m);
    DensityField {
        grid: b.grid,
        t: b.t,
        rho11: b
            .rho_plus
            .iter()
            .zip(&b.rho_minus)
            .map(half_sum(1.0))
            .collect(),
        rho22: b
            .rho_plus
            .iter()
            .zip(&b.rho_minus)
            .map(half_sum(-1.0))
            .collect(),
        rho12: b
            .c_r
            .iter()
            .zip(&b.c_i)
            .map(|(&re, &im)| Complex64::new(re, im))
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn bump(grid: &SpatialGrid) -> Vec<f64> {
        grid.nodes().iter().map(|x| (-x * x).exp()).collect()
    }

    #[test]
    fn symmetric_diagonal_has_no_imbalance() {
        let g = SpatialGrid::new(4.0, 64).unwrap();
        let half: Vec<f64> = bump(&g).iter().map(|v| 0.5 * v).collect();
        let d = DensityField::new(
            g,
            0.0,
            half.clone(),
            half,
            vec![Complex64::new(0.0, 0.0); 64],
        )
        .unwrap();
        let b = to_bloch(&d);
        assert_eq!(b.rho_plus, bump(&g));
        assert!(b.rho_minus.iter().all(|&v| v == 0.0));
        assert!(b.c_r.iter().chain(&b.c_i).all(|&v| v == 0.0));
    }

    #[test]
    fn equal_plus_and_minus_populate_the_upper_level() {
        let g = SpatialGrid::new(4.0, 64).unwrap();
        let b = BlochField::new(g, 1.0, bump(&g), vec![0.0; 64], bump(&g), vec![0.0; 64]).unwrap();
        let d = from_bloch(&b);
        assert_eq!(d.rho11, bump(&g));
        assert!(d.rho22.iter().all(|&v| v == 0.0));
        assert_eq!(d.t, 1.0);
    }

    #[test]
    fn length_mismatch_is_rejected() {
        let g = SpatialGrid::new(4.0, 64).unwrap();
        assert_eq!(
            DensityField::new(
                g,
                0.0,
                vec![0.0; 64],
                vec![0.0; 32],
                vec![Complex64::new(0.0, 0.0); 64]
            ),
            Err(Error::GridMismatch)
        );
    }
}
