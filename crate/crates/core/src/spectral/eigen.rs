use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::params::Params;
use crate::spectral::symbol::{char_coeffs, char_poly, frobenius, CMat3, SymbolMatrix};

/// Eigenvector matrices with condition number above this are rejected.
pub const MAX_CONDITION: f64 = 1e8;
/// Relative eigenvalue separation below which the basis is rejected.
pub const MIN_GAP: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EigenMethod {
    Cardano,
    Numeric,
}

/// Diagonalisation `Q = U diag(lambdas) U^{-1}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenSystem {
    pub lambdas: [Complex64; 3],
    pub vectors: CMat3,
    pub inverse: CMat3,
    pub condition: f64,
    pub method: EigenMethod,
}

/// Closed-form roots of the characteristic cubic, or `None` when both
/// Cardano branches degenerate (a triple root).
pub fn cardano_eigenvalues(xi: f64, p: &Params) -> Option<[Complex64; 3]> {
    let (gp, gz, d, w) = (p.gamma_p, p.gamma_z, p.delta, p.omega);
    let x2 = xi * xi;
    let (d2, w2, gz2) = (d * d, w * w, gz * gz);
    let pp = 12.0 * d2.powi(3) * x2.powi(3)
        + 12.0 * d2 * d2 * (3.0 * w2 + 2.0 * gz2) * x2 * x2
        + 12.0 * d2 * (3.0 * w2 * w2 - 5.0 * w2 * gz2 + gz2 * gz2) * x2
        + 3.0 * w2 * w2 * (4.0 * w2 - gz2);
    let qq = 4.0 * gz * (-18.0 * d2 * x2 + 9.0 * w2 - 2.0 * gz2);
    let rr = 4.0 * d2 * x2 + 4.0 * w2 - 4.0 / 3.0 * gz2;
    let root = 12.0 * Complex64::new(pp, 0.0).sqrt();
    let plus = qq + root;
    let minus = qq - root;
    let cube = if plus.norm() >= minus.norm() {
        plus
    } else {
        minus
    };
    let scale = qq.abs() + root.norm() + rr.abs().powf(1.5);
    if cube.norm() <= 1e-14 * scale || scale == 0.0 {
        return None;
    }
    let cc = cube.powf(1.0 / 3.0);
    let b = -2.0 * gp * x2 - 2.0 * gz / 3.0;
    let s3 = 0.5 * 3f64.sqrt();
    let l1 = b + cc / 3.0 - rr / cc;
    let mid = b - cc / 6.0 + rr / (2.0 * cc);
    let im = Complex64::new(0.0, s3) * (cc / 3.0 + rr / cc);
    Some([l1, mid + im, mid - im])
}

/// Eigenvalues from a general complex Schur decomposition.
pub fn numeric_eigenvalues(q: &CMat3) -> [Complex64; 3] {
    let v = q
        .eigenvalues()
        .unwrap_or_else(|| nalgebra::Schur::new(*q).unpack().1.diagonal());
    [v[0], v[1], v[2]]
}

/// Replaces the root of smallest modulus by `-a3 / (product of the other
/// two)`, which avoids cancellation near the conserved mode, then applies a
/// guarded Newton step to each root.
fn refine(xi: f64, p: &Params, mut l: [Complex64; 3]) -> [Complex64; 3] {
    let (_, _, a3) = char_coeffs(xi, p);
    let small = (0..3)
        .min_by(|&i, &j| l[i].norm().partial_cmp(&l[j].norm()).unwrap())
        .unwrap();
    let others: Complex64 = (0..3).filter(|&i| i != small).map(|i| l[i]).product();
    if others.norm() > 0.0 {
        let v = -a3 / others;
        if char_poly(xi, p, v).norm() <= char_poly(xi, p, l[small]).norm() {
            l[small] = v;
        }
    }
    l.map(|z| polish(xi, p, z))
}

/// One guarded Newton step on the characteristic cubic.
fn polish(xi: f64, p: &Params, lambda: Complex64) -> Complex64 {
    let (a1, a2, _) = char_coeffs(xi, p);
    let f = char_poly(xi, p, lambda);
    let df = (3.0 * lambda + 2.0 * a1) * lambda + a2;
    if df.norm() == 0.0 {
        return lambda;
    }
    let next = lambda - f / df;
    if char_poly(xi, p, next).norm() < f.norm() {
        next
    } else {
        lambda
    }
}

/// Kernel vector of the singular matrix `A`, as the largest cross product of
/// two of its rows.
fn null_vector(a: &CMat3) -> Complex64Vec {
    let rows = [
        a.row(0).transpose(),
        a.row(1).transpose(),
        a.row(2).transpose(),
    ];
    let pairs = [(0, 1), (0, 2), (1, 2)];
    pairs
        .iter()
        .map(|&(i, j)| rows[i].cross(&rows[j]))
        .max_by(|u, v| u.norm().partial_cmp(&v.norm()).unwrap())
        .unwrap()
}

type Complex64Vec = nalgebra::Vector3<Complex64>;

fn eigenvector(sm: &SymbolMatrix, p: &Params, lambda: Complex64, scale: f64) -> Complex64Vec {
    let diff = 2.0 * p.gamma_p * sm.xi * sm.xi;
    let d1 = diff + lambda;
    let d2 = diff + 2.0 * p.gamma_z + lambda;
    let v = if d1.norm() > 1e-8 * scale && d2.norm() > 1e-8 * scale {
        Complex64Vec::new(
            Complex64::new(0.0, -2.0 * p.delta * sm.xi) / d1,
            p.omega / d2,
            Complex64::new(1.0, 0.0),
        )
    } else {
        null_vector(&(sm.q - CMat3::identity() * lambda))
    };
    let n = v.norm();
    if n > 0.0 {
        v / Complex64::new(n, 0.0)
    } else {
        v
    }
}

/// Diagonalises the symbol, preferring the closed-form roots.
pub fn eigensystem(sm: &SymbolMatrix, p: &Params) -> Result<EigenSystem> {
    let scale = frobenius(&sm.q).max(f64::MIN_POSITIVE);
    let (lambdas, method) = match cardano_eigenvalues(sm.xi, p) {
        Some(l) => (refine(sm.xi, p, l), EigenMethod::Cardano),
        None => (numeric_eigenvalues(&sm.q), EigenMethod::Numeric),
    };
    let gap = [(0, 1), (0, 2), (1, 2)]
        .iter()
        .map(|&(i, j)| (lambdas[i] - lambdas[j]).norm())
        .fold(f64::INFINITY, f64::min);
    if gap < MIN_GAP * scale {
        return Err(Error::DefectiveMatrix {
            xi: sm.xi,
            condition: f64::INFINITY,
        });
    }
    let cols: Vec<Complex64Vec> = lambdas
        .iter()
        .map(|&l| eigenvector(sm, p, l, scale))
        .collect();
    let vectors = CMat3::from_columns(&cols);
    let inverse = vectors.try_inverse().ok_or(Error::DefectiveMatrix {
        xi: sm.xi,
        condition: f64::INFINITY,
    })?;
    let condition = frobenius(&vectors) * frobenius(&inverse);
    if !(condition <= MAX_CONDITION) {
        return Err(Error::DefectiveMatrix {
            xi: sm.xi,
            condition,
        });
    }
    Ok(EigenSystem {
        lambdas,
        vectors,
        inverse,
        condition,
        method,
    })
}

/// Outcome of a stability sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StabilityReport {
    /// Largest real part over all eigenvalues at non-zero frequencies.
    pub max_re_nonzero: f64,
    /// Modulus of the eigenvalue closest to zero at `xi = 0`, if sampled.
    pub zero_mode: Option<f64>,
    pub samples: usize,
}

/// Checks that every eigenvalue has negative real part at `xi != 0`, and
/// that at `xi = 0` exactly one vanishes while the other two are
/// `-gamma_z +- sqrt(gamma_z^2 - 4 omega^2)`.
pub fn stability_check(p: &Params, xi_samples: &[f64]) -> Result<StabilityReport> {
    let mut report = StabilityReport {
        max_re_nonzero: f64::NEG_INFINITY,
        zero_mode: None,
        samples: 0,
    };
    for &xi in xi_samples {
        let sm = crate::spectral::symbol::build_symbol(xi, p);
        let lambdas = match cardano_eigenvalues(xi, p) {
            Some(l) => refine(xi, p, l),
            None => numeric_eigenvalues(&sm.q),
        };
        let scale = frobenius(&sm.q).max(1e-300);
        report.samples += 1;
        if xi == 0.0 {
            let mut sorted = lambdas;
            sorted.sort_by(|a, b| a.norm().partial_cmp(&b.norm()).unwrap());
            if sorted[0].norm() > 1e-12 * scale.max(1.0) {
                return Err(Error::StabilityViolation {
                    xi,
                    re: sorted[0].re,
                });
            }
            let disc = Complex64::new(p.gamma_z * p.gamma_z - 4.0 * p.omega * p.omega, 0.0).sqrt();
            let pair = [-p.gamma_z + disc, -p.gamma_z - disc];
            for l in &sorted[1..] {
                let miss = pair
                    .iter()
                    .map(|z| (z - l).norm())
                    .fold(f64::INFINITY, f64::min);
                if miss > 1e-6 * scale.max(1e-300) {
                    return Err(Error::StabilityViolation { xi, re: l.re });
                }
            }
            report.zero_mode = Some(sorted[0].norm());
        } else {
            let worst = lambdas
                .iter()
                .map(|l| l.re)
                .fold(f64::NEG_INFINITY, f64::max);
            if !(worst < 0.0) {
                return Err(Error::StabilityViolation { xi, re: worst });
            }
            report.max_re_nonzero = report.max_re_nonzero.max(worst);
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::symbol::build_symbol;

    fn close(a: [Complex64; 3], b: [Complex64; 3], tol: f64) -> bool {
        let mut used = [false; 3];
        a.iter().all(|x| {
            let best = (0..3)
                .filter(|&j| !used[j])
                .min_by(|&i, &j| (x - b[i]).norm().partial_cmp(&(x - b[j]).norm()).unwrap())
                .unwrap();
            used[best] = true;
            (x - b[best]).norm() <= tol
        })
    }

    #[test]
    fn cardano_agrees_with_schur() {
        let p = Params::new(0.3, 0.2, 0.7, 0.5).unwrap();
        for xi in [0.0, 0.3, 1.7, -2.0, 25.0] {
            let sm = build_symbol(xi, &p);
            let c = cardano_eigenvalues(xi, &p).unwrap();
            let n = numeric_eigenvalues(&sm.q);
            assert!(
                close(c, n, 1e-10 * (1.0 + frobenius(&sm.q))),
                "{xi}: {c:?} {n:?}"
            );
        }
    }

    #[test]
    fn undriven_eigenvalues() {
        let p = Params::new(0.3, 0.2, 0.7, 0.0).unwrap();
        let xi = 1.3;
        let d = -2.0 * 0.3 * xi * xi;
        let want = [
            Complex64::new(d - 0.4, 0.0),
            Complex64::new(d, 2.0 * 0.7 * xi),
            Complex64::new(d, -2.0 * 0.7 * xi),
        ];
        let es = eigensystem(&build_symbol(xi, &p), &p).unwrap();
        assert!(close(es.lambdas, want, 1e-13));
    }

    #[test]
    fn uncoupled_eigenvalues() {
        let p = Params::new(0.3, 0.2, 0.0, 0.5).unwrap();
        let xi = 0.8;
        let d = -2.0 * 0.3 * xi * xi;
        let w = (1.0f64 - 0.04).sqrt();
        let want = [
            Complex64::new(d, 0.0),
            Complex64::new(d - 0.2, w),
            Complex64::new(d - 0.2, -w),
        ];
        let es = eigensystem(&build_symbol(xi, &p), &p).unwrap();
        assert!(close(es.lambdas, want, 1e-13));
    }

    #[test]
    fn undephased_eigenvalues() {
        let p = Params::new(0.3, 0.0, 0.7, 0.5).unwrap();
        let xi = 0.8;
        let d = -2.0 * 0.3 * xi * xi;
        let w = 2.0 * (0.49f64 * xi * xi + 0.25).sqrt();
        let want = [
            Complex64::new(d, 0.0),
            Complex64::new(d, w),
            Complex64::new(d, -w),
        ];
        let es = eigensystem(&build_symbol(xi, &p), &p).unwrap();
        assert!(close(es.lambdas, want, 1e-13));
    }

    #[test]
    fn decomposition_reconstructs_symbol() {
        let p = Params::new(0.3, 0.2, 0.7, 0.5).unwrap();
        for xi in [0.0, 0.4, 3.0] {
            let sm = build_symbol(xi, &p);
            let es = eigensystem(&sm, &p).unwrap();
            let lam = CMat3::from_diagonal(&nalgebra::Vector3::from(es.lambdas));
            let back = es.vectors * lam * es.inverse;
            assert!(
                frobenius(&(back - sm.q)) < 1e-12 * (1.0 + frobenius(&sm.q)),
                "{xi}"
            );
        }
    }

    #[test]
    fn critical_damping_is_defective_at_zero_frequency() {
        let p = Params::new(0.3, 1.0, 0.7, 0.5).unwrap();
        assert!(matches!(
            eigensystem(&build_symbol(0.0, &p), &p),
            Err(Error::DefectiveMatrix { .. })
        ));
    }

    #[test]
    fn stability_at_zero_frequency() {
        let p = Params::new(0.3, 0.2, 0.7, 0.5).unwrap();
        let r = stability_check(&p, &[0.0, 0.5, 5.0]).unwrap();
        assert!(r.zero_mode.unwrap() < 1e-12);
        assert!(r.max_re_nonzero < 0.0);
    }
}
