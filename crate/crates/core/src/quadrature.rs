//! Gauss-Legendre rules and the adaptive angular quadrature used for
//! light-cone convolutions.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{Error, Result};

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n > 0, "Gauss-Legendre order must be positive");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            for _ in 0..20 {
                let (p, d) = legendre(n, x);
                let dx = p / d;
                x -= dx;
                if dx.abs() <= 1e-15 {
                    break;
                }
            }
            let (_, dp) = legendre(n, x);
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        GaussLegendre { nodes, weights }
    }

    /// Cached rule of order `n`.
    pub fn cached(n: usize) -> Arc<GaussLegendre> {
        static CACHE: OnceLock<Mutex<HashMap<usize, Arc<GaussLegendre>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        if let Some(r) = cache.lock().unwrap().get(&n) {
            return Arc::clone(r);
        }
        let rule = Arc::new(GaussLegendre::new(n));
        cache.lock().unwrap().insert(n, Arc::clone(&rule));
        rule
    }

    /// `int_a^b f`.
    pub fn integrate(&self, a: f64, b: f64, f: impl Fn(f64) -> f64) -> f64 {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        half * self
            .nodes
            .iter()
            .zip(&self.weights)
            .map(|(x, w)| w * f(mid + half * x))
            .sum::<f64>()
    }
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let p = if n == 0 { 1.0 } else { p1 };
    let d = n as f64 * (x * p - p0) / (x * x - 1.0);
    (p, d)
}

/// Gauss-Legendre rule mapped to `[0, pi]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ThetaQuadrature {
    pub order: usize,
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

pub const THETA_START: usize = 64;
pub const THETA_CAP: usize = 4096;
pub const THETA_TOL: f64 = 1e-9;

impl ThetaQuadrature {
    pub fn new(order: usize) -> Self {
        let gl = GaussLegendre::cached(order);
        let half = 0.5 * PI;
        ThetaQuadrature {
            order,
            nodes: gl.nodes.iter().map(|x| half * (x + 1.0)).collect(),
            weights: gl.weights.iter().map(|w| half * w).collect(),
        }
    }

    pub fn cached(order: usize) -> Arc<ThetaQuadrature> {
        static CACHE: OnceLock<Mutex<HashMap<usize, Arc<ThetaQuadrature>>>> = OnceLock::new();
        let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
        if let Some(r) = cache.lock().unwrap().get(&order) {
            return Arc::clone(r);
        }
        let rule = Arc::new(ThetaQuadrature::new(order));
        cache.lock().unwrap().insert(order, Arc::clone(&rule));
        rule
    }

    /// `int_0^pi f(theta) d theta` for a vector-valued integrand.
    pub fn integrate<const K: usize>(&self, f: impl Fn(f64) -> [f64; K]) -> [f64; K] {
        let mut acc = [0.0; K];
        for (th, w) in self.nodes.iter().zip(&self.weights) {
            let v = f(*th);
            for k in 0..K {
                acc[k] += w * v[k];
            }
        }
        acc
    }
}

/// Result of an adaptive angular integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Adaptive<const K: usize> {
    pub value: [f64; K],
    pub order: usize,
    pub change: f64,
}

/// Doubles the order from [`THETA_START`] until successive estimates differ
/// by less than `tol` in every component, failing past [`THETA_CAP`].
pub fn integrate_theta<const K: usize>(
    tol: f64,
    f: impl Fn(f64) -> [f64; K],
) -> Result<Adaptive<K>> {
    integrate_theta_from(THETA_START, tol, f)
}

pub fn integrate_theta_from<const K: usize>(
    start: usize,
    tol: f64,
    f: impl Fn(f64) -> [f64; K],
) -> Result<Adaptive<K>> {
    let mut order = start;
    let mut prev = ThetaQuadrature::cached(order).integrate(&f);
    loop {
        let next_order = order * 2;
        if next_order > THETA_CAP {
            return Err(Error::QuadratureNotConverged {
                order,
                change: f64::NAN,
            });
        }
        let next = ThetaQuadrature::cached(next_order).integrate(&f);
        let change = prev
            .iter()
            .zip(&next)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        if change < tol {
            return Ok(Adaptive {
                value: next,
                order: next_order,
                change,
            });
        }
        if next_order == THETA_CAP {
            return Err(Error::QuadratureNotConverged {
                order: next_order,
                change,
            });
        }
        prev = next;
        order = next_order;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weights_sum_to_two() {
        for n in [1, 2, 7, 64, 1024] {
            let g = GaussLegendre::new(n);
            let s: f64 = g.weights.iter().sum();
            assert!((s - 2.0).abs() < 1e-13, "{n}: {s}");
        }
    }

    #[test]
    fn exact_for_degree_two_n_minus_one() {
        let g = GaussLegendre::new(5);
        let v = g.integrate(0.0, 1.0, |x| x.powi(9));
        assert!((v - 0.1).abs() < 1e-15);
    }

    #[test]
    fn theta_rule_integrates_sine() {
        let q = ThetaQuadrature::new(16);
        let [v] = q.integrate(|t| [t.sin()]);
        assert!((v - 2.0).abs() < 1e-14);
    }

    #[test]
    fn adaptive_converges_and_reports_order() {
        let r = integrate_theta(1e-12, |t| [(10.0 * t.sin()).cos(), t.cos().powi(2)]).unwrap();
        assert!((r.value[1] - PI / 2.0).abs() < 1e-13);
        assert_eq!(r.order, 128);
    }
}
