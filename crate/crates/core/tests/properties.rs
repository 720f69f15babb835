use std::f64::consts::PI;

use num_complex::Complex64;
use oqbm::closed_delta0::imbalance_general;
use oqbm::closed_omega0::{laplace_solution, uniform_solution};
use oqbm::initial::{required_half_width, EPS_TAIL};
use oqbm::specfun::{gaussian, KernelSet};
use oqbm::spectral::{build_symbol, exp_by_squaring, exp_symbol_auto, solve};
use oqbm::{from_bloch, to_bloch, DensityField, InitialCondition, Params, SpatialGrid};
use proptest::prelude::*;

fn rate(lo: f64, hi: f64) -> impl Strategy<Value = f64> {
    (lo.ln()..hi.ln()).prop_map(f64::exp)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn bloch_round_trip(vals in prop::collection::vec(-1.0f64..1.0, 4 * 16)) {
        let grid = SpatialGrid::new(4.0, 16).unwrap();
        let col = |k: usize| vals[16 * k..16 * (k + 1)].to_vec();
        let rho12 = col(2).iter().zip(col(3)).map(|(a, b)| Complex64::new(*a, b)).collect();
        let d = DensityField::new(grid, 0.0, col(0), col(1), rho12).unwrap();
        let back = from_bloch(&to_bloch(&d));
        for j in 0..16 {
            prop_assert!((back.rho11[j] - d.rho11[j]).abs() < 1e-14);
            prop_assert!((back.rho22[j] - d.rho22[j]).abs() < 1e-14);
            prop_assert!((back.rho12[j] - d.rho12[j]).norm() < 1e-14);
        }
        let b = to_bloch(&d);
        let again = to_bloch(&from_bloch(&b));
        prop_assert!(again.max_abs_diff(&b).unwrap() < 1e-14);
    }

    #[test]
    fn kernel_parity(
        gp in rate(1e-3, 1e-1), d in rate(1e-2, 1.0), w in rate(1e-2, 1.0),
        t in 0.5f64..50.0, s in 0.0f64..1.5,
    ) {
        let k = KernelSet::new(&Params { gamma_p: gp, gamma_z: 0.0, delta: d, omega: w }, t).unwrap();
        let x = s * k.cone() + 0.1 * s;
        let close = |a: f64, b: f64| (a - b).abs() <= 1e-12 * a.abs().max(b.abs()).max(1e-300);
        prop_assert!(close(k.g(x), k.g(-x)));
        prop_assert!(close(k.kappa0(x), k.kappa0(-x)));
        prop_assert!(close(k.kappa1_smooth(x), k.kappa1_smooth(-x)));
        let (a, b) = (k.tails(x), k.tails(-x));
        prop_assert!(close(a[0], b[0]) && close(a[2], b[2]));
        prop_assert!(close(a[1], -b[1]) && close(a[3], -b[3]));
        let outside = k.cone() * (1.0 + 1e-9) + 1e-12;
        prop_assert!(k.kappa0(outside) == 0.0 && k.kappa1_smooth(-outside) == 0.0);
    }

    #[test]
    fn kappa0_solves_klein_gordon_inside_the_cone(
        d in 0.1f64..1.0, w in 0.1f64..1.0, t in 1.0f64..10.0, s in -0.8f64..0.8,
    ) {
        let p = Params { gamma_p: 1.0, gamma_z: 0.0, delta: d, omega: w };
        let x = s * 2.0 * d * t;
        let k0 = |t: f64, x: f64| KernelSet::new(&p, t).unwrap().kappa0(x);
        let (ht, hx) = (1e-3 * t, 1e-3 * 2.0 * d * t);
        let dtt = (k0(t + ht, x) - 2.0 * k0(t, x) + k0(t - ht, x)) / (ht * ht);
        let dxx = (k0(t, x + hx) - 2.0 * k0(t, x) + k0(t, x - hx)) / (hx * hx);
        let residual = dtt - 4.0 * d * d * dxx + 4.0 * w * w * k0(t, x);
        let scale = 4.0 * w * w / (4.0 * d) + dtt.abs();
        prop_assert!(residual.abs() < 1e-4 * scale, "{residual} vs {scale}");
    }

    #[test]
    fn tails_match_their_transforms(
        gp in rate(1e-2, 1e-1), a in 0.5f64..3.0, w in rate(5e-2, 0.5), t in 1.0f64..20.0, s in -1.0f64..1.0,
    ) {
        let p = Params { gamma_p: gp, gamma_z: 0.0, delta: a * w, omega: w };
        let k = KernelSet::new(&p, t).unwrap();
        let x = s * (k.cone() + 4.0 * a);
        let period = 2.0 * (x.abs() + 30.0 * a + 12.0 * (4.0 * gp * t).sqrt());
        let h = 2.0 * PI / period;
        let xi_max = (40.0 / (2.0 * gp * t)).sqrt();
        let mut acc = [0.0; 4];
        let n = (xi_max / h).ceil() as usize;
        for j in 0..=n {
            let xi = j as f64 * h;
            let wgt = if j == 0 { 0.5 } else { 1.0 };
            let heat = (-2.0 * gp * t * xi * xi).exp();
            let lap = 1.0 / (1.0 + a * a * xi * xi);
            let even = heat * lap * (xi * x).cos();
            let odd = heat * lap * a * xi * (xi * x).sin();
            for (acc, v) in acc.iter_mut().zip([even, odd, even * lap, odd * lap]) {
                *acc += wgt * v * h / PI;
            }
        }
        let got = k.tails(x);
        for i in 0..4 {
            prop_assert!((got[i] - acc[i]).abs() < 1e-8, "{i}: {} vs {}", got[i], acc[i]);
        }
    }

    #[test]
    fn symbol_is_conjugate_symmetric(
        gp in rate(1e-3, 10.0), gz in rate(1e-3, 10.0), d in rate(1e-3, 10.0), w in rate(1e-3, 10.0), xi in 1e-3f64..1e2,
    ) {
        let p = Params { gamma_p: gp, gamma_z: gz, delta: d, omega: w };
        let (a, b) = (build_symbol(xi, &p).q, build_symbol(-xi, &p).q);
        prop_assert!((a - b.conjugate()).norm() == 0.0);
    }

    #[test]
    fn exponential_routes_agree(
        gp in rate(1e-3, 1e-1), gz in rate(1e-3, 1e-1), d in rate(1e-3, 1e-1), w in rate(1e-3, 1e-1),
        xi in -3.0f64..3.0, t in 0.0f64..100.0,
    ) {
        let p = Params { gamma_p: gp, gamma_z: gz, delta: d, omega: w };
        let sm = build_symbol(xi, &p);
        let diff = (exp_symbol_auto(&sm, &p, t) - exp_by_squaring(&sm, t)).iter().map(|z| z.norm()).fold(0.0, f64::max);
        prop_assert!(diff < 1e-10, "{diff}");
    }
}

fn coherent_setup(
    gp: f64,
    gz: f64,
    d: f64,
    w: f64,
    t_min: f64,
    t_max: f64,
) -> (Params, InitialCondition, SpatialGrid) {
    let p = Params {
        gamma_p: gp,
        gamma_z: gz,
        delta: d,
        omega: w,
    };
    let ic = InitialCondition::GaussianCoherent {
        p: 0.75,
        mu: 0.8,
        k: 1.0,
        sigma: 1.0,
    };
    let grid = SpatialGrid::dyadic(
        required_half_width(&ic, &p, t_max, EPS_TAIL),
        (p.diffusion_width(t_min) / 8.0).min(1.0 / 16.0),
    )
    .unwrap();
    (p, ic, grid)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn spectral_solution_conserves_mass(
        gp in rate(1e-3, 5e-2), gz in rate(1e-3, 5e-2), d in rate(1e-3, 5e-2), w in rate(1e-3, 5e-2), t in 1.0f64..50.0,
    ) {
        let (p, ic, grid) = coherent_setup(gp, gz, d, w, t, t);
        let u0 = solve(&p, &ic, 0.0, &grid).unwrap();
        let u = solve(&p, &ic, t, &grid).unwrap();
        prop_assert!((grid.trapezoid(&u.rho_plus) - grid.trapezoid(&u0.rho_plus)).abs() < 1e-8);
    }

    #[test]
    fn spectral_solution_is_a_semigroup(
        gp in rate(1e-3, 5e-2), gz in rate(1e-3, 5e-2), d in rate(1e-3, 5e-2), w in rate(1e-3, 5e-2),
        t1 in 1.0f64..25.0, t2 in 1.0f64..25.0,
    ) {
        let (p, ic, grid) = coherent_setup(gp, gz, d, w, t1.min(t2), t1 + t2);
        let mid = from_bloch(&solve(&p, &ic, t1, &grid).unwrap());
        let two_step = solve(&p, &InitialCondition::Custom(mid), t2, &grid).unwrap();
        let one_step = solve(&p, &ic, t1 + t2, &grid).unwrap();
        let diff = [(&two_step.rho_plus, &one_step.rho_plus), (&two_step.c_i, &one_step.c_i), (&two_step.rho_minus, &one_step.rho_minus)]
            .iter()
            .flat_map(|(a, b)| a.iter().zip(b.iter()).map(|(x, y)| (x - y).abs()))
            .fold(0.0, f64::max);
        prop_assert!(diff < 1e-8, "{diff}");
    }

    #[test]
    fn uncoupled_imbalance_factorises_in_time_and_space(
        gz in rate(1e-3, 1.9e-2), w in rate(1e-2, 1e-1), t in 1.0f64..200.0,
        x1 in -5.0f64..5.0, x2 in -5.0f64..5.0, s1 in 0.5f64..3.0, s2 in 0.5f64..3.0,
    ) {
        let p = Params { gamma_p: 1e-3, gamma_z: gz.min(1.9 * w), delta: 0.0, omega: w };
        let ic = InitialCondition::GaussianMixture { p: 0.75, sigma1: s1, sigma2: s2 };
        let profile = |x: f64| 0.75 * gaussian(x, s1 * s1 + 4e-3 * t) - 0.25 * gaussian(x, s2 * s2 + 4e-3 * t);
        let (q1, q2) = (imbalance_general(&p, &ic, t, x1).unwrap(), imbalance_general(&p, &ic, t, x2).unwrap());
        let residual = q1 * profile(x2) - q2 * profile(x1);
        prop_assert!(residual.abs() < 1e-12 * (q1 * profile(x2)).abs().max(1e-300), "{residual}");
    }
}

/// Two drifted normals with the initial variances increased by diffusion.
fn two_gaussian_fit(p: &Params, t: f64, weight: f64, v1: f64, v2: f64, x: f64) -> f64 {
    let s = 2.0 * p.delta * t;
    let grow = 4.0 * p.gamma_p * t;
    weight * gaussian(x - s, v1 + grow) + (1.0 - weight) * gaussian(x + s, v2 + grow)
}

fn l1_to_fit(p: &Params, t: f64, density: impl Fn(f64) -> f64, fit: impl Fn(f64) -> f64) -> f64 {
    let s = 2.0 * p.delta * t;
    let reach = 10.0 * (4.0 * p.gamma_p * t + 8.0).sqrt();
    let n = 20_000;
    let h = 2.0 * reach / n as f64;
    let mut total = 0.0;
    for centre in [-s, s] {
        for j in 0..=n {
            let x = centre - reach + j as f64 * h;
            let w = if j == 0 || j == n { 0.5 } else { 1.0 };
            total += w * h * (density(x) - fit(x)).abs();
        }
    }
    total
}

#[test]
fn laplace_and_uniform_densities_become_two_gaussians() {
    let p = Params::new(1e-3, 1e-3, 1e-2, 0.0).unwrap();
    let t = 1e5;
    let lap = InitialCondition::LaplaceMixture {
        p: 0.25,
        a: 1.0,
        b: 2.0,
    };
    let d = l1_to_fit(
        &p,
        t,
        |x| laplace_solution(&p, &lap, t, x).unwrap().0,
        |x| two_gaussian_fit(&p, t, 0.25, 2.0, 8.0, x),
    );
    assert!(d < 1e-3, "laplace {d}");
    let uni = InitialCondition::UniformMixture {
        p: 0.75,
        a: 3.0,
        b: 2.0,
    };
    let d = l1_to_fit(
        &p,
        t,
        |x| uniform_solution(&p, &uni, t, x).unwrap().0,
        |x| two_gaussian_fit(&p, t, 0.75, 3.0, 4.0 / 3.0, x),
    );
    assert!(d < 1e-3, "uniform {d}");
}
