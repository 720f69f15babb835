use std::time::Instant;

use oqbm::closed_delta0::{green_delta0_grid, imbalance_general, imbalance_zeros};
use oqbm::closed_gammaz0::{convolution_identities_check, green_gammaz0_point};
use oqbm::closed_omega0::solve_omega0;
use oqbm::quadrature::ThetaQuadrature;
use oqbm::specfun::{erfc, erfcx, j0, j1, KernelSet};
use oqbm::spectral::{green_function, solve as spectral_solve, stability_check};
use oqbm::{InitialCondition, Params, SpatialGrid};
use oqbm_oracle::{quad_inverse_fourier, spatial_richardson, symbol_exponential};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::dispatch::{auto_grid, Route, Run};
use crate::error::CliError;
use crate::figures::{compute_figure, panels};
use crate::output::stats;

/// Reference value of the first zero of the imbalance.
pub const TAU1_REFERENCE: f64 = 81.142_350_62;

const ERF_TABLE: &str = include_str!("../../core/tests/data/erf_reference.csv");
const BESSEL_TABLE: &str = include_str!("../../core/tests/data/bessel_reference.csv");

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Level {
    Fast,
    Full,
}

/// One row of the report. `relation` is how `value` must compare with
/// `tolerance`.
#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    pub relation: &'static str,
    pub tolerance: f64,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    pub fn below(name: impl Into<String>, value: f64, tolerance: f64) -> Self {
        Check {
            name: name.into(),
            value,
            relation: "<",
            tolerance,
            passed: value < tolerance,
            detail: String::new(),
        }
    }

    pub fn with(mut self, detail: impl Into<String>) -> Self {
        self.detail = detail.into();
        self
    }

    fn error(name: impl Into<String>, e: impl std::fmt::Display) -> Self {
        Check {
            name: name.into(),
            value: f64::NAN,
            relation: "-",
            tolerance: 0.0,
            passed: false,
            detail: e.to_string(),
        }
    }
}

fn collect(name: &str, r: Result<Vec<Check>, CliError>) -> Vec<Check> {
    r.unwrap_or_else(|e| vec![Check::error(name, e)])
}

pub fn all_passed(checks: &[Check]) -> bool {
    checks.iter().all(|c| c.passed)
}

pub fn report(checks: &[Check]) -> String {
    let width = checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
    let mut s = String::new();
    for c in checks {
        s += &format!(
            "{} {:width$}  {:>10.3e} {:2} {:<9.1e} {}\n",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            c.value,
            c.relation,
            c.tolerance,
            c.detail
        );
    }
    let failed = checks.iter().filter(|c| !c.passed).count();
    s += &format!("{} checks, {} failed\n", checks.len(), failed);
    s
}

/// Figure runs shared by the mass and shape checks.
pub struct FigureRuns {
    pub runs: Vec<(String, Run)>,
}

impl FigureRuns {
    /// The fourth and fifth figures share their runs, so the fifth is
    /// not recomputed.
    pub fn compute() -> Result<Self, CliError> {
        let mut runs = Vec::new();
        for fig in ["fig1", "fig2", "fig3", "fig4", "fig6"] {
            for (panel, run) in compute_figure(fig)? {
                let label = if fig == "fig4" {
                    format!("fig4/fig5-{}", panel.side)
                } else {
                    format!("{fig}-{}", panel.side)
                };
                if fig == "fig1" || fig == "fig2" || fig == "fig3" {
                    if panel.side == "right" {
                        continue;
                    }
                    runs.push((fig.to_string(), run));
                } else {
                    runs.push((label, run));
                }
            }
        }
        Ok(FigureRuns { runs })
    }

    pub fn get(&self, label: &str) -> Option<&Run> {
        self.runs.iter().find(|(l, _)| l == label).map(|(_, r)| r)
    }
}

fn fig6_left() -> Result<(Params, InitialCondition), CliError> {
    let c = panels("fig6")?.remove(0).config;
    Ok((c.params, c.ic))
}

/// First zero of the imbalance against the reference value, and the
/// imbalance profile there relative to its largest value over the snapshots.
pub fn tau1_checks(figs: Option<&FigureRuns>) -> Result<Vec<Check>, CliError> {
    let (p, ic) = fig6_left()?;
    let start = Instant::now();
    let tau1 = imbalance_zeros(&p, 1)?[0];
    let owned;
    let run = match figs.and_then(|f| f.get("fig6-left")) {
        Some(r) => r,
        None => {
            owned = compute_figure("fig6")?.remove(0).1;
            &owned
        }
    };
    let at_zero = run
        .grid
        .nodes()
        .iter()
        .map(|&x| imbalance_general(&p, &ic, tau1, x).map(f64::abs))
        .collect::<oqbm::Result<Vec<_>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    let elapsed = start.elapsed().as_secs_f64();
    let peak = run
        .snapshots
        .iter()
        .flat_map(|u| u.rho_minus.iter().map(|v| v.abs()))
        .fold(0.0, f64::max);
    Ok(vec![
        Check::below(
            "tau1 relative error",
            ((tau1 - TAU1_REFERENCE) / TAU1_REFERENCE).abs(),
            1e-8,
        )
        .with(format!("tau1 = {tau1:.12}")),
        Check::below("imbalance at tau1 / peak", at_zero / peak, 1e-10)
            .with(format!("{} nodes", run.grid.len())),
        Check::below("tau1 runtime [s]", elapsed, 1.0),
    ])
}

/// Closed forms against the spectral solver and, with `with_fd`, against
/// the extrapolated finite-difference oracle at 4096 nodes.
pub fn omega0_checks(with_fd: bool) -> Result<Vec<Check>, CliError> {
    let start = Instant::now();
    let times = [50.0, 200.0];
    let mut out = Vec::new();
    for fig in ["fig1", "fig2", "fig3"] {
        let mut cfg = panels(fig)?.remove(0).config;
        cfg.times = times.to_vec();
        let (p, ic) = (cfg.params, cfg.ic.clone());
        let grid = auto_grid(&cfg, Route::Spectral)?;
        let mut worst = 0.0f64;
        for &t in &times {
            worst = worst.max(
                solve_omega0(&p, &ic, t, &grid)?
                    .max_abs_diff(&spectral_solve(&p, &ic, t, &grid)?)?,
            );
        }
        out.push(
            Check::below(format!("{fig} closed vs spectral"), worst, 1e-7)
                .with(format!("N = {}", grid.len())),
        );
        if with_fd {
            let fd_grid = SpatialGrid::new(grid.half_width(), 4096)?;
            let est = spatial_richardson(&p, &ic, &times, &fd_grid)?;
            let mut worst = 0.0f64;
            let mut raw = 0.0f64;
            for e in &est {
                let closed = solve_omega0(&p, &ic, e.field.t, &e.extrapolated.grid)?;
                worst = worst.max(closed.max_abs_diff(&e.extrapolated)?);
                raw = raw.max(e.error);
            }
            out.push(
                Check::below(format!("{fig} closed vs FD"), worst, 1e-5).with(format!(
                    "dx = {}, Richardson estimate of raw FD error {raw:.2e}",
                    fd_grid.dx()
                )),
            );
        }
    }
    if with_fd {
        out.push(Check::below(
            "undriven three-way runtime [s]",
            start.elapsed().as_secs_f64(),
            60.0,
        ));
    }
    Ok(out)
}

/// Uncoupled Green's matrix against the spectral kernel in the over-,
/// critically and underdamped cases.
pub fn green_delta0_checks() -> Result<Vec<Check>, CliError> {
    let grid = SpatialGrid::new(8.0, 512)?;
    let mut out = Vec::new();
    for (gz, label) in [(1e-2, "under"), (2e-2, "critical"), (4e-2, "over")] {
        let p = Params::new(1e-3, gz, 0.0, 1e-2)?;
        let d =
            green_delta0_grid(&p, 25.0, &grid)?.max_abs_diff(&green_function(&p, 25.0, &grid)?)?;
        out.push(Check::below(
            format!("uncoupled Green {label}damped"),
            d,
            1e-8,
        ));
    }
    Ok(out)
}

fn undephased_params() -> Result<Params, CliError> {
    Ok(panels("fig4")?.remove(0).config.params)
}

/// Kernel identities without dephasing and, with `with_quad`, the assembled
/// Green's matrix against direct quadrature of the symbol exponential.
pub fn gammaz0_checks(with_quad: bool) -> Result<Vec<Check>, CliError> {
    let p = undephased_params()?;
    let grid = SpatialGrid::new(256.0, 16384)?;
    let mut out = Vec::new();
    for t in [1.0, 25.0, 100.0] {
        let r = convolution_identities_check(&p, t, &grid)?;
        out.push(
            Check::below(format!("undephased identities t = {t}"), r.worst(), 1e-8).with(format!(
                "worst of six; moment {:.1e}, self {:.1e}, cone {:.1e}/{:.1e}",
                r.moment_laplace, r.laplace_laplace, r.cone_kappa1, r.cone_kappa0
            )),
        );
        if with_quad {
            let reach = 2.0 * p.delta * t + 8.0 * (4.0 * p.gamma_p * t).sqrt();
            let xs: Vec<f64> = (0..41)
                .map(|i| -reach + 2.0 * reach * i as f64 / 40.0)
                .collect();
            let xi_max = (36.8 / (2.0 * p.gamma_p * t)).sqrt();
            let q = quad_inverse_fourier(|xi| symbol_exponential(&p, t, xi), &xs, xi_max, 1024)?;
            let mut worst = 0.0f64;
            for (x, m) in xs.iter().zip(&q.values) {
                let g = green_gammaz0_point(&p, t, *x)?;
                for i in 0..3 {
                    for j in 0..3 {
                        worst = worst.max((g[i][j] - m[i][j]).abs());
                    }
                }
            }
            out.push(
                Check::below(
                    format!("undephased Green vs quadrature t = {t}"),
                    worst,
                    1e-7,
                )
                .with(format!("{} intervals", q.intervals)),
            );
        }
    }
    Ok(out)
}

/// Mass and positivity of every figure snapshot.
pub fn mass_checks(figs: &FigureRuns) -> Vec<Check> {
    let mut out = Vec::new();
    for (label, run) in &figs.runs {
        let s: Vec<_> = run.snapshots.iter().map(stats).collect();
        let mass = s.iter().map(|s| (s.mass - 1.0).abs()).fold(0.0, f64::max);
        let min = s
            .iter()
            .map(|s| s.min_density)
            .fold(f64::INFINITY, f64::min);
        out.push(
            Check::below(format!("{label} mass"), mass, 1e-7)
                .with(format!("{} snapshots", s.len())),
        );
        out.push(Check {
            name: format!("{label} min density"),
            value: min,
            relation: ">=",
            tolerance: -1e-8,
            passed: min >= -1e-8,
            detail: String::new(),
        });
    }
    out
}

pub const STABILITY_SEED: u64 = 20_240_601;
pub const STABILITY_DRAWS: usize = 1000;

fn log_uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    (lo.ln() + rng.random::<f64>() * (hi.ln() - lo.ln())).exp()
}

/// Random rates and frequencies: every non-zero frequency must be strictly
/// stable and the zero frequency must carry exactly one null eigenvalue.
pub fn stability_checks() -> Vec<Check> {
    let mut rng = ChaCha8Rng::seed_from_u64(STABILITY_SEED);
    let mut violations = 0usize;
    let mut first = String::new();
    for _ in 0..STABILITY_DRAWS {
        let mut r = || log_uniform(&mut rng, 1e-3, 10.0);
        let p = Params {
            gamma_p: r(),
            gamma_z: r(),
            delta: r(),
            omega: r(),
        };
        let mut xi = log_uniform(&mut rng, 1e-3, 1e2);
        if rng.random::<bool>() {
            xi = -xi;
        }
        match stability_check(&p, &[0.0, xi]) {
            Ok(rep) if rep.zero_mode.is_some() && rep.max_re_nonzero < 0.0 => {}
            other => {
                if violations == 0 {
                    first = format!("first at {p:?}, xi = {xi}: {other:?}");
                }
                violations += 1;
            }
        }
    }
    vec![Check {
        relation: "==",
        tolerance: 0.0,
        passed: violations == 0,
        ..Check::below(
            format!("stability over {STABILITY_DRAWS} draws (violations)"),
            violations as f64,
            0.0,
        )
    }
    .with(first)]
}

/// Strict interior maxima of `v` above `1e-12` of its peak.
pub fn local_maxima(v: &[f64]) -> Vec<usize> {
    let peak = v.iter().copied().fold(0.0, f64::max);
    (1..v.len().saturating_sub(1))
        .filter(|&j| v[j] > v[j - 1] && v[j] > v[j + 1] && v[j] > 1e-12 * peak)
        .collect()
}

/// Peak counts and positions claimed for the figures.
pub fn shape_checks(figs: &FigureRuns) -> Vec<Check> {
    let mut out = Vec::new();
    match figs.get("fig1") {
        Some(run) => {
            let u = run
                .snapshots
                .iter()
                .find(|u| u.t == 200.0)
                .expect("t = 200 snapshot");
            let peaks: Vec<f64> = local_maxima(&u.rho_plus)
                .iter()
                .map(|&j| u.grid.node(j))
                .collect();
            let miss = if peaks.len() == 2 {
                (peaks[0] + 4.0).abs().max((peaks[1] - 4.0).abs()) / u.grid.dx()
            } else {
                f64::INFINITY
            };
            out.push(Check {
                name: "fig1 t = 200 two peaks at +-4 (offset in dx)".into(),
                value: miss,
                relation: "<=",
                tolerance: 2.0,
                passed: peaks.len() == 2 && miss <= 2.0,
                detail: format!("peaks at {peaks:?}"),
            });
        }
        None => out.push(Check::error("fig1 peaks", "missing run")),
    }
    match figs.get("fig4/fig5-left") {
        Some(run) => {
            let u = run
                .snapshots
                .iter()
                .find(|u| u.t == 100.0)
                .expect("t = 100 snapshot");
            let peaks: Vec<f64> = local_maxima(&u.rho_plus)
                .iter()
                .map(|&j| u.grid.node(j))
                .collect();
            out.push(Check {
                name: "fig4 left t = 100 three peaks (count)".into(),
                value: peaks.len() as f64,
                relation: "==",
                tolerance: 3.0,
                passed: peaks.len() == 3,
                detail: format!("peaks at {peaks:?}"),
            });
        }
        None => out.push(Check::error("fig4 peaks", "missing run")),
    }
    out
}

fn table(text: &str) -> Vec<Vec<f64>> {
    text.lines()
        .skip(1)
        .map(|l| {
            l.split(',')
                .map(|v| v.parse().expect("numeric fixture"))
                .collect()
        })
        .collect()
}

fn rel(a: f64, b: f64) -> f64 {
    if b == 0.0 {
        a.abs()
    } else {
        ((a - b) / b).abs()
    }
}

/// `int kappa0(t, x) phi(x) dx` and `int kappa1(t, x) phi(x) dx`, the
/// cone integrals taken with `x = c cos(theta)`.
fn kernel_moments(p: &Params, t: f64, phi: impl Fn(f64) -> f64) -> Result<(f64, f64), CliError> {
    let k = KernelSet::new(p, t)?;
    let c = k.cone();
    let rule = ThetaQuadrature::cached(256);
    let [i0, i1] = rule.integrate(|th| {
        let x = c * th.cos();
        let jac = c * th.sin();
        [
            k.kappa0(x) * phi(x) * jac,
            k.kappa1_smooth(x) * phi(x) * jac,
        ]
    });
    let deltas: f64 = k.kappa1_deltas().iter().map(|(x, w)| w * phi(*x)).sum();
    Ok((i0, i1 + deltas))
}

/// Reference tables and the time derivative relation between the two
/// light-cone kernels.
pub fn special_function_checks() -> Result<Vec<Check>, CliError> {
    let erf_rows = table(ERF_TABLE);
    let bessel_rows = table(BESSEL_TABLE);
    let erfc_err = erf_rows
        .iter()
        .map(|r| rel(erfc(r[0]), r[2]))
        .fold(0.0, f64::max);
    let erfcx_err = erf_rows
        .iter()
        .map(|r| rel(erfcx(r[0]), r[3]))
        .fold(0.0, f64::max);
    let j0_err = bessel_rows
        .iter()
        .map(|r| (j0(r[0]) - r[1]).abs())
        .fold(0.0, f64::max);
    let j1_err = bessel_rows
        .iter()
        .map(|r| (j1(r[0]) - r[2]).abs())
        .fold(0.0, f64::max);

    let p = undephased_params()?;
    let phi = |x: f64| (-((x - 1.0) / 4.0).powi(2)).exp();
    let t = 25.0;
    let (_, d1) = kernel_moments(&p, t, phi)?;
    let mut errs = Vec::new();
    for h in [2.0, 1.0] {
        let (a, _) = kernel_moments(&p, t + h, phi)?;
        let (b, _) = kernel_moments(&p, t - h, phi)?;
        errs.push(((a - b) / (2.0 * h) - d1).abs());
    }
    let ratio = errs[0] / errs[1];
    Ok(vec![
        Check::below(
            format!("erfc relative ({} points)", erf_rows.len()),
            erfc_err,
            1e-12,
        ),
        Check::below(
            format!("erfcx relative ({} points)", erf_rows.len()),
            erfcx_err,
            1e-12,
        ),
        Check::below(
            format!("J0 absolute ({} points)", bessel_rows.len()),
            j0_err,
            1e-12,
        ),
        Check::below(
            format!("J1 absolute ({} points)", bessel_rows.len()),
            j1_err,
            1e-12,
        ),
        Check {
            name: "kappa1 = d/dt kappa0, centred difference order".into(),
            value: ratio,
            relation: "~",
            tolerance: 4.0,
            passed: (ratio - 4.0).abs() < 0.2,
            detail: format!(
                "errors {:.3e} (h = 2), {:.3e} (h = 1), within 0.2",
                errs[0], errs[1]
            ),
        },
    ])
}

/// Runs the suite. `Fast` skips the finite-difference and direct-quadrature
/// cross-checks.
pub fn run_validate(level: Level) -> Vec<Check> {
    let full = level == Level::Full;
    let figs = FigureRuns::compute();
    let mut out = Vec::new();
    out.extend(collect("tau1", tau1_checks(figs.as_ref().ok())));
    out.extend(collect("undriven", omega0_checks(full)));
    out.extend(collect("uncoupled Green", green_delta0_checks()));
    out.extend(collect("undephased", gammaz0_checks(full)));
    match &figs {
        Ok(f) => {
            out.extend(mass_checks(f));
            out.extend(shape_checks(f));
        }
        Err(e) => out.push(Check::error("figure runs", e)),
    }
    out.extend(stability_checks());
    out.extend(collect("special functions", special_function_checks()));
    out
}
