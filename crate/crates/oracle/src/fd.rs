//! Method of lines for the density-matrix equations: periodic second-order
//! central differences in space, classical RK4 in time.

use oqbm::{BlochField, DensityField, Error, InitialCondition, Params, Result, SpatialGrid};

use crate::initial::initial_density;

/// Largest boundary value, relative to the peak, accepted at any snapshot.
pub const BOUNDARY_TOL: f64 = 1e-8;

/// Growth of the max norm over its initial value treated as instability.
pub const MAX_GROWTH: f64 = 10.0;

/// State `(rho11, rho22, Re rho12, Im rho12)`.
type State = [Vec<f64>; 4];

/// Step bounded by the diffusive, advective and rate limits.
pub fn auto_step(p: &Params, grid: &SpatialGrid) -> f64 {
    let dx = grid.dx();
    let mut dt = dx * dx / (8.0 * p.gamma_p);
    if p.delta > 0.0 {
        dt = dt.min(dx / (4.0 * p.delta));
    }
    if p.gamma_z + p.omega > 0.0 {
        dt = dt.min(1.0 / (4.0 * (p.gamma_z + p.omega)));
    }
    dt
}

struct Stepper {
    p: Params,
    inv_dx2: f64,
    inv_2dx: f64,
    k: [State; 4],
    tmp: State,
}

impl Stepper {
    fn new(p: &Params, grid: &SpatialGrid) -> Self {
        let n = grid.len();
        let zero = || -> State { std::array::from_fn(|_| vec![0.0; n]) };
        let dx = grid.dx();
        Stepper {
            p: *p,
            inv_dx2: 1.0 / (dx * dx),
            inv_2dx: 1.0 / (2.0 * dx),
            k: std::array::from_fn(|_| zero()),
            tmp: zero(),
        }
    }

    fn rhs(p: &Params, inv_dx2: f64, inv_2dx: f64, u: &State, out: &mut State) {
        let n = u[0].len();
        let d = 2.0 * p.gamma_p * inv_dx2;
        let a = 2.0 * p.delta * inv_2dx;
        let (w, gz) = (p.omega, 2.0 * p.gamma_z);
        let [r11, r22, cr, ci] = u;
        let [o11, o22, ocr, oci] = out;
        let mut node = |j: usize, l: usize, r: usize| {
            let lap = |v: &[f64]| d * (v[r] - 2.0 * v[j] + v[l]);
            o11[j] = lap(r11) - a * (r11[r] - r11[l]) - 2.0 * w * ci[j];
            o22[j] = lap(r22) + a * (r22[r] - r22[l]) + 2.0 * w * ci[j];
            ocr[j] = lap(cr) - gz * cr[j];
            oci[j] = lap(ci) - gz * ci[j] - w * (r22[j] - r11[j]);
        };
        node(0, n - 1, 1);
        node(n - 1, n - 2, 0);
        for j in 1..n - 1 {
            node(j, j - 1, j + 1);
        }
    }

    fn step(&mut self, u: &mut State, h: f64) {
        let (p, i2, i1) = (self.p, self.inv_dx2, self.inv_2dx);
        let stages = [0.0, 0.5, 0.5, 1.0];
        for s in 0..4 {
            if s == 0 {
                Self::rhs(&p, i2, i1, u, &mut self.k[0]);
                continue;
            }
            for c in 0..4 {
                for j in 0..u[c].len() {
                    self.tmp[c][j] = u[c][j] + stages[s] * h * self.k[s - 1][c][j];
                }
            }
            let (tmp, k) = (&self.tmp, &mut self.k[s]);
            Self::rhs(&p, i2, i1, tmp, k);
        }
        for c in 0..4 {
            for j in 0..u[c].len() {
                u[c][j] += h / 6.0
                    * (self.k[0][c][j]
                        + 2.0 * self.k[1][c][j]
                        + 2.0 * self.k[2][c][j]
                        + self.k[3][c][j]);
            }
        }
    }
}

fn max_norm(u: &State) -> f64 {
    u.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs()))
}

fn to_bloch(grid: &SpatialGrid, t: f64, u: &State) -> Result<BlochField> {
    let rho12 = u[2]
        .iter()
        .zip(&u[3])
        .map(|(&re, &im)| num_complex::Complex64::new(re, im))
        .collect();
    Ok(DensityField::new(*grid, t, u[0].clone(), u[1].clone(), rho12)?.to_bloch())
}

fn check_boundary(u: &State) -> Result<()> {
    let peak = max_norm(u);
    let n = u[0].len();
    let edge = u
        .iter()
        .map(|v| v[0].abs().max(v[n - 1].abs()))
        .fold(0.0, f64::max);
    if edge > BOUNDARY_TOL * peak {
        return Err(Error::DomainTooNarrow {
            tail_mass: edge / peak,
            tolerance: BOUNDARY_TOL,
        });
    }
    Ok(())
}

/// Integrates with steps no longer than `h`, landing exactly on each time.
fn run(
    p: &Params,
    ic: &InitialCondition,
    times: &[f64],
    grid: &SpatialGrid,
    h: f64,
) -> Result<Vec<BlochField>> {
    let d0 = initial_density(ic, grid)?;
    let mut u: State = [
        d0.rho11.clone(),
        d0.rho22.clone(),
        d0.rho12.iter().map(|z| z.re).collect(),
        d0.rho12.iter().map(|z| z.im).collect(),
    ];
    check_boundary(&u)?;
    let norm0 = max_norm(&u);
    let mut stepper = Stepper::new(p, grid);
    let mut now = 0.0;
    let mut out = Vec::with_capacity(times.len());
    for &target in times {
        if target < now {
            return Err(Error::NonPositiveTime(target - now));
        }
        let span = target - now;
        let n = (span / h - 1e-9).ceil().max(0.0) as usize;
        for i in 0..n {
            stepper.step(&mut u, span / n as f64);
            let growth = max_norm(&u) / norm0;
            if !(growth <= MAX_GROWTH) {
                return Err(Error::UnstableStep {
                    t: now + (i + 1) as f64 * span / n as f64,
                    growth,
                });
            }
        }
        now = target;
        check_boundary(&u)?;
        out.push(to_bloch(grid, now, &u)?);
    }
    Ok(out)
}

/// A snapshot and the estimated time-discretization error, from comparing
/// steps `dt` and `dt / 2`. The field is the `dt / 2` run.
#[derive(Debug, Clone)]
pub struct FdSnapshot {
    pub field: BlochField,
    pub time_error: f64,
}

fn max_diff(a: &BlochField, b: &BlochField) -> f64 {
    [
        (&a.rho_plus, &b.rho_plus),
        (&a.c_i, &b.c_i),
        (&a.rho_minus, &b.rho_minus),
        (&a.c_r, &b.c_r),
    ]
    .iter()
    .flat_map(|(x, y)| x.iter().zip(y.iter()).map(|(p, q)| (p - q).abs()))
    .fold(0.0, f64::max)
}

/// Snapshots at increasing `times`. `dt = None` uses [`auto_step`].
pub fn fd_snapshots(
    p: &Params,
    ic: &InitialCondition,
    times: &[f64],
    grid: &SpatialGrid,
    dt: Option<f64>,
) -> Result<Vec<FdSnapshot>> {
    p.validate()?;
    let h = dt.unwrap_or_else(|| auto_step(p, grid));
    if !(h > 0.0) {
        return Err(Error::NonPositiveTime(h));
    }
    let coarse = run(p, ic, times, grid, h)?;
    let fine = run(p, ic, times, grid, 0.5 * h)?;
    Ok(coarse
        .iter()
        .zip(fine)
        .map(|(c, f)| FdSnapshot {
            time_error: 16.0 / 15.0 * max_diff(c, &f),
            field: f,
        })
        .collect())
}

/// The field at `t_end`.
pub fn fd_integrate(
    p: &Params,
    ic: &InitialCondition,
    t_end: f64,
    grid: &SpatialGrid,
    dt: Option<f64>,
) -> Result<FdSnapshot> {
    if !(t_end > 0.0) {
        return Err(Error::NonPositiveTime(t_end));
    }
    Ok(fd_snapshots(p, ic, &[t_end], grid, dt)?.remove(0))
}

/// A run on `grid` compared with a run at twice the spacing. `error`
/// estimates the spatial error of `field` as a third of the largest
/// difference at shared nodes; `extrapolated` is the Richardson combination
/// `(4 fine - coarse) / 3` on the coarse nodes.
#[derive(Debug, Clone)]
pub struct SpatialEstimate {
    pub field: BlochField,
    pub extrapolated: BlochField,
    pub error: f64,
}

pub fn spatial_richardson(
    p: &Params,
    ic: &InitialCondition,
    times: &[f64],
    grid: &SpatialGrid,
) -> Result<Vec<SpatialEstimate>> {
    p.validate()?;
    let coarse_grid = SpatialGrid::new(grid.half_width(), grid.len() / 2)?;
    let fine = run(p, ic, times, grid, auto_step(p, grid))?;
    let coarse = run(p, ic, times, &coarse_grid, auto_step(p, &coarse_grid))?;
    Ok(fine
        .into_iter()
        .zip(coarse)
        .map(|(f, c)| {
            let mix = |a: &Vec<f64>, b: &Vec<f64>| -> Vec<f64> {
                a.iter()
                    .enumerate()
                    .map(|(j, v)| (4.0 * b[2 * j] - v) / 3.0)
                    .collect()
            };
            let pairs = [
                (&c.rho_plus, &f.rho_plus),
                (&c.c_i, &f.c_i),
                (&c.rho_minus, &f.rho_minus),
                (&c.c_r, &f.c_r),
            ];
            let worst = pairs
                .iter()
                .flat_map(|(a, b)| a.iter().enumerate().map(move |(j, v)| (v - b[2 * j]).abs()))
                .fold(0.0, f64::max);
            let extrapolated = BlochField {
                grid: coarse_grid,
                t: c.t,
                rho_plus: mix(&c.rho_plus, &f.rho_plus),
                c_i: mix(&c.c_i, &f.c_i),
                rho_minus: mix(&c.rho_minus, &f.rho_minus),
                c_r: mix(&c.c_r, &f.c_r),
            };
            SpatialEstimate {
                field: f,
                extrapolated,
                error: worst / 3.0,
            }
        })
        .collect())
}
