use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use oqbm::BlochField;
use serde::Serialize;
use serde_json::json;

use crate::dispatch::Run;
use crate::error::CliError;

pub const CSV_HEADER: &str = "t,x,P,Q,C_R,C_I,rho11,rho22";

/// One row per node, 17 significant digits, LF line endings.
pub fn snapshot_csv(u: &BlochField) -> String {
    let mut s = String::with_capacity(200 * u.grid.len());
    s.push_str(CSV_HEADER);
    s.push('\n');
    for (j, x) in u.grid.nodes().into_iter().enumerate() {
        let (p, q) = (u.rho_plus[j], u.rho_minus[j]);
        let _ = writeln!(
            s,
            "{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}",
            u.t,
            x,
            p,
            q,
            u.c_r[j],
            u.c_i[j],
            0.5 * (p + q),
            0.5 * (p - q)
        );
    }
    s
}

pub fn snapshot_name(t: f64) -> String {
    format!("t{t}.csv")
}

/// Mass and minimum of the density of one snapshot.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SnapshotStats {
    pub t: f64,
    pub mass: f64,
    pub min_density: f64,
}

pub fn stats(u: &BlochField) -> SnapshotStats {
    SnapshotStats {
        t: u.t,
        mass: u.grid.trapezoid(&u.rho_plus),
        min_density: u.rho_plus.iter().copied().fold(f64::INFINITY, f64::min),
    }
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

/// Writes every snapshot and `manifest.json` into `dir`.
pub fn write_run(run: &Run, dir: &Path) -> Result<Vec<PathBuf>, CliError> {
    fs::create_dir_all(dir).map_err(|source| CliError::Io {
        path: dir.display().to_string(),
        source,
    })?;
    let mut files = Vec::new();
    for u in &run.snapshots {
        let path = dir.join(snapshot_name(u.t));
        write(&path, &snapshot_csv(u))?;
        files.push(path);
    }
    let manifest = json!({
        "name": run.config.name,
        "config": run.config,
        "regime": run.regime,
        "route": run.route,
        "grid": {
            "half_width": run.grid.half_width(),
            "n_points": run.grid.len(),
            "dx": run.grid.dx(),
        },
        "tolerances": {
            "eps_tail": oqbm::initial::EPS_TAIL,
            "theta_tol": oqbm::quadrature::THETA_TOL,
            "kink_mass_tol": crate::dispatch::KINK_MASS_TOL,
        },
        "stats": run.snapshots.iter().map(stats).collect::<Vec<_>>(),
        "files": files.iter().map(|f| f.file_name().unwrap().to_string_lossy().into_owned()).collect::<Vec<_>>(),
        "versions": { "oqbm": env!("CARGO_PKG_VERSION") },
    });
    let path = dir.join("manifest.json");
    write(&path, &(serde_json::to_string_pretty(&manifest)? + "\n"))?;
    files.push(path);
    Ok(files)
}
