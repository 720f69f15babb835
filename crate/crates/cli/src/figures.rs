use std::path::Path;

use oqbm::{InitialCondition, Params};

use crate::config::RunConfig;
use crate::dispatch::{compute, Run};
use crate::error::CliError;
use crate::output::write_run;

pub const FIGURES: [&str; 6] = ["fig1", "fig2", "fig3", "fig4", "fig5", "fig6"];

const LONG: [f64; 5] = [0.0, 50.0, 100.0, 150.0, 200.0];
const SHORT: [f64; 5] = [0.0, 25.0, 50.0, 75.0, 100.0];

/// One panel of a figure. `quantity` is the plotted column.
#[derive(Debug, Clone)]
pub struct Panel {
    pub figure: &'static str,
    pub side: &'static str,
    pub quantity: &'static str,
    pub config: RunConfig,
}

fn config(name: String, params: Params, ic: InitialCondition, times: &[f64]) -> RunConfig {
    RunConfig {
        name: Some(name),
        params,
        ic,
        times: times.to_vec(),
        half_width: None,
        n_points: None,
    }
}

fn drifting(fig: &'static str, ic: InitialCondition) -> Vec<Panel> {
    let p = Params {
        gamma_p: 1e-3,
        gamma_z: 1e-3,
        delta: 1e-2,
        omega: 0.0,
    };
    [("left", "P"), ("right", "Q")]
        .into_iter()
        .map(|(side, quantity)| Panel {
            figure: fig,
            side,
            quantity,
            config: config(format!("{fig}-{side}"), p, ic.clone(), &LONG),
        })
        .collect()
}

fn undephased(fig: &'static str, quantity: &'static str) -> Vec<Panel> {
    let p = Params {
        gamma_p: 1e-2,
        gamma_z: 0.0,
        delta: 1e-1,
        omega: 1e-2,
    };
    [("left", 0.0), ("right", -0.5)]
        .into_iter()
        .map(|(side, q)| {
            let ic = InitialCondition::LaplaceCoherent {
                p: 0.25,
                r: 0.0,
                q,
                scale: p.delta / p.omega,
            };
            Panel {
                figure: fig,
                side,
                quantity,
                config: config(format!("{fig}-{side}"), p, ic, &SHORT),
            }
        })
        .collect()
}

/// Built-in scenarios. The real coherence of the Laplace-coherent state is
/// not given and is set to zero.
pub fn panels(name: &str) -> Result<Vec<Panel>, CliError> {
    Ok(match name {
        "fig1" => drifting(
            "fig1",
            InitialCondition::GaussianMixture {
                p: 0.75,
                sigma1: 1.0,
                sigma2: 2.0,
            },
        ),
        "fig2" => drifting(
            "fig2",
            InitialCondition::LaplaceMixture {
                p: 0.25,
                a: 1.0,
                b: 2.0,
            },
        ),
        "fig3" => drifting(
            "fig3",
            InitialCondition::UniformMixture {
                p: 0.75,
                a: 3.0,
                b: 2.0,
            },
        ),
        "fig4" => undephased("fig4", "P"),
        "fig5" => undephased("fig5", "Q"),
        "fig6" => {
            let p = Params {
                gamma_p: 1e-3,
                gamma_z: 1e-3,
                delta: 0.0,
                omega: 1e-2,
            };
            vec![
                Panel {
                    figure: "fig6",
                    side: "left",
                    quantity: "Q",
                    config: config(
                        "fig6-left".into(),
                        p,
                        InitialCondition::GaussianMixture {
                            p: 0.75,
                            sigma1: 2.0,
                            sigma2: 1.0,
                        },
                        &LONG,
                    ),
                },
                Panel {
                    figure: "fig6",
                    side: "right",
                    quantity: "Q",
                    config: config(
                        "fig6-right".into(),
                        p,
                        InitialCondition::GaussianCoherent {
                            p: 0.75,
                            mu: 0.8,
                            k: 1.0,
                            sigma: 1.0,
                        },
                        &LONG,
                    ),
                },
            ]
        }
        other => return Err(CliError::UnknownFigure(other.to_string())),
    })
}

/// Computes the panels of a figure, reusing a run when two panels share
/// a configuration.
pub fn compute_figure(name: &str) -> Result<Vec<(Panel, Run)>, CliError> {
    let mut out: Vec<(Panel, Run)> = Vec::new();
    for panel in panels(name)? {
        let shared = out.iter().find(|(_, r)| {
            r.config.params == panel.config.params && r.config.ic == panel.config.ic
        });
        let run = match shared {
            Some((_, r)) => Run {
                config: panel.config.clone(),
                ..r.clone()
            },
            None => compute(&panel.config)?,
        };
        out.push((panel, run));
    }
    Ok(out)
}

/// Writes `dir/<figure>/<side>/` for every panel.
pub fn run_figure(name: &str, dir: &Path) -> Result<Vec<(Panel, Run)>, CliError> {
    let runs = compute_figure(name)?;
    for (panel, run) in &runs {
        write_run(run, &dir.join(panel.figure).join(panel.side))?;
    }
    Ok(runs)
}
