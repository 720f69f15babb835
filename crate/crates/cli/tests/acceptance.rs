use std::process::ExitCode;

use oqbm_cli::validate::{
    gammaz0_checks, green_delta0_checks, mass_checks, omega0_checks, shape_checks,
    special_function_checks, stability_checks, tau1_checks, Check, FigureRuns,
};

fn flatten(r: Result<Vec<Check>, oqbm_cli::CliError>) -> Vec<Check> {
    r.unwrap_or_else(|e| {
        vec![Check {
            passed: false,
            detail: e.to_string(),
            ..Check::below("error", f64::NAN, 0.0)
        }]
    })
}

fn main() -> ExitCode {
    let figs = FigureRuns::compute();
    let mut criteria: Vec<(&str, Vec<Check>)> = Vec::new();
    let figs_err = |e: &oqbm_cli::CliError| {
        vec![Check {
            passed: false,
            detail: e.to_string(),
            ..Check::below("figure runs", f64::NAN, 0.0)
        }]
    };

    criteria.push((
        "first imbalance zero",
        flatten(tau1_checks(figs.as_ref().ok())),
    ));
    criteria.push((
        "undriven closed vs spectral vs finite differences",
        flatten(omega0_checks(true)),
    ));
    criteria.push((
        "uncoupled Green's matrix vs spectral",
        flatten(green_delta0_checks()),
    ));
    criteria.push((
        "undephased identities and Green's matrix vs quadrature",
        flatten(gammaz0_checks(true)),
    ));
    match &figs {
        Ok(f) => {
            criteria.push(("mass and positivity of figure snapshots", mass_checks(f)));
            criteria.push(("stability over random draws", stability_checks()));
            criteria.push(("peak counts and positions", shape_checks(f)));
        }
        Err(e) => {
            criteria.push(("mass and positivity of figure snapshots", figs_err(e)));
            criteria.push(("stability over random draws", stability_checks()));
            criteria.push(("peak counts and positions", figs_err(e)));
        }
    }
    criteria.push((
        "special functions and kernel time derivative",
        flatten(special_function_checks()),
    ));

    let mut ok = true;
    for (i, (name, checks)) in criteria.iter().enumerate() {
        let passed = !checks.is_empty() && checks.iter().all(|c| c.passed);
        ok &= passed;
        println!(
            "criterion {} {}: {name}",
            i + 1,
            if passed { "PASS" } else { "FAIL" }
        );
        for c in checks {
            println!(
                "    {} {}: {:.3e} {} {:.1e} {}",
                if c.passed { "ok  " } else { "FAIL" },
                c.name,
                c.value,
                c.relation,
                c.tolerance,
                c.detail
            );
        }
    }
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
