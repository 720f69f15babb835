use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use oqbm_cli::dispatch::compute;
use oqbm_cli::figures::{run_figure, FIGURES};
use oqbm_cli::output::write_run;
use oqbm_cli::validate::{all_passed, report, run_validate, Level};
use oqbm_cli::{CliError, RunConfig};

#[derive(Parser)]
#[command(name = "oqbm", version, about = "Open quantum Brownian motion solver")]
struct Cli {
    /// Worker threads, 0 for one per core.
    #[arg(long, global = true, default_value_t = 0)]
    threads: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solves one configuration and writes a CSV per snapshot.
    Solve {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, env = "OQBM_OUT_DIR", default_value = "out")]
        out: PathBuf,
    },
    /// Writes the data behind a figure, or every figure with `all`.
    Figure {
        #[arg(long)]
        figure: String,
        #[arg(long, env = "OQBM_OUT_DIR", default_value = "out")]
        out: PathBuf,
    },
    /// Runs the cross-validation suite.
    Validate {
        #[arg(long, value_enum, default_value_t = Level::Fast)]
        level: Level,
    },
}

fn run(cli: Cli) -> Result<bool, CliError> {
    if cli.threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global()
            .map_err(|e| CliError::Config(e.to_string()))?;
    }
    match cli.command {
        Command::Solve { config, out } => {
            let text = std::fs::read_to_string(&config).map_err(|source| CliError::Io {
                path: config.display().to_string(),
                source,
            })?;
            let run = compute(&RunConfig::from_json(&text)?)?;
            for f in write_run(&run, &out)? {
                println!("{}", f.display());
            }
            Ok(true)
        }
        Command::Figure { figure, out } => {
            let names: Vec<&str> = if figure == "all" {
                FIGURES.to_vec()
            } else {
                vec![figure.as_str()]
            };
            for name in names {
                for (panel, run) in run_figure(name, &out)? {
                    println!(
                        "{} {}: {} snapshots, route {:?}",
                        panel.figure,
                        panel.side,
                        run.snapshots.len(),
                        run.route
                    );
                }
            }
            Ok(true)
        }
        Command::Validate { level } => {
            let checks = run_validate(level);
            print!("{}", report(&checks));
            Ok(all_passed(&checks))
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
