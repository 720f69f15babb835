//! Scenario runs, figure data and the validation suite behind the `oqbm`
//! command.

pub mod config;
pub mod dispatch;
pub mod error;
pub mod figures;
pub mod output;
pub mod validate;

pub use config::RunConfig;
pub use dispatch::{Regime, Route, Run};
pub use error::CliError;
