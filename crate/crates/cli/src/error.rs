use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("unknown figure {0:?}; expected one of fig1..fig6")]
    UnknownFigure(String),
    #[error(transparent)]
    Solver(#[from] oqbm::Error),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::UnknownFigure(_) => 3,
            CliError::Solver(_) => 4,
            CliError::Io { .. } | CliError::Json(_) => 5,
        }
    }
}
