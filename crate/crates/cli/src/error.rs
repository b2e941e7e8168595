use thiserror::Error;

/// Failure classes, each with its own exit status.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid configuration:\n  {}", .0.join("\n  "))]
    Config(Vec<String>),

    #[error("assumption violated: {0}")]
    Assumption(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("{0}")]
    Output(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Assumption(_) => 1,
            CliError::Config(_) | CliError::Output(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

impl From<jumpfk::Error> for CliError {
    fn from(e: jumpfk::Error) -> Self {
        use jumpfk::Error as E;
        match e {
            E::GridMismatch(_)
            | E::InvalidGrid(_)
            | E::UnresolvableKernel(_)
            | E::InvalidKernel(_)
            | E::Domain(_)
            | E::StepSize(_)
            | E::Config(_)
            | E::Format(_) => CliError::Config(vec![e.to_string()]),
            E::Io(_) => CliError::Output(e.to_string()),
            E::AssumptionViolated(msg) => CliError::Assumption(msg),
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Output(e.to_string())
    }
}
