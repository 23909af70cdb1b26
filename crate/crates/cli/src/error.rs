use ergm_core::ErgmError;

/// Process exit status for each failure class.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ExitCode {
    Success = 0,
    Parse = 1,
    Numerical = 2,
    Config = 3,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Parse(String),
    #[error("{0}")]
    Numerical(String),
}

pub fn config(msg: impl Into<String>) -> anyhow::Error {
    CliError::Config(msg.into()).into()
}

/// Exit status for an error chain, decided by its innermost typed cause.
pub fn classify(err: &anyhow::Error) -> ExitCode {
    for cause in err.chain() {
        if let Some(e) = cause.downcast_ref::<CliError>() {
            return match e {
                CliError::Config(_) => ExitCode::Config,
                CliError::Parse(_) => ExitCode::Parse,
                CliError::Numerical(_) => ExitCode::Numerical,
            };
        }
        if let Some(e) = cause.downcast_ref::<ErgmError>() {
            return match e {
                ErgmError::Parse { .. }
                | ErgmError::MalformedTerm { .. }
                | ErgmError::SelfLoop(_)
                | ErgmError::DuplicateEdge(..) => ExitCode::Parse,
                ErgmError::AllModelsDegenerate
                | ErgmError::EmptyModelList
                | ErgmError::NonPositiveNullAic(_)
                | ErgmError::NonFiniteTheta { .. } => ExitCode::Numerical,
                _ => ExitCode::Config,
            };
        }
        if cause.downcast_ref::<serde_json::Error>().is_some() {
            return ExitCode::Parse;
        }
    }
    ExitCode::Config
}
