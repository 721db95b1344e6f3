use std::fmt;

use corridor_hedge::Error;
use corridor_sim::SimError;

/// Exit code 2 for bad input, 3 for numerical failure.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "error: {m}"),
            CliError::Numerical(m) => write!(f, "numerical failure: {m}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidParameter { .. } | Error::Domain { .. } => CliError::Usage(e.to_string()),
            Error::Degenerate(_) => CliError::Usage(format!("{e}; nothing to solve")),
            Error::DivergentIntegral { .. } => CliError::Usage(format!(
                "{e}. The discounted variance of the unhedged position is infinite on (a, inf) \
                 for these parameters; use a finite upper boundary b instead"
            )),
            _ => CliError::Numerical(e.to_string()),
        }
    }
}

impl From<SimError> for CliError {
    fn from(e: SimError) -> Self {
        match e {
            SimError::Model(m) => m.into(),
            SimError::Config(_) | SimError::UnknownStrategy(_) | SimError::ThreadPool(_) => {
                CliError::Usage(e.to_string())
            }
            SimError::Censoring { .. } | SimError::MissingPlan(_) => CliError::Numerical(e.to_string()),
        }
    }
}
