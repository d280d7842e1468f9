use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
    #[error("{0}")]
    Tolerance(String),
    #[error("{0}")]
    Numerical(String),
    #[error("{0}")]
    Validation(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Io(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Tolerance(_) => 3,
            CliError::Numerical(_) => 4,
            CliError::Validation(_) => 5,
        }
    }
}

impl From<rsajam::Error> for CliError {
    fn from(e: rsajam::Error) -> Self {
        use rsajam::Error as E;
        match e {
            E::Parameter(_) => CliError::Usage(e.to_string()),
            E::State(_) | E::Domain(_) | E::Bracket(_) => CliError::Numerical(e.to_string()),
            E::CouplingViolation { .. } => CliError::Validation(e.to_string()),
        }
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        if e.is_io_error() {
            match e.into_kind() {
                csv::ErrorKind::Io(io) => CliError::Io(io),
                _ => unreachable!(),
            }
        } else {
            CliError::Usage(format!("malformed CSV: {e}"))
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;
