use cavqed_core::Error;

/// Process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exit {
    /// Bad arguments, config keys or parameter values.
    Usage = 1,
    NonConvergence = 2,
    /// Input files that are missing, malformed or inconsistent.
    Data = 3,
}

#[derive(Debug)]
pub struct CliError {
    pub exit: Exit,
    pub message: String,
}

impl CliError {
    pub fn config(message: impl Into<String>) -> Self {
        CliError { exit: Exit::Usage, message: message.into() }
    }

    pub fn data(message: impl Into<String>) -> Self {
        CliError { exit: Exit::Data, message: message.into() }
    }

    pub fn non_convergence(message: impl Into<String>) -> Self {
        CliError { exit: Exit::NonConvergence, message: message.into() }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let exit = match e {
            Error::Domain(_) | Error::Config(_) => Exit::Usage,
            Error::Data(_) | Error::Io(_) => Exit::Data,
            Error::RankDeficient(_) | Error::Guess(_) => Exit::NonConvergence,
        };
        CliError { exit, message: e.to_string() }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::data(e.to_string())
    }
}
