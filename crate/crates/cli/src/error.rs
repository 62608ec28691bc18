use std::fmt;

/// A failure with the process exit code it maps to.
#[derive(Debug)]
pub enum CliError {
    /// Bad input: unreadable or malformed files, invalid parameters.
    Config(String),
    /// Request exceeds a cap or asks for something the group does not support.
    Capability(String),
    /// The computation ran but a numerical check or fit failed.
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Capability(_) => 3,
            CliError::Numerical(_) => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "config error: {m}"),
            CliError::Capability(m) => write!(f, "capability error: {m}"),
            CliError::Numerical(m) => write!(f, "numerical failure: {m}"),
        }
    }
}

impl From<rbkit::Error> for CliError {
    fn from(e: rbkit::Error) -> Self {
        use rbkit::Error::*;
        let msg = e.to_string();
        match e {
            CapExceeded { .. } | UnsupportedGroup(_) | InapplicableVariant { .. } | BlockLayoutMismatch(_) => {
                CliError::Capability(msg)
            }
            NonUniformCensus { .. } | Unidentifiable(_) | FitFailed(_) => CliError::Numerical(msg),
            _ => CliError::Config(msg),
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

pub fn io_error(path: &std::path::Path, e: std::io::Error) -> CliError {
    CliError::Config(format!("{}: {e}", path.display()))
}
