use std::fmt;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error{}: {msg}", LineRef(*line))]
    Config { line: Option<usize>, msg: String },
    #[error("format error: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Core(#[from] bkmhd_core::Error),
}

struct LineRef(Option<usize>);

impl fmt::Display for LineRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            Some(l) => write!(f, " (line {l})"),
            None => Ok(()),
        }
    }
}

pub type Result<T, E = CliError> = std::result::Result<T, E>;

pub(crate) fn config_err(line: Option<usize>, msg: impl Into<String>) -> CliError {
    CliError::Config { line, msg: msg.into() }
}

pub(crate) fn format_err(msg: impl Into<String>) -> CliError {
    CliError::Format(msg.into())
}
