//! Command-line front end: single-point bounds, SNR sweeps, figure presets
//! and a self-test.

pub mod config;
pub mod output;
pub mod presets;
pub mod run;
pub mod selftest;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Bad flags or configuration; exit code 2.
    #[error("{0}")]
    Usage(String),
    /// Some grid points failed numerically; exit code 3.
    #[error("{0}")]
    Numeric(String),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
}

impl From<ratesplit::Error> for CliError {
    fn from(e: ratesplit::Error) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Numeric(_) => 3,
            CliError::Io(_) => 1,
        }
    }
}
