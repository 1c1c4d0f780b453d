//! Seedable Monte Carlo experiment harness and CLI around the `cyclodet`
//! detectors: detection probability vs SNR, ROC sweeps, multi-user
//! cooperation and shadowing scenarios, all emitting CSV tables.

pub mod cli;
pub mod config;
pub mod runner;
pub mod sampfile;
pub mod table;

/// Harness-level errors, mapped onto process exit codes by the binary.
#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error(transparent)]
    Core(#[from] cyclodet::Error),
    #[error("configuration: {0}")]
    Config(String),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error("config file: {0}")]
    Toml(#[from] toml::de::Error),
}

impl HarnessError {
    /// 2 for configuration/input problems, 3 for numerical failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            HarnessError::Core(cyclodet::Error::Numerical(_)) => 3,
            _ => 2,
        }
    }
}

pub type Result<T> = std::result::Result<T, HarnessError>;
