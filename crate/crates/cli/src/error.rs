use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad or missing configuration, including bad command-line values.
    #[error("config error: {0}")]
    Config(String),

    /// A simulation disagreed with the closed form by more than the tolerance.
    #[error("validation failed: {0}")]
    Validation(String),

    #[error("model error: {0}")]
    Model(#[from] uavbeam::Error),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Model(
                uavbeam::Error::Config { .. } | uavbeam::Error::Domain { .. } | uavbeam::Error::RegionMismatch { .. },
            ) => 2,
            CliError::Validation(_) => 3,
            CliError::Model(_) | CliError::Io(_) => 1,
        }
    }
}
