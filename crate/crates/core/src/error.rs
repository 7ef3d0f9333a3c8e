use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the mathematical domain of a model function.
    #[error("{name} = {value} is outside the valid domain: {expected}")]
    Domain {
        name: &'static str,
        value: f64,
        expected: &'static str,
    },

    /// A horizontal distance beyond the main-lobe footprint.
    #[error("distance {r} m exceeds the coverage radius {radius} m")]
    OutsideCoverage { r: f64, radius: f64 },

    /// A parameter record or feasibility box that violates its invariants.
    #[error("invalid {field}: {reason}")]
    Config { field: String, reason: String },

    #[error("simulation region {region} is not valid for mode {mode}")]
    RegionMismatch {
        mode: &'static str,
        region: &'static str,
    },

    #[error("mission time is unbounded: cell rate is {rate} bps/Hz")]
    UnboundedTime { rate: f64 },
}

impl Error {
    pub(crate) fn config(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            reason: reason.into(),
        }
    }
}
