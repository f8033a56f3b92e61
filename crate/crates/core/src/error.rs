use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// Argument outside the domain where the operation is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// Malformed model data (tabulated coefficients, config files).
    #[error("format error: {0}")]
    Format(String),

    /// A documented precondition of the operation was violated.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// The radial solution left the overflow guard.
    #[error("solution diverged past |u| = {guard:e} at r = {radius}")]
    Divergence { radius: f64, guard: f64 },

    /// Numerical diagnostics could not be formed (e.g. mesh too coarse).
    #[error("diagnostics error: {0}")]
    Diagnostics(String),

    /// Requested accuracy was not reached; the best value is carried along.
    #[error("accuracy not reached: {message} (best value {partial})")]
    Accuracy { message: String, partial: f64 },

    /// Expansion fit could not be calibrated.
    #[error("calibration error: {0}")]
    Calibration(String),

    /// Existence and nonexistence claims collided on the same point.
    #[error("consistency violation: {0}")]
    Consistency(String),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("serialization error: {0}")]
    Serialization(String),
}

impl Error {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Domain(_) | Error::Format(_) | Error::Precondition(_) => 2,
            Error::Consistency(_) => 3,
            _ => 1,
        }
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Serialization(e.to_string())
    }
}

impl From<toml::de::Error> for Error {
    fn from(e: toml::de::Error) -> Self {
        Error::Format(e.to_string())
    }
}

impl From<toml::ser::Error> for Error {
    fn from(e: toml::ser::Error) -> Self {
        Error::Serialization(e.to_string())
    }
}
