use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    /// The boundary-condition system is numerically singular at the requested phase.
    #[error("boundary system is near-singular (|D| = {det_abs:e})")]
    NearSingular { det_abs: f64 },

    #[error("Newton iteration lost lock on the branch at chi = {chi}")]
    LostLock { chi: f64 },

    #[error("no resonance branch crosses u = {u} (locus spans [{u_min}, {u_max}])")]
    NoBranch { u: f64, u_min: f64, u_max: f64 },

    #[error("branch index {index} out of range ({available} branches at this detuning)")]
    BranchIndex { index: usize, available: usize },

    #[error("config error at `{key}`: {message}")]
    Config { key: String, message: String },
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }

    pub(crate) fn config(key: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            key: key.into(),
            message: message.into(),
        }
    }

    /// True for errors caused by user input rather than numerics.
    pub fn is_config_error(&self) -> bool {
        matches!(self, Error::Config { .. } | Error::InvalidParameter { .. })
    }
}
