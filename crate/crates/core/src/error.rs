use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument outside the domain of the formula it feeds.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("non-finite parameter `{name}` = {value}")]
    NonFinite { name: &'static str, value: f64 },

    /// The generator is singular or too ill-conditioned to invert.
    #[error("singular generator (condition estimate {condition:.3e}): {reason}")]
    Singular { condition: f64, reason: String },

    #[error("steady-state residual {residual:.3e} exceeds tolerance {tolerance:.3e}")]
    Residual { residual: f64, tolerance: f64 },

    /// The denominator of a rate balance vanishes.
    #[error("singular balance: {0}")]
    SingularBalance(String),

    #[error("fraction block not normalized: {block} sums to {sum}")]
    Normalization { block: &'static str, sum: f64 },

    #[error("configuration error at `{path}`: {message}")]
    Config { path: String, message: String },

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub(crate) fn finite(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() {
        Ok(value)
    } else {
        Err(Error::NonFinite { name, value })
    }
}
