use thiserror::Error;

/// Errors raised anywhere in the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the function or model.
    #[error("domain error: {0}")]
    Domain(String),

    /// An integral defining the requested quantity is infinite.
    #[error("divergent: {0}")]
    Divergent(String),

    /// Adaptive quadrature ran out of budget; the best estimate is attached.
    #[error("quadrature did not converge (estimate {estimate}, error {abs_err})")]
    NonConvergence { estimate: f64, abs_err: f64 },

    /// The integrand returned NaN at a finite abscissa.
    #[error("integrand returned NaN at x = {0}")]
    NanIntegrand(f64),

    /// A value exceeds the representable range.
    #[error("overflow: {0}")]
    Overflow(String),

    /// The density `g` vanishes where `f` does not.
    #[error("support mismatch: {0}")]
    SupportMismatch(String),

    /// No closed form or algorithm exists for the request.
    #[error("unsupported: {0}")]
    Unsupported(String),

    /// The diffusion is not ergodic (infinite speed measure).
    #[error("not ergodic: {0}")]
    NotErgodic(String),

    /// Malformed model configuration or expression.
    #[error("config error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}

pub(crate) fn divergent<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Divergent(msg.into()))
}
