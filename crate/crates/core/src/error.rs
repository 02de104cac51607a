use thiserror::Error;

/// Errors raised by the analytic models, the simulator and the experiment harness.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum PudError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("argument out of range: {0}")]
    Argument(String),

    #[error("cannot parse {input:?}: {reason}")]
    Parse { input: String, reason: String },

    #[error("unstable system: offered load {rho} is not below 1")]
    Unstable { rho: f64 },

    #[error("gamma = {gamma} is outside the MGF domain (must be below {bound})")]
    Domain { gamma: f64, bound: f64 },

    #[error("undefined quantity: {0}")]
    Undefined(String),

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl PudError {
    /// Process exit code used by the command-line front end:
    /// 1 for bad arguments or configuration, 2 for domain and stability failures.
    pub fn exit_code(&self) -> i32 {
        match self {
            PudError::InvalidParameter(_) | PudError::Argument(_) | PudError::Parse { .. } | PudError::Io(_) => 1,
            PudError::Unstable { .. } | PudError::Domain { .. } | PudError::Undefined(_) | PudError::Numeric(_) => 2,
        }
    }
}

impl From<std::io::Error> for PudError {
    fn from(e: std::io::Error) -> Self {
        PudError::Io(e.to_string())
    }
}

impl From<csv::Error> for PudError {
    fn from(e: csv::Error) -> Self {
        PudError::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, PudError>;
