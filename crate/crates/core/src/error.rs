use thiserror::Error;

/// Errors surfaced by the verification engine.
#[derive(Debug, Error)]
pub enum HrError {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    #[error("unknown catalogue entry `{0}`")]
    UnknownEntry(String),

    #[error("jet order {requested} exceeds profile max_order {max}")]
    OrderExceeded { requested: usize, max: usize },

    #[error("quadrature did not reach the requested accuracy: estimate {estimate:e} > tolerance {tolerance:e} ({context})")]
    QuadAccuracy {
        estimate: f64,
        tolerance: f64,
        context: String,
    },

    #[error("integrand has unbounded support and no decay certificate")]
    UnboundedSupport,

    #[error("singular sample: p = {p} < 2 with vanishing modulus and nonzero derivative at r = {r}")]
    SingularSample { p: f64, r: f64 },

    #[error("profile parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("config error: {0}")]
    Config(String),
}

impl From<serde_json::Error> for HrError {
    fn from(e: serde_json::Error) -> Self {
        HrError::Config(e.to_string())
    }
}
