use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("division by a value too close to zero ({divisor:e})")]
    DegenerateDivision { divisor: f64 },
    #[error("{function} is not defined at {argument}")]
    Domain { function: &'static str, argument: f64 },
    #[error("atan2 evaluated at the origin")]
    OriginAtan2,
    #[error("not enough stored derivatives for this operation")]
    OrderExhausted,

    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },
    #[error("unknown identifier `{name}` at offset {offset}")]
    UnknownIdentifier { name: String, offset: usize },
    #[error("function `{name}` takes {expected} argument(s), got {found}")]
    ArityMismatch { name: String, expected: usize, found: usize },
    #[error("unknown catalog entry `{0}`")]
    UnknownCatalogName(String),

    #[error("curve `{curve}` is degenerate at t = {t}: |γ' × γ''| = {cross:e}")]
    NotNonDegenerate { curve: String, t: f64, cross: f64 },
    #[error("frame of `{curve}` is not orthonormal at t = {t} (residual {residual:e})")]
    NotOrthonormal { curve: String, t: f64, residual: f64 },

    #[error("frame field is not integrable: residual {residual:e} at ({u}, {v})")]
    NotIntegrable { residual: f64, u: f64, v: f64 },
    #[error("integration step fell below {min_step:e}")]
    StepUnderflow { min_step: f64 },

    #[error("angle field unavailable at ({u}, {v}): {reason}")]
    ThetaUnavailable { u: f64, v: f64, reason: String },
    #[error("supplied angle field fails its defining equation at ({u}, {v}): residual {residual:e}")]
    ThetaResidual { u: f64, v: f64, residual: f64 },

    #[error("closed-form {quantity} disagrees with the jet value: {closed} vs {jet}")]
    ClosedFormMismatch { quantity: String, closed: f64, jet: f64 },

    #[error("invalid input: {0}")]
    Input(String),
    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
