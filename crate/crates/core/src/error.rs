use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("value {value} outside the domain {domain}")]
    Domain { value: f64, domain: &'static str },

    #[error("trajectory is empty or too short")]
    EmptyTrajectory,

    #[error("cannot allocate storage for {0} samples")]
    Allocation(usize),

    #[error("quadrature did not converge on [{a}, {b}] (error estimate {estimate:e})")]
    Quadrature { a: f64, b: f64, estimate: f64 },

    #[error("density cannot be normalized: {0}")]
    DegenerateNormalization(String),

    #[error("grid too coarse: {0}")]
    GridTooCoarse(String),

    #[error("exit-time bound requires 2GT > δ(1 + GT); got δ = {delta}, G = {pump_rate}, T = {decay_time}")]
    BoundPrecondition {
        delta: f64,
        pump_rate: f64,
        decay_time: f64,
    },

    #[error("all {0} exit-time runs hit the step limit")]
    AllCensored(usize),

    #[error("unknown model `{0}`")]
    UnknownModel(String),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
