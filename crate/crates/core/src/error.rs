use thiserror::Error;

use crate::dynamics::State;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("invalid cylinder geometry: bore D1={bore} m must exceed rod D2={rod} m > 0")]
    InvalidGeometry { bore: f64, rod: f64 },

    #[error("singular mass matrix (det = {det:e}) at {state:?}")]
    SingularDynamics { det: f64, state: State },

    #[error("actuation infeasible: transmitted force {transmitted} N does not exceed required {required} N")]
    ActuationInfeasible { transmitted: f64, required: f64 },

    #[error("step size underflow ({step:e} s) at t = {t} s, state {state:?}")]
    Stiffness { t: f64, step: f64, state: Vec<f64> },

    #[error("non-finite derivative at t = {t} s")]
    Numeric { t: f64 },

    #[error("invalid integrator configuration: {0}")]
    InvalidConfig(String),

    #[error("unknown cycle label `{0}`")]
    InvalidCycle(String),

    #[error("evaluation time {t_eval} s lies outside trajectory span [0, {t_end}] s")]
    Range { t_eval: f64, t_end: f64 },

    #[error("unknown scenario `{0}`")]
    UnknownScenario(String),

    #[error("empty parameter grid")]
    EmptyGrid,

    #[error("config: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
