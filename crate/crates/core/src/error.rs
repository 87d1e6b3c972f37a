use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("fields live on different grids")]
    GridMismatch,

    #[error("field contains non-finite values")]
    NonFinite,

    #[error("derivative order {order} outside (-{dimension}, {dimension})")]
    InvalidOrder { order: f64, dimension: usize },

    #[error("rescaling factor {0} < 1 would push the support outside the box")]
    InvalidScale(f64),

    #[error("weight |x|^(-r*gamma) not locally integrable: r*gamma = {power} >= d = {dimension}")]
    WeightNotIntegrable { power: f64, dimension: usize },

    #[error("invalid norm specification: {0}")]
    InvalidNormSpec(String),

    #[error("invalid problem parameters: {0}")]
    InvalidParams(String),

    #[error("derived dual exponent {which} = {value} leaves (0, 1)")]
    InfeasibleDual { which: &'static str, value: String },

    #[error("feasible interval for 1/r2~ is empty: {0}")]
    EmptyFeasibleInterval(String),

    #[error("admissible region is empty after {attempts} resampling attempts")]
    RegionEmpty { attempts: usize },

    #[error("solution blew up at t = {time}")]
    BlowUp { time: f64 },

    #[error("Picard iteration did not converge after {iterations} iterations (last increment {last_increment:e})")]
    NoConvergence {
        iterations: usize,
        last_increment: f64,
    },

    #[error("scattering increments do not decrease: {0}")]
    NotCauchy(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("cannot parse rational '{0}'")]
    ParseRational(String),
}
