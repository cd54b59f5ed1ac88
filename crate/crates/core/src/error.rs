//! Error types, one enum per concern.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ArrivalError {
    #[error("distribution has zero mean")]
    ZeroMean,
    #[error("quantile {0} is outside [0, 1]")]
    InvalidQuantile(f64),
    #[error("integrand returned {value} at node {node}")]
    NonFiniteIntegrand { node: f64, value: f64 },
    #[error("support lower bound {0} is negative")]
    NegativeSupport(f64),
    #[error("invalid distribution parameter: {0}")]
    InvalidParameter(String),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QueueError {
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error(
        "threshold search hit the cap T = {cap} before the cost turned up (best T = {best_threshold}, z = {best_cost})"
    )]
    CapReached {
        cap: usize,
        best_threshold: usize,
        best_cost: f64,
    },
    #[error("value iteration did not converge within {iterations} iterations (span {span:e})")]
    NoConvergence { iterations: usize, span: f64 },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DiffusionError {
    #[error("no sign change of the threshold equation on [0, 1000] for m = {m}")]
    BracketFailure { m: f64 },
    #[error(transparent)]
    Arrival(#[from] ArrivalError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PolicyError {
    #[error("staffing cost {c} is not below min(a', p) = {bound}; no staffing is optimal")]
    InvalidRegime { c: f64, bound: f64 },
    #[error(transparent)]
    Arrival(#[from] ArrivalError),
    #[error(transparent)]
    Diffusion(#[from] DiffusionError),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SimError {
    #[error("only {events} events per batch; at least 10 are needed")]
    DegenerateHorizon { events: u64 },
    #[error("invalid simulation config: {0}")]
    InvalidConfig(String),
}

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("malformed config: {0}")]
    Json(#[from] serde_json::Error),
    #[error("invalid config: {0}")]
    Invalid(String),
}

/// Failure of a CLI command, split by exit code.
#[derive(Debug, Error)]
pub enum CommandError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Policy(#[from] PolicyError),
    #[error(transparent)]
    Diffusion(#[from] DiffusionError),
    #[error(transparent)]
    Queue(#[from] QueueError),
    #[error(transparent)]
    Sim(#[from] SimError),
    #[error("cannot write output: {0}")]
    Output(String),
}

impl CommandError {
    /// 2 for bad input, 1 for everything else.
    pub fn exit_code(&self) -> i32 {
        match self {
            CommandError::Config(_) => 2,
            _ => 1,
        }
    }
}
