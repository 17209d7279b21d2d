use thiserror::Error;

use crate::dmc::CapacityResult;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{name} = {value} is outside [0, 1]")]
    Domain { name: &'static str, value: f64 },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("invalid cut: {0}")]
    InvalidCut(String),

    #[error("transition matrix is not row-stochastic: {0}")]
    NotStochastic(String),

    #[error("Blahut-Arimoto did not converge after {} iterations (gap {:.3e})", .best.iterations, .best.residual)]
    NoConvergence { best: Box<CapacityResult> },

    #[error("no sign change of rate - bound on [{lo}, {hi}] (values {f_lo:.6e}, {f_hi:.6e})")]
    NoSignChange { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },

    #[error("Monte Carlo noise swamps the gap at {at}: rate - bound = {gap:.3e} with stderr {stderr:.3e}; raise the trial count")]
    NoisyBracket { at: f64, gap: f64, stderr: f64 },

    #[error("edge sample has {got} flags but the network has {expected} edges")]
    SampleMismatch { expected: usize, got: usize },
}

pub type Result<T> = std::result::Result<T, Error>;

/// Validates a probability eagerly; used at every public entry point.
pub(crate) fn check_prob(name: &'static str, value: f64) -> Result<f64> {
    if (0.0..=1.0).contains(&value) {
        Ok(value)
    } else {
        Err(Error::Domain { name, value })
    }
}
