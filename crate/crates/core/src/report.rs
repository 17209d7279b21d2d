//! All rates for one channel and grid shape, each tagged with the method
//! that produced it.

use std::fmt;

use serde::Serialize;

use crate::channel::ChannelModel;
use crate::depol_rates::{rate_parallel_depol, rate_parallel_depol_limit};
use crate::erasure_rates::{asymptotic_rates, rate_grid, rate_parallel_assisted, ExponentMode};
use crate::erasure_sim::{simulate, Strategy};
use crate::error::{Error, Result};
use crate::quantum_bound::{asymptotic_bound, closed_form_bound, multipath_bound};
use crate::topology::build_grid;

/// Seed used whenever the caller does not pick one.
pub const DEFAULT_SEED: u64 = 1729;
pub const DEFAULT_TRIALS: u64 = 1_000_000;

/// Max-flow and closed-form bounds must agree this closely.
const BOUND_AGREEMENT: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    ClosedForm,
    MaxFlow,
    BlahutArimoto,
    MonteCarlo,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Provenance::ClosedForm => "closed-form",
            Provenance::MaxFlow => "max-flow",
            Provenance::BlahutArimoto => "blahut-arimoto",
            Provenance::MonteCarlo => "monte-carlo",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Valued {
    pub value: f64,
    pub method: Provenance,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub stderr: Option<f64>,
}

impl Valued {
    pub fn exact(value: f64, method: Provenance) -> Self {
        Valued { value, method, stderr: None }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RateQuery {
    pub channel: ChannelModel,
    pub nx: usize,
    pub ny: usize,
    /// Use the large-`nx` limits instead of finite-grid rates.
    pub asymptotic: bool,
    pub joint_input: bool,
    pub exponent_mode: ExponentMode,
    pub trials: u64,
    pub seed: u64,
}

impl RateQuery {
    pub fn new(channel: ChannelModel, nx: usize, ny: usize) -> Self {
        RateQuery {
            channel,
            nx,
            ny,
            asymptotic: false,
            joint_input: false,
            exponent_mode: ExponentMode::NyCorrected,
            trials: DEFAULT_TRIALS,
            seed: DEFAULT_SEED,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RateReport {
    pub r_q: Valued,
    /// Cross-check of `r_q` by max-flow on the built network.
    pub r_q_max_flow: Option<Valued>,
    pub r_c: Option<Valued>,
    pub r_c_assisted: Option<Valued>,
    pub notes: Vec<String>,
}

impl RateReport {
    pub fn gap(&self) -> Option<f64> {
        self.r_c.map(|c| c.value - self.r_q.value)
    }

    pub fn gap_assisted(&self) -> Option<f64> {
        self.r_c_assisted.map(|c| c.value - self.r_q.value)
    }
}

pub fn rate_report(q: &RateQuery) -> Result<RateReport> {
    if q.nx < 1 || q.ny < 1 {
        return Err(Error::Config(format!("grid dimensions must be >= 1, got {}x{}", q.nx, q.ny)));
    }
    if q.asymptotic {
        return asymptotic_report(q);
    }
    use Provenance::*;
    let mut notes = Vec::new();
    let r_q = closed_form_bound(q.nx, q.ny, q.channel)?;
    let flow = multipath_bound(&build_grid(q.nx, q.ny, q.channel)?).per_receiver;
    if (flow - r_q).abs() > BOUND_AGREEMENT {
        notes.push(format!("max-flow bound {flow} differs from closed form {r_q}"));
    }

    let (r_c, r_c_assisted) = match q.channel {
        ChannelModel::Depolarizing(p) => {
            if q.ny == 1 {
                notes.push("no inter-node assisted strategy is defined for depolarizing edges".into());
                (Some(Valued::exact(rate_parallel_depol(q.nx, p, q.joint_input)?, BlahutArimoto)), None)
            } else {
                notes.push("classical rates for depolarizing edges are defined for single rows only".into());
                (None, None)
            }
        }
        ChannelModel::Identity if q.ny == 1 => (
            Some(Valued::exact(rate_parallel_depol(q.nx, 0.0, q.joint_input)?, BlahutArimoto)),
            Some(Valued::exact(rate_parallel_assisted(q.nx, 0.0)?, ClosedForm)),
        ),
        ChannelModel::Identity | ChannelModel::Erasure(_) => {
            let eps = q.channel.param();
            let r_c = Valued::exact(rate_grid(q.nx, q.ny, eps, q.exponent_mode)?, ClosedForm);
            let assisted = if q.ny == 1 {
                Valued::exact(rate_parallel_assisted(q.nx, eps)?, ClosedForm)
            } else {
                let net = build_grid(q.nx, q.ny, q.channel)?;
                let est = simulate(&net, Strategy::InterNodeCC, eps, q.trials, q.seed)?;
                Valued { value: est.mean, method: MonteCarlo, stderr: Some(est.stderr) }
            };
            (Some(r_c), Some(assisted))
        }
    };

    Ok(RateReport {
        r_q: Valued::exact(r_q, ClosedForm),
        r_q_max_flow: Some(Valued::exact(flow, MaxFlow)),
        r_c,
        r_c_assisted,
        notes,
    })
}

fn asymptotic_report(q: &RateQuery) -> Result<RateReport> {
    use Provenance::*;
    let r_q = Valued::exact(asymptotic_bound(q.channel), ClosedForm);
    let mut notes = vec!["large-nx limits".to_string()];
    let (r_c, r_c_assisted) = match q.channel {
        ChannelModel::Depolarizing(p) => {
            notes.push("no inter-node assisted strategy is defined for depolarizing edges".into());
            (Some(Valued::exact(rate_parallel_depol_limit(p)?, BlahutArimoto)), None)
        }
        ChannelModel::Identity | ChannelModel::Erasure(_) => {
            let lim = asymptotic_rates(q.channel.param())?;
            (Some(Valued::exact(lim.classical, ClosedForm)), Some(Valued::exact(lim.classical_assisted, ClosedForm)))
        }
    };
    Ok(RateReport { r_q, r_q_max_flow: None, r_c, r_c_assisted, notes })
}
