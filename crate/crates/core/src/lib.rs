//! Classical vs quantum multicast rates in butterfly-block networks.
//!
//! Quantum side: min-cut flows of edge REE ([`quantum_bound`]). Classical
//! side: closed forms for erasure networks ([`erasure_rates`]), channel
//! capacities for depolarizing rows ([`depol_rates`]) and a Monte Carlo
//! simulator of the routing strategies ([`erasure_sim`]). [`analysis`]
//! locates the noise levels where the two sides cross.

// `!(x > 0.0)` style checks are there to reject NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod channel;
pub mod depol_rates;
pub mod dmc;
pub mod erasure_rates;
pub mod erasure_sim;
mod error;
pub mod fmt;
mod maxflow;
pub mod quantum_bound;
pub mod report;
pub mod topology;
pub mod verify;

pub use channel::{
    binary_entropy, classical_capacity_p2p, flip_convolve, ree_edge, ChannelKind, ChannelModel, FlipProb,
};
pub use dmc::{blahut_arimoto, CapacityResult, Dmc, InputDistribution};
pub use erasure_rates::{ExponentMode, LambdaValue};
pub use erasure_sim::{RateEstimate, Strategy};
pub use error::{Error, Result};
pub use quantum_bound::{closed_form_bound, multipath_bound, QuantumBoundResult};
pub use topology::{build_grid, cut_value, Cut, Network, NodeId, NodeRole};
