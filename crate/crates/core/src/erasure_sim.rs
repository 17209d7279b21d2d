//! Monte Carlo and exhaustive evaluation of erasure butterfly grids.
//!
//! Each network use samples every edge independently (alive with
//! probability `1 - ε`), routes the senders' bits under a [`Strategy`] and
//! counts the bits each receiver can decode with certainty. Erasures are
//! flagged, so nodes always know which of their inputs failed.
//!
//! Side nodes only ever hold their own column's message. In every layer but
//! the last a block's bottleneck is either idle or backs up its left column;
//! the last layer performs XOR network coding at each top relay.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{check_prob, Error, Result};
use crate::topology::Network;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Strategy {
    /// Side chains only in upper layers; XOR coding in the last layer.
    FloodCoding,
    /// Every upper-layer bottleneck duplicates its left column's bit as a
    /// backup for the side edge. No side communication.
    BackupNoCC,
    /// `BackupNoCC` plus failure-triggered forwarding in the last layer:
    /// when exactly one input of a top relay is missing, the relay forwards
    /// the other bit uncoded and the bottom relay broadcasts it.
    InterNodeCC,
}

impl Strategy {
    fn uses_backup(self) -> bool {
        !matches!(self, Strategy::FloodCoding)
    }
}

/// Alive flag per edge, in the network's canonical edge order.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EdgeSample {
    pub alive: Vec<bool>,
}

/// Per-trial random stream: ChaCha8 keyed by `seed`, stream number `trial`.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

pub fn sample_edges<R: Rng + ?Sized>(net: &Network, eps: f64, rng: &mut R) -> Result<EdgeSample> {
    check_prob("epsilon", eps)?;
    let mut alive = vec![false; net.edges().len()];
    fill_sample(eps, rng, &mut alive);
    Ok(EdgeSample { alive })
}

fn fill_sample<R: Rng + ?Sized>(eps: f64, rng: &mut R, alive: &mut [bool]) {
    for a in alive.iter_mut() {
        *a = rng.gen::<f64>() >= eps;
    }
}

/// Bits each receiver decodes with certainty in one network use.
pub fn deliverable_bits(net: &Network, sample: &EdgeSample, strategy: Strategy) -> Result<Vec<u32>> {
    if sample.alive.len() != net.edges().len() {
        return Err(Error::SampleMismatch { expected: net.edges().len(), got: sample.alive.len() });
    }
    let mut scratch = Scratch::new(net);
    route(net, &sample.alive, strategy, &mut scratch);
    Ok(scratch.bits)
}

struct Scratch {
    held: Vec<bool>,
    next: Vec<bool>,
    direct: Vec<bool>,
    bits: Vec<u32>,
}

impl Scratch {
    fn new(net: &Network) -> Self {
        let r = net.r();
        Scratch { held: vec![true; r], next: vec![false; r], direct: vec![false; r], bits: vec![0; r] }
    }
}

fn route(net: &Network, alive: &[bool], strategy: Strategy, s: &mut Scratch) {
    let (nx, ny) = (net.nx(), net.ny());
    s.held.iter_mut().for_each(|h| *h = true);

    for k in 0..ny - 1 {
        for c in 0..=nx {
            s.next[c] = s.held[c] && alive[net.side_edge(k, c)];
        }
        if strategy.uses_backup() {
            for j in 0..nx {
                let b = net.block(k, j);
                if s.held[j] && alive[b.in_left] && alive[b.bottleneck] && alive[b.out_left] {
                    s.next[j] = true;
                }
            }
        }
        std::mem::swap(&mut s.held, &mut s.next);
    }

    let k = ny - 1;
    for c in 0..=nx {
        s.direct[c] = s.held[c] && alive[net.side_edge(k, c)];
        s.bits[c] = s.direct[c] as u32;
    }
    let forwarding = strategy == Strategy::InterNodeCC;
    for j in 0..nx {
        let b = net.block(k, j);
        if !alive[b.bottleneck] {
            continue;
        }
        let from_left = s.held[j] && alive[b.in_left];
        let from_right = s.held[j + 1] && alive[b.in_right];
        let (to_left, to_right) = (alive[b.out_left], alive[b.out_right]);
        match (from_left, from_right) {
            (true, true) => {
                // a parity is only useful next to the matching plaintext
                if to_left && s.direct[j] {
                    s.bits[j] += 1;
                }
                if to_right && s.direct[j + 1] {
                    s.bits[j + 1] += 1;
                }
            }
            (false, true) if forwarding => {
                if to_left {
                    s.bits[j] += 1;
                }
                if to_right && !s.direct[j + 1] {
                    s.bits[j + 1] += 1;
                }
            }
            (true, false) if forwarding => {
                if to_right {
                    s.bits[j + 1] += 1;
                }
                if to_left && !s.direct[j] {
                    s.bits[j] += 1;
                }
            }
            _ => {}
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RateEstimate {
    /// Bits per network use per receiver.
    pub mean: f64,
    pub stderr: f64,
    pub trials: u64,
    pub seed: u64,
}

const CHUNK: u64 = 4096;

/// Monte Carlo estimate of the per-receiver rate. Trial `i` draws from
/// [`trial_rng`]`(seed, i)`, and per-trial totals are integers summed
/// exactly, so the result does not depend on scheduling.
pub fn simulate(net: &Network, strategy: Strategy, eps: f64, trials: u64, seed: u64) -> Result<RateEstimate> {
    check_prob("epsilon", eps)?;
    if trials == 0 {
        return Err(Error::Config("trials must be >= 1".into()));
    }
    let base = ChaCha8Rng::seed_from_u64(seed);
    let n_chunks = trials.div_ceil(CHUNK);
    let (sum, sum_sq) = (0..n_chunks)
        .into_par_iter()
        .map(|chunk| {
            let mut scratch = Scratch::new(net);
            let mut alive = vec![false; net.edges().len()];
            let (mut sum, mut sum_sq) = (0u64, 0u64);
            for trial in chunk * CHUNK..((chunk + 1) * CHUNK).min(trials) {
                let mut rng = base.clone();
                rng.set_stream(trial);
                fill_sample(eps, &mut rng, &mut alive);
                route(net, &alive, strategy, &mut scratch);
                let total: u64 = scratch.bits.iter().map(|&b| b as u64).sum();
                sum += total;
                sum_sq += total * total;
            }
            (sum, sum_sq)
        })
        .reduce(|| (0, 0), |a, b| (a.0 + b.0, a.1 + b.1));

    let n = trials as f64;
    let r = net.r() as f64;
    let mean_total = sum as f64 / n;
    let var_total = if trials > 1 { ((sum_sq as f64 - sum as f64 * mean_total) / (n - 1.0)).max(0.0) } else { 0.0 };
    Ok(RateEstimate { mean: mean_total / r, stderr: (var_total / n).sqrt() / r, trials, seed })
}

/// Largest edge count [`exact_rate`] will enumerate.
pub const MAX_ENUMERATED_EDGES: usize = 24;

/// Exact expected per-receiver rate: every edge configuration weighted by
/// its probability.
pub fn exact_rate(net: &Network, strategy: Strategy, eps: f64) -> Result<f64> {
    check_prob("epsilon", eps)?;
    let m = net.edges().len();
    if m > MAX_ENUMERATED_EDGES {
        return Err(Error::Config(format!("{m} edges is too many to enumerate (limit {MAX_ENUMERATED_EDGES})")));
    }
    let s = 1.0 - eps;
    let mut scratch = Scratch::new(net);
    let mut alive = vec![false; m];
    // Neumaier summation; there can be millions of terms
    let (mut expected, mut carry) = (0.0f64, 0.0f64);
    for mask in 0u64..1 << m {
        let mut weight = 1.0;
        for (i, a) in alive.iter_mut().enumerate() {
            *a = mask >> i & 1 == 1;
            weight *= if *a { s } else { eps };
        }
        if weight == 0.0 {
            continue;
        }
        route(net, &alive, strategy, &mut scratch);
        let term = weight * scratch.bits.iter().sum::<u32>() as f64;
        let t = expected + term;
        if expected.abs() >= term.abs() {
            carry += (expected - t) + term;
        } else {
            carry += (term - t) + expected;
        }
        expected = t;
    }
    Ok((expected + carry) / net.r() as f64)
}

#[cfg(test)]
mod oracle_tests;
