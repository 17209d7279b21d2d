//! Scalar information-theoretic primitives and the per-edge channel models.
//!
//! All entropies are base 2. Quantum quantities are in qubits per channel
//! use, classical ones in bits per channel use. Only qubit channels are
//! modelled.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{check_prob, Error, Result};

/// Binary Shannon entropy `H2(x)` in bits, with `0 log 0 = 0`.
pub fn binary_entropy(x: f64) -> Result<f64> {
    check_prob("x", x)?;
    Ok(h2(x))
}

/// Unchecked binary entropy for callers holding a validated probability.
pub(crate) fn h2(x: f64) -> f64 {
    if x <= 0.0 || x >= 1.0 {
        return 0.0;
    }
    -x * x.log2() - (1.0 - x) * (1.0 - x).log2()
}

/// Bit-flip probability of a binary symmetric channel.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
pub struct FlipProb(f64);

impl FlipProb {
    pub fn new(value: f64) -> Result<Self> {
        check_prob("flip probability", value).map(FlipProb)
    }

    pub fn value(self) -> f64 {
        self.0
    }

    /// Flip probability of the XOR of two independently flipped bits, which
    /// is also the flip probability of two BSCs in cascade.
    pub fn convolve(self, other: FlipProb) -> FlipProb {
        let (a, b) = (self.0, other.0);
        FlipProb(a * (1.0 - b) + b * (1.0 - a))
    }

    /// `n`-fold cascade of this channel. `n = 0` is the noiseless channel.
    pub fn cascade(self, n: usize) -> FlipProb {
        (0..n).fold(FlipProb(0.0), |acc, _| acc.convolve(self))
    }
}

/// Checked form of [`FlipProb::convolve`] on raw probabilities.
pub fn flip_convolve(a: f64, b: f64) -> Result<f64> {
    Ok(FlipProb::new(a)?.convolve(FlipProb::new(b)?).value())
}

/// Channel attached to a network edge.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "kind", content = "param", rename_all = "lowercase")]
pub enum ChannelModel {
    Identity,
    /// Qubit depolarizing channel with depolarizing probability `p`.
    Depolarizing(f64),
    /// Erasure channel with erasure probability `ε`.
    Erasure(f64),
}

impl ChannelModel {
    pub fn identity() -> Self {
        ChannelModel::Identity
    }

    pub fn depolarizing(p: f64) -> Result<Self> {
        check_prob("p", p).map(ChannelModel::Depolarizing)
    }

    pub fn erasure(eps: f64) -> Result<Self> {
        check_prob("epsilon", eps).map(ChannelModel::Erasure)
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            ChannelModel::Identity => "identity",
            ChannelModel::Depolarizing(_) => "depolarizing",
            ChannelModel::Erasure(_) => "erasure",
        }
    }

    /// Noise parameter; zero for the identity channel.
    pub fn param(&self) -> f64 {
        match *self {
            ChannelModel::Identity => 0.0,
            ChannelModel::Depolarizing(p) => p,
            ChannelModel::Erasure(e) => e,
        }
    }

    /// Relative entropy of entanglement of the channel's Choi state, which
    /// upper-bounds its two-way assisted quantum capacity.
    ///
    /// The depolarizing value `1 - H2(3p/4)` is only a valid bound up to
    /// `p = 2/3`; beyond that the capacity is zero.
    pub fn ree(&self) -> f64 {
        match *self {
            ChannelModel::Identity => 1.0,
            ChannelModel::Depolarizing(p) => {
                if p >= 2.0 / 3.0 {
                    0.0
                } else {
                    (1.0 - h2(0.75 * p)).max(0.0)
                }
            }
            ChannelModel::Erasure(e) => 1.0 - e,
        }
    }

    /// Unassisted classical capacity of a single use.
    pub fn classical_capacity(&self) -> f64 {
        match *self {
            ChannelModel::Identity => 1.0,
            ChannelModel::Depolarizing(p) => 1.0 - h2(0.5 * p),
            ChannelModel::Erasure(e) => 1.0 - e,
        }
    }

    /// Flip probability of the classical BSC a depolarizing channel induces
    /// on computational-basis inputs.
    pub fn bsc_flip(&self) -> Option<FlipProb> {
        match *self {
            ChannelModel::Identity => Some(FlipProb(0.0)),
            ChannelModel::Depolarizing(p) => Some(FlipProb(0.5 * p)),
            ChannelModel::Erasure(_) => None,
        }
    }
}

pub fn ree_edge(ch: ChannelModel) -> f64 {
    ch.ree()
}

pub fn classical_capacity_p2p(ch: ChannelModel) -> f64 {
    ch.classical_capacity()
}

/// Channel family without its parameter, for sweeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ChannelKind {
    Identity,
    Depolarizing,
    Erasure,
}

impl ChannelKind {
    /// The identity channel ignores `param`.
    pub fn with_param(self, param: f64) -> Result<ChannelModel> {
        match self {
            ChannelKind::Identity => Ok(ChannelModel::Identity),
            ChannelKind::Depolarizing => ChannelModel::depolarizing(param),
            ChannelKind::Erasure => ChannelModel::erasure(param),
        }
    }
}

impl fmt::Display for ChannelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ChannelKind::Identity => "identity",
            ChannelKind::Depolarizing => "depolarizing",
            ChannelKind::Erasure => "erasure",
        })
    }
}

impl FromStr for ChannelKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "identity" => Ok(ChannelKind::Identity),
            "depolarizing" => Ok(ChannelKind::Depolarizing),
            "erasure" => Ok(ChannelKind::Erasure),
            other => Err(Error::Config(format!("unknown channel '{other}'"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn entropy_examples() {
        assert_eq!(binary_entropy(0.5).unwrap(), 1.0);
        assert_eq!(binary_entropy(0.0).unwrap(), 0.0);
        assert_eq!(binary_entropy(1.0).unwrap(), 0.0);
        // -0.11 log2 0.11 - 0.89 log2 0.89, evaluated with mpmath at 30 digits
        assert_abs_diff_eq!(binary_entropy(0.11).unwrap(), 0.499915958164528, epsilon = 1e-12);
        assert!(binary_entropy(-0.1).is_err());
        assert!(binary_entropy(1.5).is_err());
        assert!(binary_entropy(f64::NAN).is_err());
    }

    #[test]
    fn convolve_examples() {
        assert_abs_diff_eq!(flip_convolve(0.0, 0.3).unwrap(), 0.3);
        assert_abs_diff_eq!(flip_convolve(0.5, 0.3).unwrap(), 0.5);
        assert_abs_diff_eq!(flip_convolve(0.1, 0.2).unwrap(), 0.26, epsilon = 1e-15);
        assert!(flip_convolve(0.1, 1.2).is_err());
    }

    #[test]
    fn ree_and_capacity_examples() {
        assert_eq!(ChannelModel::Depolarizing(0.0).ree(), 1.0);
        assert_eq!(ChannelModel::Depolarizing(2.0 / 3.0).ree(), 0.0);
        assert_eq!(ChannelModel::Depolarizing(0.9).ree(), 0.0);
        assert_abs_diff_eq!(ChannelModel::Erasure(0.25).ree(), 0.75);
        assert_eq!(ChannelModel::Depolarizing(0.0).classical_capacity(), 1.0);
        assert_eq!(ChannelModel::Depolarizing(1.0).classical_capacity(), 0.0);
        assert_abs_diff_eq!(ChannelModel::Erasure(0.3).classical_capacity(), 0.7);
        assert!(ChannelModel::erasure(1.01).is_err());
        assert!(ChannelModel::depolarizing(-0.01).is_err());
    }

    #[test]
    fn identity_matches_zero_noise() {
        for ch in [ChannelModel::Depolarizing(0.0), ChannelModel::Erasure(0.0)] {
            assert_eq!(ch.ree(), ChannelModel::Identity.ree());
            assert_eq!(ch.classical_capacity(), ChannelModel::Identity.classical_capacity());
        }
    }

    #[test]
    fn depolarizing_ree_below_classical_capacity() {
        for i in 0..=1000 {
            let ch = ChannelModel::Depolarizing(i as f64 / 1000.0);
            assert!(ch.ree() <= ch.classical_capacity() + 1e-15, "{ch:?}");
        }
    }

    #[test]
    fn cascade_closed_form() {
        for &q in &[0.0, 0.01, 0.1, 0.25, 0.4, 0.5] {
            for n in 0..12 {
                let folded = FlipProb(q).cascade(n).value();
                let closed = (1.0 - (1.0 - 2.0 * q).powi(n as i32)) / 2.0;
                assert_abs_diff_eq!(folded, closed, epsilon = 1e-10);
            }
        }
    }

    proptest! {
        #[test]
        fn entropy_symmetric(x in 0.0f64..=1.0) {
            prop_assert!((h2(x) - h2(1.0 - x)).abs() < 1e-12);
        }

        #[test]
        fn convolve_commutative_associative(a in 0.0f64..=1.0, b in 0.0f64..=1.0, c in 0.0f64..=1.0) {
            let (fa, fb, fc) = (FlipProb(a), FlipProb(b), FlipProb(c));
            prop_assert!((fa.convolve(fb).0 - fb.convolve(fa).0).abs() < 1e-12);
            let left = fa.convolve(fb).convolve(fc).0;
            let right = fa.convolve(fb.convolve(fc)).0;
            prop_assert!((left - right).abs() < 1e-12);
        }
    }
}
