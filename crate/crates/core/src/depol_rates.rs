//! Classical rates of depolarizing butterfly rows via channel capacity.
//!
//! Every depolarizing edge acts on classical bits as a BSC with flip
//! probability `q = p/2`. A receiver sees its own sender's bit over one
//! side edge (flip `q`) and, from each adjacent block, the XOR of the two
//! block inputs after four hops: two sender legs combined at the top relay,
//! the bottleneck and the bottom-relay leg. The coded flip is therefore
//! `f = q ⋆ q ⋆ q ⋆ q`.

use serde::Serialize;

use crate::channel::{ChannelModel, FlipProb};
use crate::dmc::{capacity, mutual_info_raw, CapacityResult, Dmc};
use crate::error::{check_prob, Error, Result};

/// Which receiver of a row a channel describes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ReceiverArity {
    /// `A_i, A_{i+1} -> B_i` at either end of the row.
    End,
    /// `A_i, A_{i+1}, A_{i+2} -> B_{i+1}` in the interior.
    Inner,
}

impl ReceiverArity {
    fn n_bits(self) -> usize {
        match self {
            ReceiverArity::End => 2,
            ReceiverArity::Inner => 3,
        }
    }
}

/// How the receiver's output symbol is written down.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputLabeling {
    /// `(direct, parity...)` as received.
    Raw,
    /// `(direct, direct ⊕ parity...)`, i.e. after XOR decoding.
    Decoded,
}

/// Flip probability of a coded bit after the four-hop path.
pub fn coded_flip(p: f64) -> Result<FlipProb> {
    let q = ChannelModel::depolarizing(p)?.bsc_flip().unwrap();
    Ok(q.cascade(4))
}

pub fn build_receiver_dmc(arity: ReceiverArity, p: f64) -> Result<Dmc> {
    build_receiver_dmc_labeled(arity, p, OutputLabeling::Raw)
}

/// Input bit order: End `(own, neighbour)`, Inner `(left, own, right)`,
/// most significant first. Output bits: direct then the parities.
pub fn build_receiver_dmc_labeled(arity: ReceiverArity, p: f64, labeling: OutputLabeling) -> Result<Dmc> {
    check_prob("p", p)?;
    let q = p / 2.0;
    let f = coded_flip(p)?.value();
    let n = arity.n_bits();
    let size = 1usize << n;
    let bit = |x: usize, i: usize| (x >> (n - 1 - i)) & 1;

    // noiseless outputs and their flip probabilities
    let clean = |x: usize| -> Vec<usize> {
        match arity {
            ReceiverArity::End => vec![bit(x, 0), bit(x, 0) ^ bit(x, 1)],
            ReceiverArity::Inner => {
                vec![bit(x, 1), bit(x, 0) ^ bit(x, 1), bit(x, 1) ^ bit(x, 2)]
            }
        }
    };
    let flips: Vec<f64> = std::iter::once(q).chain(std::iter::repeat_n(f, n - 1)).collect();

    let rows = (0..size)
        .map(|x| {
            let c = clean(x);
            let mut row = vec![0.0; size];
            for (y, slot) in row.iter_mut().enumerate() {
                let raw: Vec<usize> = (0..n).map(|i| bit(y, i)).collect();
                *slot =
                    raw.iter().zip(&c).zip(&flips).map(|((r, c), fl)| if r == c { 1.0 - fl } else { *fl }).product();
            }
            match labeling {
                OutputLabeling::Raw => row,
                OutputLabeling::Decoded => {
                    let mut out = vec![0.0; size];
                    for (y, v) in row.into_iter().enumerate() {
                        let d = bit(y, 0);
                        let mut z = d;
                        for i in 1..n {
                            z = (z << 1) | (bit(y, i) ^ d);
                        }
                        out[z] = v;
                    }
                    out
                }
            }
        })
        .collect();
    Dmc::new(rows)
}

pub fn receiver_capacity(arity: ReceiverArity, p: f64) -> Result<CapacityResult> {
    capacity(&build_receiver_dmc(arity, p)?)
}

/// Achievable rate per receiver of a depolarizing row of `nx` blocks.
///
/// By default each receiver's channel capacity is computed on its own and
/// the two end channels and `nx - 1` inner channels are averaged. With
/// `joint_mode` one product distribution over the `nx + 1` sender bits is
/// optimised for the sum of all receivers' mutual informations instead.
pub fn rate_parallel_depol(nx: usize, p: f64, joint_mode: bool) -> Result<f64> {
    if nx < 1 {
        return Err(Error::Config(format!("nx must be >= 1, got {nx}")));
    }
    check_prob("p", p)?;
    if joint_mode {
        return joint_rate(nx, p);
    }
    let end = receiver_capacity(ReceiverArity::End, p)?.capacity;
    let inner = if nx > 1 { receiver_capacity(ReceiverArity::Inner, p)?.capacity } else { 0.0 };
    Ok((2.0 * end + (nx - 1) as f64 * inner) / (nx + 1) as f64)
}

/// Large-`nx` limit of [`rate_parallel_depol`]: the inner-channel capacity.
pub fn rate_parallel_depol_limit(p: f64) -> Result<f64> {
    Ok(receiver_capacity(ReceiverArity::Inner, p)?.capacity)
}

fn joint_rate(nx: usize, p: f64) -> Result<f64> {
    let r = nx + 1;
    let end = build_receiver_dmc(ReceiverArity::End, p)?;
    let inner = build_receiver_dmc(ReceiverArity::Inner, p)?;

    // receiver c sees sender bits `locals[c]` in the channel's input order
    let locals: Vec<Vec<usize>> = (0..r)
        .map(|c| {
            if c == 0 {
                vec![0, 1]
            } else if c == r - 1 {
                vec![c, c - 1]
            } else {
                vec![c - 1, c, c + 1]
            }
        })
        .collect();

    let objective = |pi: &[f64]| -> f64 {
        locals
            .iter()
            .map(|bits| {
                let dmc = if bits.len() == 2 { &end } else { &inner };
                let n = bits.len();
                let dist: Vec<f64> = (0..1usize << n)
                    .map(|x| {
                        (0..n)
                            .map(|i| {
                                let one = pi[bits[i]];
                                if (x >> (n - 1 - i)) & 1 == 1 {
                                    one
                                } else {
                                    1.0 - one
                                }
                            })
                            .product()
                    })
                    .collect();
                mutual_info_raw(dmc, &dist)
            })
            .sum()
    };

    let mut pi = vec![0.5; r];
    let mut value = objective(&pi);
    for _sweep in 0..200 {
        let before = value;
        for c in 0..r {
            let mut trial = pi.clone();
            let best = golden_max(0.0, 1.0, 1e-10, |v| {
                trial[c] = v;
                objective(&trial)
            });
            trial[c] = best;
            let candidate = objective(&trial);
            if candidate > value {
                value = candidate;
                pi = trial;
            }
        }
        if value - before < 1e-12 {
            break;
        }
    }
    Ok(value / r as f64)
}

fn golden_max(mut lo: f64, mut hi: f64, tol: f64, mut f: impl FnMut(f64) -> f64) -> f64 {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut a = hi - g * (hi - lo);
    let mut b = lo + g * (hi - lo);
    let (mut fa, mut fb) = (f(a), f(b));
    while hi - lo > tol {
        if fa < fb {
            lo = a;
            a = b;
            fa = fb;
            b = lo + g * (hi - lo);
            fb = f(b);
        } else {
            hi = b;
            b = a;
            fb = fa;
            a = hi - g * (hi - lo);
            fa = f(a);
        }
    }
    (lo + hi) / 2.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::h2;
    use approx::assert_abs_diff_eq;

    // The inputs map bijectively onto independent BSC inputs (own bit and the
    // parities), so the capacities are sums of BSC capacities.
    fn end_closed(p: f64) -> f64 {
        let f = (1.0 - (1.0 - p).powi(4)) / 2.0;
        2.0 - h2(p / 2.0) - h2(f)
    }

    fn inner_closed(p: f64) -> f64 {
        let f = (1.0 - (1.0 - p).powi(4)) / 2.0;
        3.0 - h2(p / 2.0) - 2.0 * h2(f)
    }

    #[test]
    fn noiseless_end_is_permutation() {
        let dmc = build_receiver_dmc(ReceiverArity::End, 0.0).unwrap();
        for x in 0..4 {
            let (a1, a2) = (x >> 1, x & 1);
            let y = (a1 << 1) | (a1 ^ a2);
            assert_eq!(dmc.prob(x, y), 1.0);
        }
        assert_abs_diff_eq!(receiver_capacity(ReceiverArity::End, 0.0).unwrap().capacity, 2.0, epsilon = 1e-12);
    }

    #[test]
    fn fully_depolarized_rows_uniform() {
        for arity in [ReceiverArity::End, ReceiverArity::Inner] {
            let dmc = build_receiver_dmc(arity, 1.0).unwrap();
            let n = dmc.n_outputs() as f64;
            for x in 0..dmc.n_inputs() {
                assert!(dmc.row(x).iter().all(|&v| (v - 1.0 / n).abs() < 1e-15));
            }
        }
    }

    #[test]
    fn coded_flip_example() {
        assert_abs_diff_eq!(coded_flip(0.2).unwrap().value(), 0.2952, epsilon = 1e-12);
        let dmc = build_receiver_dmc(ReceiverArity::End, 0.2).unwrap();
        // input (0,0): direct 0 w.p. 0.9, parity 0 w.p. 1 - f
        assert_abs_diff_eq!(dmc.prob(0, 0), 0.9 * (1.0 - 0.2952), epsilon = 1e-12);
        assert!(build_receiver_dmc(ReceiverArity::End, 1.5).is_err());
    }

    #[test]
    fn capacities_match_bsc_sums() {
        for i in 0..=20 {
            let p = i as f64 / 20.0;
            let e = receiver_capacity(ReceiverArity::End, p).unwrap();
            let n = receiver_capacity(ReceiverArity::Inner, p).unwrap();
            assert_abs_diff_eq!(e.capacity, end_closed(p), epsilon = 1e-8);
            assert_abs_diff_eq!(n.capacity, inner_closed(p), epsilon = 1e-8);
            assert!(e.capacity <= 2.0 + 1e-12 && n.capacity <= 3.0 + 1e-12);
            if p > 0.0 {
                assert!(e.capacity < 2.0 && n.capacity < 3.0);
            }
            for &pr in e.dist.probs() {
                assert_abs_diff_eq!(pr, 0.25, epsilon = 1e-4);
            }
        }
    }

    #[test]
    fn labeling_invariance() {
        for &p in &[0.05, 0.2, 0.5, 0.9] {
            for arity in [ReceiverArity::End, ReceiverArity::Inner] {
                let raw = capacity(&build_receiver_dmc_labeled(arity, p, OutputLabeling::Raw).unwrap()).unwrap();
                let dec = capacity(&build_receiver_dmc_labeled(arity, p, OutputLabeling::Decoded).unwrap()).unwrap();
                assert_abs_diff_eq!(raw.capacity, dec.capacity, epsilon = 1e-9);
            }
        }
    }

    #[test]
    fn capacity_non_increasing_in_p() {
        let mut prev = (f64::INFINITY, f64::INFINITY);
        for i in 0..=50 {
            let p = i as f64 / 50.0;
            let e = receiver_capacity(ReceiverArity::End, p).unwrap().capacity;
            let n = receiver_capacity(ReceiverArity::Inner, p).unwrap().capacity;
            assert!(e <= prev.0 + 1e-9 && n <= prev.1 + 1e-9);
            prev = (e, n);
        }
    }

    #[test]
    fn parallel_rates() {
        assert_abs_diff_eq!(rate_parallel_depol(1, 0.0, false).unwrap(), 2.0, epsilon = 1e-9);
        let p = 0.3;
        let expected = (2.0 * end_closed(p) + 2.0 * inner_closed(p)) / 4.0;
        assert_abs_diff_eq!(rate_parallel_depol(3, p, false).unwrap(), expected, epsilon = 1e-8);
        let far = rate_parallel_depol(10_000, p, false).unwrap();
        assert_abs_diff_eq!(far, rate_parallel_depol_limit(p).unwrap(), epsilon = 1e-3);
        assert!(rate_parallel_depol(0, p, false).is_err());
    }

    #[test]
    fn joint_mode_bounded_by_independent_sum() {
        for &p in &[0.0, 0.1, 0.4] {
            for nx in 1..=3 {
                let indep = rate_parallel_depol(nx, p, false).unwrap();
                let joint = rate_parallel_depol(nx, p, true).unwrap();
                assert!(joint <= indep + 1e-9, "nx={nx} p={p}: {joint} > {indep}");
                assert!(joint > 0.0);
            }
        }
    }
}
