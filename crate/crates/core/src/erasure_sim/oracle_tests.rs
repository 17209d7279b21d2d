//! Exhaustive and Monte Carlo checks of the erasure strategies against the
//! closed-form rates.

use super::{deliverable_bits, exact_rate, sample_edges, simulate, trial_rng, Strategy};
use crate::erasure_rates::{
    rate_grid, rate_parallel, rate_parallel_assisted, rate_series, rate_series_sideonly, rate_single,
    rate_single_assisted, ExponentMode,
};
use crate::{build_grid, ChannelModel, Network};

const EPS: [f64; 5] = [0.05, 0.2, 0.37, 0.5, 0.9];

fn grid(nx: usize, ny: usize) -> Network {
    build_grid(nx, ny, ChannelModel::Erasure(0.0)).unwrap()
}

/// Assisted rate of the grid strategy, derived by hand. Columns keep their
/// bit independently through the upper layers (each upper bottleneck serves
/// only its left column), so with hold probabilities `h` the last layer is a
/// row of assisted blocks with unreliable inputs.
fn assisted_grid_oracle(nx: usize, ny: usize, e: f64) -> f64 {
    let s = 1.0 - e;
    let lam = 1.0 - e * (1.0 - s.powi(3));
    let mut h = vec![lam.powi(ny as i32 - 1); nx];
    h.push(s.powi(ny as i32 - 1));
    let mut total: f64 = h.iter().map(|hc| hc * s).sum();
    for j in 0..nx {
        let (hl, hr) = (h[j], h[j + 1]);
        total += 2.0 * hl * hr * s.powi(5);
        total += (1.0 - hl * s) * hr * s.powi(3) * (1.0 + e);
        total += (1.0 - hr * s) * hl * s.powi(3) * (1.0 + e);
    }
    total / (nx + 1) as f64
}

#[test]
fn single_block_enumeration() {
    let net = grid(1, 1);
    for e in EPS {
        let flood = exact_rate(&net, Strategy::FloodCoding, e).unwrap();
        let cc = exact_rate(&net, Strategy::InterNodeCC, e).unwrap();
        assert!((flood - rate_single(e).unwrap()).abs() < 1e-12, "ε={e}");
        assert!((cc - rate_single_assisted(e).unwrap()).abs() < 1e-12, "ε={e}");
    }
}

#[test]
fn parallel_row_enumeration() {
    for nx in [2, 3] {
        let net = grid(nx, 1);
        for e in [0.05, 0.2, 0.5] {
            let flood = exact_rate(&net, Strategy::FloodCoding, e).unwrap();
            let cc = exact_rate(&net, Strategy::InterNodeCC, e).unwrap();
            assert!((flood - rate_parallel(nx, e).unwrap()).abs() < 1e-12);
            assert!((cc - rate_parallel_assisted(nx, e).unwrap()).abs() < 1e-12);
        }
    }
}

#[test]
fn ladder_enumeration() {
    let net = grid(1, 2);
    for e in EPS {
        let backup = exact_rate(&net, Strategy::BackupNoCC, e).unwrap();
        let side = exact_rate(&net, Strategy::FloodCoding, e).unwrap();
        let cc = exact_rate(&net, Strategy::InterNodeCC, e).unwrap();
        assert!((backup - rate_series(2, e).unwrap()).abs() < 1e-12, "ε={e}");
        assert!((side - rate_series_sideonly(e).unwrap()).abs() < 1e-12, "ε={e}");
        assert!((cc - assisted_grid_oracle(1, 2, e)).abs() < 1e-12, "ε={e}");
    }
    let net = grid(1, 3);
    for e in [0.1, 0.4] {
        let backup = exact_rate(&net, Strategy::BackupNoCC, e).unwrap();
        assert!((backup - rate_series(3, e).unwrap()).abs() < 1e-12, "{backup} vs {}", rate_series(3, e).unwrap());
        let cc = exact_rate(&net, Strategy::InterNodeCC, e).unwrap();
        assert!((cc - assisted_grid_oracle(1, 3, e)).abs() < 1e-12, "{cc} vs {}", assisted_grid_oracle(1, 3, e));
    }
}

#[test]
fn oracle_reduces_to_row_formula() {
    for nx in 1..6 {
        for e in EPS {
            let v = assisted_grid_oracle(nx, 1, e);
            assert!((v - rate_parallel_assisted(nx, e).unwrap()).abs() < 1e-14);
        }
    }
}

#[test]
fn grid_simulation_matches_corrected_formula() {
    for (nx, ny) in [(2, 2), (3, 2), (2, 3)] {
        let net = grid(nx, ny);
        for e in [0.1, 0.3] {
            let est = simulate(&net, Strategy::BackupNoCC, e, 200_000, 11).unwrap();
            let formula = rate_grid(nx, ny, e, ExponentMode::NyCorrected).unwrap();
            assert!((est.mean - formula).abs() < 4.0 * est.stderr, "{nx}x{ny} ε={e}: {est:?} vs {formula}");
            let cc = simulate(&net, Strategy::InterNodeCC, e, 200_000, 11).unwrap();
            let oracle = assisted_grid_oracle(nx, ny, e);
            assert!((cc.mean - oracle).abs() < 4.0 * cc.stderr, "{nx}x{ny} ε={e}: {cc:?} vs {oracle}");
        }
    }
}

#[test]
fn counts_bounded_and_strategies_ordered() {
    for (nx, ny) in [(1, 1), (3, 1), (1, 3), (3, 3)] {
        let net = grid(nx, ny);
        let r = net.r() as u32;
        for t in 0..2_000 {
            let sample = sample_edges(&net, 0.35, &mut trial_rng(5, t)).unwrap();
            let flood = deliverable_bits(&net, &sample, Strategy::FloodCoding).unwrap();
            let backup = deliverable_bits(&net, &sample, Strategy::BackupNoCC).unwrap();
            let cc = deliverable_bits(&net, &sample, Strategy::InterNodeCC).unwrap();
            let total = |v: &[u32]| v.iter().sum::<u32>();
            assert!(total(&cc) <= 3 * r - 2);
            if nx == 1 {
                assert!(total(&cc) <= 2 * r);
            }
            assert!(total(&flood) <= total(&backup));
            assert!(total(&backup) <= total(&cc));
            for ((f, b), c) in flood.iter().zip(&backup).zip(&cc) {
                assert!(f <= b && b <= c);
            }
        }
    }
}
