//! Self-consistency suite: every closed form against an independent
//! computation of the same quantity.

use serde::Serialize;

use crate::analysis::{find_crossing, DEFAULT_BRACKET};
use crate::channel::{binary_entropy, ChannelModel};
use crate::depol_rates::{coded_flip, receiver_capacity, ReceiverArity};
use crate::dmc::{capacity, Dmc};
use crate::erasure_rates::{
    rate_grid, rate_parallel, rate_parallel_assisted, rate_series, rate_single, rate_single_assisted, ExponentMode,
};
use crate::erasure_sim::{exact_rate, simulate, Strategy};
use crate::error::Result;
use crate::quantum_bound::{closed_form_bound, multipath_bound};
use crate::report::DEFAULT_SEED;
use crate::topology::{build_grid, Network};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct VerifyOptions {
    /// Skip the slow simulation checks and shrink the max-flow range.
    pub quick: bool,
    pub seed: u64,
    /// Offset added to the unassisted single-block formula before it is
    /// compared; a negative control for the suite itself.
    pub perturb_single_rate: Option<f64>,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { quick: false, seed: DEFAULT_SEED, perturb_single_rate: None }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerifyReport {
    pub checks: Vec<CheckResult>,
}

impl VerifyReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn to_table(&self) -> String {
        let width = self.checks.iter().map(|c| c.name.len()).max().unwrap_or(0);
        let mut out = String::new();
        for c in &self.checks {
            let status = if c.passed { "PASS" } else { "FAIL" };
            out.push_str(&format!("{status}  {:<width$}  {}\n", c.name, c.detail));
        }
        out
    }
}

const FLOW_CHANNELS: [ChannelModel; 5] = [
    ChannelModel::Identity,
    ChannelModel::Depolarizing(0.1),
    ChannelModel::Depolarizing(0.4),
    ChannelModel::Erasure(0.1),
    ChannelModel::Erasure(0.5),
];
const ENUM_EPS: [f64; 3] = [0.05, 0.2, 0.5];

pub fn run_verify(opts: &VerifyOptions) -> VerifyReport {
    let offset = opts.perturb_single_rate.unwrap_or(0.0);
    let single = move |e: f64| rate_single(e).map(|v| v + offset);
    let max_dim = if opts.quick { 3 } else { 5 };

    let mut checks = vec![
        check("max-flow vs closed-form bound", || maxflow_check(max_dim)),
        check("blahut-arimoto vs BSC capacity", bsc_check),
        check("blahut-arimoto vs BEC capacity", bec_check),
        check("blahut-arimoto vs depolarizing receiver capacities", depol_check),
        check("enumeration vs single-block rates", || {
            let net = build_grid(1, 1, ChannelModel::Erasure(0.0))?;
            let mut worst: f64 = 0.0;
            for e in ENUM_EPS {
                worst = worst.max((exact_rate(&net, Strategy::FloodCoding, e)? - single(e)?).abs());
                worst = worst.max((exact_rate(&net, Strategy::InterNodeCC, e)? - rate_single_assisted(e)?).abs());
            }
            Ok(tolerance(worst, 1e-12))
        }),
        check("enumeration vs parallel-row rates", || {
            let net = build_grid(2, 1, ChannelModel::Erasure(0.0))?;
            let mut worst: f64 = 0.0;
            for e in ENUM_EPS {
                worst = worst.max((exact_rate(&net, Strategy::FloodCoding, e)? - rate_parallel(2, e)?).abs());
                worst = worst.max((exact_rate(&net, Strategy::InterNodeCC, e)? - rate_parallel_assisted(2, e)?).abs());
            }
            Ok(tolerance(worst, 1e-12))
        }),
        check("enumeration vs ladder rate", || {
            let net = build_grid(1, 2, ChannelModel::Erasure(0.0))?;
            let mut worst: f64 = 0.0;
            for e in ENUM_EPS {
                worst = worst.max((exact_rate(&net, Strategy::BackupNoCC, e)? - rate_series(2, e)?).abs());
            }
            Ok(tolerance(worst, 1e-12))
        }),
        check("crossing eta", || {
            let bound = |e: f64| closed_form_bound(1, 1, ChannelModel::erasure(e)?);
            let c = find_crossing(single, bound, DEFAULT_BRACKET.0, DEFAULT_BRACKET.1, 1e-6)?;
            Ok((in_range(c.value, 0.1585, 0.1595), format!("{:.5} in [0.1585, 0.1595]", c.value)))
        }),
        check("crossing eta'", || {
            let bound = |e: f64| closed_form_bound(1, 1, ChannelModel::erasure(e)?);
            let c = find_crossing(rate_single_assisted, bound, DEFAULT_BRACKET.0, DEFAULT_BRACKET.1, 1e-6)?;
            Ok((in_range(c.value, 0.2435, 0.2445), format!("{:.5} in [0.2435, 0.2445]", c.value)))
        }),
        check("grid formula adjudication", || {
            let a = adjudicate_exponent_mode(&[(2, 2), (3, 2)], &[0.1, 0.3], 1_000_000, opts.seed)?;
            Ok((a.selected.is_some(), a.summary()))
        }),
    ];
    if !opts.quick {
        checks.push(check("simulation vs closed-form rates", || mc_check(opts.seed, single)));
    }
    VerifyReport { checks }
}

fn check(name: &str, f: impl FnOnce() -> Result<(bool, String)>) -> CheckResult {
    let (passed, detail) = match f() {
        Ok(v) => v,
        Err(e) => (false, format!("error: {e}")),
    };
    CheckResult { name: name.to_string(), passed, detail }
}

fn tolerance(worst: f64, tol: f64) -> (bool, String) {
    (worst <= tol, format!("max deviation {worst:.2e} (tol {tol:.0e})"))
}

fn in_range(x: f64, lo: f64, hi: f64) -> bool {
    (lo..=hi).contains(&x)
}

fn maxflow_check(max_dim: usize) -> Result<(bool, String)> {
    let mut worst: f64 = 0.0;
    for nx in 1..=max_dim {
        for ny in 1..=max_dim {
            let base = build_grid(nx, ny, ChannelModel::Identity)?;
            for ch in FLOW_CHANNELS {
                let flow = multipath_bound(&base.with_channel(ch)).per_receiver;
                let expected = (2 * nx + 1) as f64 / (nx + 1) as f64 * ch.ree();
                worst = worst.max((flow - expected).abs());
            }
        }
    }
    let (ok, detail) = tolerance(worst, 1e-9);
    Ok((ok, format!("{detail} over {max_dim}x{max_dim} shapes")))
}

fn bsc_check() -> Result<(bool, String)> {
    let mut worst: f64 = 0.0;
    for q in [0.01, 0.11, 0.3, 0.5] {
        worst = worst.max((capacity(&Dmc::bsc(q)?)?.capacity - (1.0 - binary_entropy(q)?)).abs());
    }
    Ok(tolerance(worst, 1e-6))
}

fn bec_check() -> Result<(bool, String)> {
    let mut worst: f64 = 0.0;
    for e in [0.1, 0.3, 0.7] {
        worst = worst.max((capacity(&Dmc::bec(e)?)?.capacity - (1.0 - e)).abs());
    }
    Ok(tolerance(worst, 1e-6))
}

/// The receiver channels are products of independent BSCs, so their
/// capacities are sums of BSC capacities.
fn depol_check() -> Result<(bool, String)> {
    let mut worst: f64 = 0.0;
    for p in [0.0, 0.05, 0.2, 0.5, 0.9, 1.0] {
        let hq = binary_entropy(p / 2.0)?;
        let hf = binary_entropy(coded_flip(p)?.value())?;
        let end = receiver_capacity(ReceiverArity::End, p)?.capacity;
        let inner = receiver_capacity(ReceiverArity::Inner, p)?.capacity;
        worst = worst.max((end - (2.0 - hq - hf)).abs());
        worst = worst.max((inner - (3.0 - hq - 2.0 * hf)).abs());
    }
    Ok(tolerance(worst, 1e-6))
}

fn mc_check(seed: u64, single: impl Fn(f64) -> Result<f64>) -> Result<(bool, String)> {
    const TRIALS: u64 = 200_000;
    let grid = |nx, ny| build_grid(nx, ny, ChannelModel::Erasure(0.0));
    type Formula<'a> = Box<dyn Fn(f64) -> Result<f64> + 'a>;
    let cases: Vec<(Network, Strategy, Formula)> = vec![
        (grid(1, 1)?, Strategy::FloodCoding, Box::new(single)),
        (grid(1, 1)?, Strategy::InterNodeCC, Box::new(rate_single_assisted)),
        (grid(3, 1)?, Strategy::FloodCoding, Box::new(|e| rate_parallel(3, e))),
        (grid(3, 1)?, Strategy::InterNodeCC, Box::new(|e| rate_parallel_assisted(3, e))),
        (grid(1, 2)?, Strategy::BackupNoCC, Box::new(|e| rate_series(2, e))),
        (grid(1, 3)?, Strategy::BackupNoCC, Box::new(|e| rate_series(3, e))),
    ];
    let mut worst_z: f64 = 0.0;
    for (net, strategy, formula) in &cases {
        for e in ENUM_EPS {
            let est = simulate(net, *strategy, e, TRIALS, seed)?;
            worst_z = worst_z.max(z_score(est.mean, formula(e)?, est.stderr));
        }
    }
    Ok((worst_z < 4.0, format!("max |z| {worst_z:.2} over {} cases (limit 4)", cases.len() * ENUM_EPS.len())))
}

fn z_score(estimate: f64, expected: f64, stderr: f64) -> f64 {
    let d = (estimate - expected).abs();
    if stderr > 0.0 {
        d / stderr
    } else if d < 1e-12 {
        0.0
    } else {
        f64::INFINITY
    }
}

/// Agreement below this many standard errors counts as consistent.
pub const CONSISTENT_Z: f64 = 4.0;
/// Disagreement beyond this many standard errors counts as a rejection.
pub const REJECT_Z: f64 = 6.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ModeVerdict {
    pub mode: ExponentMode,
    /// Largest `|simulated - formula| / stderr` over the tested points.
    pub max_z: f64,
    pub consistent: bool,
    pub rejected: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Adjudication {
    pub verdicts: Vec<ModeVerdict>,
    /// The single consistent mode, when every other mode is rejected.
    pub selected: Option<ExponentMode>,
}

impl Adjudication {
    pub fn summary(&self) -> String {
        let parts: Vec<String> = self
            .verdicts
            .iter()
            .map(|v| {
                let word = if v.consistent {
                    "consistent"
                } else if v.rejected {
                    "rejected"
                } else {
                    "inconclusive"
                };
                format!("{} {word} (max |z| {:.2})", v.mode, v.max_z)
            })
            .collect();
        parts.join("; ")
    }
}

/// Simulates the unassisted grid strategy and asks which exponent mode of
/// the grid formula it agrees with.
pub fn adjudicate_exponent_mode(
    shapes: &[(usize, usize)],
    eps: &[f64],
    trials: u64,
    seed: u64,
) -> Result<Adjudication> {
    let mut max_z = [0.0f64; 2];
    for &(nx, ny) in shapes {
        let net = build_grid(nx, ny, ChannelModel::Erasure(0.0))?;
        for &e in eps {
            let est = simulate(&net, Strategy::BackupNoCC, e, trials, seed)?;
            for (slot, mode) in max_z.iter_mut().zip(ExponentMode::ALL) {
                *slot = slot.max(z_score(est.mean, rate_grid(nx, ny, e, mode)?, est.stderr));
            }
        }
    }
    let verdicts: Vec<ModeVerdict> = ExponentMode::ALL
        .iter()
        .zip(max_z)
        .map(|(&mode, z)| ModeVerdict { mode, max_z: z, consistent: z < CONSISTENT_Z, rejected: z > REJECT_Z })
        .collect();
    let consistent: Vec<&ModeVerdict> = verdicts.iter().filter(|v| v.consistent).collect();
    let selected = match consistent.as_slice() {
        [only] if verdicts.iter().all(|v| v.mode == only.mode || v.rejected) => Some(only.mode),
        _ => None,
    };
    Ok(Adjudication { verdicts, selected })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quick_suite_passes() {
        let rep = run_verify(&VerifyOptions { quick: true, ..Default::default() });
        assert!(rep.all_passed(), "{}", rep.to_table());
    }

    #[test]
    fn perturbation_is_caught() {
        let rep = run_verify(&VerifyOptions { quick: true, perturb_single_rate: Some(1e-3), ..Default::default() });
        assert!(!rep.all_passed());
        let failed: Vec<&str> = rep.checks.iter().filter(|c| !c.passed).map(|c| c.name.as_str()).collect();
        assert!(failed.contains(&"enumeration vs single-block rates"), "{failed:?}");
    }

    #[test]
    fn adjudication_picks_corrected_mode() {
        let a = adjudicate_exponent_mode(&[(2, 2), (3, 2)], &[0.1, 0.3], 1_000_000, DEFAULT_SEED).unwrap();
        assert_eq!(a.selected, Some(ExponentMode::NyCorrected), "{}", a.summary());
    }

    #[test]
    fn table_has_one_line_per_check() {
        let rep = VerifyReport {
            checks: vec![
                CheckResult { name: "a".into(), passed: true, detail: "x".into() },
                CheckResult { name: "bb".into(), passed: false, detail: "y".into() },
            ],
        };
        assert_eq!(rep.to_table(), "PASS  a   x\nFAIL  bb  y\n");
    }
}
