//! Crossing points, gap sweeps and the `η′` landscape over grid shapes.

use rayon::prelude::*;
use serde::Serialize;

use crate::channel::{ChannelKind, ChannelModel};
use crate::depol_rates::{rate_parallel_depol, rate_parallel_depol_limit};
use crate::erasure_rates::{
    asymptotic_rates, rate_grid, rate_parallel_assisted, rate_single, rate_single_assisted, ExponentMode,
};
use crate::erasure_sim::{simulate, Strategy};
use crate::error::{Error, Result};
use crate::fmt::sig12;
use crate::quantum_bound::{asymptotic_bound, closed_form_bound};
use crate::report::{Provenance, DEFAULT_SEED, DEFAULT_TRIALS};
use crate::topology::build_grid;

/// Bisection tolerance for closed-form crossings.
pub const CLOSED_FORM_TOL: f64 = 1e-4;
/// Bisection tolerance for simulated crossings.
pub const MONTE_CARLO_TOL: f64 = 1e-4;
/// Default search interval for crossings in the noise parameter.
pub const DEFAULT_BRACKET: (f64, f64) = (1e-3, 0.6);

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CrossingPoint {
    /// Midpoint of the final bracket.
    pub value: f64,
    /// Final bracket; `rate - bound` changes sign across it.
    pub bracket: (f64, f64),
    pub achieved_gap_sign_change: bool,
    /// Uncertainty of `value`: half the bracket, plus simulation noise
    /// propagated through the local slope for simulated rates.
    pub error_bar: f64,
    pub evaluations: usize,
}

/// Bisection on `rate_fn - bound_fn` over `[lo, hi]` until the bracket is no
/// wider than `tol`.
pub fn find_crossing<R, B>(mut rate_fn: R, mut bound_fn: B, lo: f64, hi: f64, tol: f64) -> Result<CrossingPoint>
where
    R: FnMut(f64) -> Result<f64>,
    B: FnMut(f64) -> Result<f64>,
{
    if !(lo < hi) || !(tol > 0.0) {
        return Err(Error::Config(format!("bad bracket [{lo}, {hi}] or tolerance {tol}")));
    }
    let mut gap = |x: f64| -> Result<f64> { Ok(rate_fn(x)? - bound_fn(x)?) };
    let (mut a, mut b) = (lo, hi);
    let (f_lo, f_hi) = (gap(a)?, gap(b)?);
    let mut evaluations = 2;
    if !(f_lo * f_hi < 0.0) {
        return Err(Error::NoSignChange { lo, hi, f_lo, f_hi });
    }
    let mut fa = f_lo;
    while b - a > tol {
        let mid = 0.5 * (a + b);
        let fm = gap(mid)?;
        evaluations += 1;
        if fm == 0.0 {
            a = mid;
            b = mid;
            break;
        }
        if (fm < 0.0) == (fa < 0.0) {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    Ok(CrossingPoint {
        value: 0.5 * (a + b),
        bracket: (a, b),
        achieved_gap_sign_change: true,
        error_bar: 0.5 * (b - a),
        evaluations,
    })
}

/// Noise level where the unassisted single-block rate meets the bound.
pub fn eta(tol: f64) -> Result<CrossingPoint> {
    let (lo, hi) = DEFAULT_BRACKET;
    find_crossing(rate_single, |e| closed_form_bound(1, 1, ChannelModel::erasure(e)?), lo, hi, tol)
}

/// Noise level where the assisted single-block rate meets the bound.
pub fn eta_prime(tol: f64) -> Result<CrossingPoint> {
    let (lo, hi) = DEFAULT_BRACKET;
    find_crossing(rate_single_assisted, |e| closed_form_bound(1, 1, ChannelModel::erasure(e)?), lo, hi, tol)
}

/// Evenly spaced values `lo, lo + step, ...` not exceeding `hi`.
pub fn param_grid(lo: f64, hi: f64, step: f64) -> Result<Vec<f64>> {
    if !(step > 0.0) || !(lo <= hi) || !lo.is_finite() || !hi.is_finite() {
        return Err(Error::Config(format!("empty parameter range {lo}:{hi}:{step}")));
    }
    let n = ((hi - lo) / step + 1e-9).floor() as usize;
    Ok((0..=n).map(|i| (lo + i as f64 * step).min(hi)).collect())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepConfig {
    pub channel: ChannelKind,
    pub nx: usize,
    pub ny: usize,
    pub asymptotic: bool,
    pub joint_input: bool,
    pub exponent_mode: ExponentMode,
    /// Trials per row where the assisted grid rate has to be simulated.
    pub trials: u64,
    pub seed: u64,
}

impl SweepConfig {
    pub fn new(channel: ChannelKind, nx: usize, ny: usize) -> Self {
        SweepConfig {
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

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SweepRow {
    pub param: f64,
    pub r_q: f64,
    pub r_c: Option<f64>,
    pub r_c_assisted: Option<f64>,
    pub gap: Option<f64>,
    pub gap_assisted: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepTable {
    pub rows: Vec<SweepRow>,
}

pub const SWEEP_HEADER: &str = "param,R_Q,R_C,R_C_assisted,gap,gap_assisted";

impl SweepTable {
    /// CSV with one `#` comment line per entry of `comments`. Undefined
    /// rates are empty fields.
    pub fn to_csv(&self, comments: &[String]) -> String {
        let mut out = String::new();
        for c in comments {
            out.push_str("# ");
            out.push_str(c);
            out.push('\n');
        }
        out.push_str(SWEEP_HEADER);
        out.push('\n');
        let opt = |v: Option<f64>| v.map(sig12).unwrap_or_default();
        for r in &self.rows {
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                sig12(r.param),
                sig12(r.r_q),
                opt(r.r_c),
                opt(r.r_c_assisted),
                opt(r.gap),
                opt(r.gap_assisted)
            ));
        }
        out
    }

    /// Largest `gap` and the parameter where it occurs.
    pub fn max_gap(&self) -> Option<(f64, f64)> {
        self.rows.iter().filter_map(|r| r.gap.map(|g| (r.param, g))).fold(None, |best, (p, g)| match best {
            Some((_, bg)) if bg >= g => best,
            _ => Some((p, g)),
        })
    }
}

pub fn gap_sweep(config: &SweepConfig, grid: &[f64]) -> Result<SweepTable> {
    if grid.is_empty() {
        return Err(Error::Config("parameter grid is empty".into()));
    }
    if grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::Config("parameter grid must be strictly increasing".into()));
    }
    if config.nx < 1 || config.ny < 1 {
        return Err(Error::Config(format!("grid dimensions must be >= 1, got {}x{}", config.nx, config.ny)));
    }
    let rows = grid.par_iter().map(|&x| sweep_row(config, x)).collect::<Result<Vec<_>>>()?;
    Ok(SweepTable { rows })
}

fn sweep_row(cfg: &SweepConfig, x: f64) -> Result<SweepRow> {
    let ch = cfg.channel.with_param(x)?;
    let (r_q, r_c, r_c_assisted) = match (ch, cfg.asymptotic) {
        (ChannelModel::Depolarizing(p), true) => (asymptotic_bound(ch), Some(rate_parallel_depol_limit(p)?), None),
        (ChannelModel::Depolarizing(p), false) => {
            let r_c = if cfg.ny == 1 { Some(rate_parallel_depol(cfg.nx, p, cfg.joint_input)?) } else { None };
            (closed_form_bound(cfg.nx, cfg.ny, ch)?, r_c, None)
        }
        (_, true) => {
            let lim = asymptotic_rates(ch.param())?;
            (lim.quantum_bound, Some(lim.classical), Some(lim.classical_assisted))
        }
        (_, false) => {
            let eps = ch.param();
            let assisted = if cfg.ny == 1 {
                rate_parallel_assisted(cfg.nx, eps)?
            } else {
                let net = build_grid(cfg.nx, cfg.ny, ch)?;
                simulate(&net, Strategy::InterNodeCC, eps, cfg.trials, cfg.seed)?.mean
            };
            (
                closed_form_bound(cfg.nx, cfg.ny, ch)?,
                Some(rate_grid(cfg.nx, cfg.ny, eps, cfg.exponent_mode)?),
                Some(assisted),
            )
        }
    };
    Ok(SweepRow {
        param: x,
        r_q,
        r_c,
        r_c_assisted,
        gap: r_c.map(|c| c - r_q),
        gap_assisted: r_c_assisted.map(|c| c - r_q),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MinGapRow {
    pub nx: usize,
    /// Minimum over the `p` grid of `R_C - R_Q` for a depolarizing row.
    pub depol_min_gap: f64,
    pub depol_argmin: f64,
    /// Erasure `R̃_C - R_Q` at `ε = 0`.
    pub erasure_assisted_gap_at_zero: f64,
    /// Erasure `R̃_C - R_Q` at `ε = η′/2`.
    pub erasure_assisted_gap_at_half_eta_prime: f64,
    /// Erasure `R_C - R_Q` at `ε = η/2`.
    pub erasure_gap_at_half_eta: f64,
}

/// Per-`nx` minimum depolarizing gap and the fixed-noise erasure gaps.
pub fn min_gap_vs_nx(p_grid: &[f64], nx_list: &[usize]) -> Result<Vec<MinGapRow>> {
    if p_grid.is_empty() || nx_list.is_empty() {
        return Err(Error::Config("p grid and nx list must be non-empty".into()));
    }
    let half_eta = 0.5 * eta(CLOSED_FORM_TOL * 1e-4)?.value;
    let half_eta_prime = 0.5 * eta_prime(CLOSED_FORM_TOL * 1e-4)?.value;
    nx_list
        .par_iter()
        .map(|&nx| {
            let mut best = (f64::NAN, f64::INFINITY);
            for &p in p_grid {
                let g = rate_parallel_depol(nx, p, false)? - closed_form_bound(nx, 1, ChannelModel::depolarizing(p)?)?;
                if g < best.1 {
                    best = (p, g);
                }
            }
            let bound = |e: f64| closed_form_bound(nx, 1, ChannelModel::Erasure(e));
            Ok(MinGapRow {
                nx,
                depol_min_gap: best.1,
                depol_argmin: best.0,
                erasure_assisted_gap_at_zero: rate_parallel_assisted(nx, 0.0)? - bound(0.0)?,
                erasure_assisted_gap_at_half_eta_prime: rate_parallel_assisted(nx, half_eta_prime)?
                    - bound(half_eta_prime)?,
                erasure_gap_at_half_eta: rate_grid(nx, 1, half_eta, ExponentMode::NyCorrected)? - bound(half_eta)?,
            })
        })
        .collect()
}

/// Where the large-`nx` depolarizing classical rate comes closest to the
/// large-`nx` bound.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TouchPoint {
    pub p: f64,
    /// `|C_inner(p) - 2 REE(p)|` at `p`.
    pub residual: f64,
}

pub fn asymptote_touch_point(p_grid: &[f64]) -> Result<TouchPoint> {
    let diffs = p_grid
        .par_iter()
        .map(|&p| {
            let ch = ChannelModel::depolarizing(p)?;
            Ok((p, (rate_parallel_depol_limit(p)? - asymptotic_bound(ch)).abs()))
        })
        .collect::<Result<Vec<_>>>()?;
    diffs
        .into_iter()
        .min_by(|a, b| a.1.total_cmp(&b.1))
        .map(|(p, residual)| TouchPoint { p, residual })
        .ok_or_else(|| Error::Config("p grid is empty".into()))
}

/// Simulation budget per crossing evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct McBudget {
    pub trials: u64,
    pub seed: u64,
    pub tol: f64,
    pub bracket: (f64, f64),
}

impl Default for McBudget {
    fn default() -> Self {
        McBudget { trials: DEFAULT_TRIALS, seed: DEFAULT_SEED, tol: MONTE_CARLO_TOL, bracket: DEFAULT_BRACKET }
    }
}

/// Half-width of the finite difference used for the local slope.
const SLOPE_STEP: f64 = 5e-3;
/// Endpoint gaps must exceed this many standard errors.
const BRACKET_SIGMAS: f64 = 3.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EtaPrimeCell {
    pub nx: usize,
    pub ny: usize,
    pub crossing: CrossingPoint,
    pub method: Provenance,
}

/// `η′` for the assisted grid of one shape. Single rows use the closed form;
/// taller grids bisect on simulated rates with common random numbers, so
/// every evaluation reuses the same per-trial random streams.
pub fn eta_prime_cell(nx: usize, ny: usize, budget: McBudget) -> Result<EtaPrimeCell> {
    let (lo, hi) = budget.bracket;
    let bound = |e: f64| closed_form_bound(nx, ny, ChannelModel::erasure(e)?);
    if ny == 1 {
        let crossing = find_crossing(|e| rate_parallel_assisted(nx, e), bound, lo, hi, budget.tol)?;
        return Ok(EtaPrimeCell { nx, ny, crossing, method: Provenance::ClosedForm });
    }
    let net = build_grid(nx, ny, ChannelModel::Erasure(0.0))?;
    let sim = |e: f64| simulate(&net, Strategy::InterNodeCC, e, budget.trials, budget.seed);

    for x in [lo, hi] {
        let est = sim(x)?;
        let gap = est.mean - bound(x)?;
        if gap.abs() < BRACKET_SIGMAS * est.stderr {
            return Err(Error::NoisyBracket { at: x, gap, stderr: est.stderr });
        }
    }
    let mut crossing = find_crossing(|e| Ok(sim(e)?.mean), bound, lo, hi, budget.tol)?;

    let x = crossing.value;
    let (a, b) = ((x - SLOPE_STEP).max(0.0), (x + SLOPE_STEP).min(1.0));
    let slope = ((sim(b)?.mean - bound(b)?) - (sim(a)?.mean - bound(a)?)) / (b - a);
    let noise = sim(x)?.stderr;
    crossing.evaluations += 5;
    crossing.error_bar += if slope != 0.0 { noise / slope.abs() } else { f64::INFINITY };
    Ok(EtaPrimeCell { nx, ny, crossing, method: Provenance::MonteCarlo })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EtaPrimeGrid {
    pub nx_list: Vec<usize>,
    pub ny_list: Vec<usize>,
    /// Row-major in `ny`, then `nx`.
    pub cells: Vec<EtaPrimeCell>,
}

pub fn eta_prime_grid(nx_list: &[usize], ny_list: &[usize], budget: McBudget) -> Result<EtaPrimeGrid> {
    if nx_list.is_empty() || ny_list.is_empty() {
        return Err(Error::Config("nx and ny lists must be non-empty".into()));
    }
    let mut nx_list = nx_list.to_vec();
    let mut ny_list = ny_list.to_vec();
    nx_list.sort_unstable();
    nx_list.dedup();
    ny_list.sort_unstable();
    ny_list.dedup();
    if nx_list[0] == 0 || ny_list[0] == 0 {
        return Err(Error::Config("grid dimensions must be >= 1".into()));
    }
    let shapes: Vec<(usize, usize)> = ny_list.iter().flat_map(|&ny| nx_list.iter().map(move |&nx| (nx, ny))).collect();
    let cells = shapes.par_iter().map(|&(nx, ny)| eta_prime_cell(nx, ny, budget)).collect::<Result<Vec<_>>>()?;
    Ok(EtaPrimeGrid { nx_list, ny_list, cells })
}

impl EtaPrimeGrid {
    pub fn get(&self, nx: usize, ny: usize) -> Option<&EtaPrimeCell> {
        let i = self.nx_list.iter().position(|&v| v == nx)?;
        let j = self.ny_list.iter().position(|&v| v == ny)?;
        self.cells.get(j * self.nx_list.len() + i)
    }

    /// `η′(nx, ny) / η′(nx₀, ny) - 1` with `nx₀` the smallest listed `nx`.
    pub fn relative_increase(&self, nx: usize, ny: usize) -> Option<f64> {
        let base = self.get(self.nx_list[0], ny)?.crossing.value;
        Some(self.get(nx, ny)?.crossing.value / base - 1.0)
    }

    /// Adjacent pairs breaking "non-decreasing in `nx`, non-increasing in
    /// `ny`" by more than the sum of their error bars.
    pub fn trend_violations(&self) -> Vec<String> {
        let mut out = Vec::new();
        let check = |out: &mut Vec<String>, lower: &EtaPrimeCell, upper: &EtaPrimeCell| {
            let slack = lower.crossing.error_bar + upper.crossing.error_bar;
            if upper.crossing.value < lower.crossing.value - slack {
                out.push(format!(
                    "eta'({},{}) = {:.5} < eta'({},{}) = {:.5}",
                    upper.nx, upper.ny, upper.crossing.value, lower.nx, lower.ny, lower.crossing.value
                ));
            }
        };
        for &ny in &self.ny_list {
            for w in self.nx_list.windows(2) {
                if let (Some(a), Some(b)) = (self.get(w[0], ny), self.get(w[1], ny)) {
                    check(&mut out, a, b);
                }
            }
        }
        for &nx in &self.nx_list {
            for w in self.ny_list.windows(2) {
                if let (Some(a), Some(b)) = (self.get(nx, w[0]), self.get(nx, w[1])) {
                    check(&mut out, b, a);
                }
            }
        }
        out
    }

    pub fn to_csv(&self, comments: &[String]) -> String {
        let mut out = String::new();
        for c in comments {
            out.push_str(&format!("# {c}\n"));
        }
        out.push_str("nx,ny,eta_prime,error_bar,relative_increase,method\n");
        for c in &self.cells {
            let rel = self.relative_increase(c.nx, c.ny).map(sig12).unwrap_or_default();
            out.push_str(&format!(
                "{},{},{},{},{},{}\n",
                c.nx,
                c.ny,
                sig12(c.crossing.value),
                sig12(c.crossing.error_bar),
                rel,
                c.method
            ));
        }
        out
    }
}
