//! Discrete memoryless channels and their capacity.

use serde::Serialize;

use crate::error::{check_prob, Error, Result};

const ROW_SUM_TOL: f64 = 1e-12;

/// Row-stochastic transition matrix `P(output | input)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Dmc {
    n_inputs: usize,
    n_outputs: usize,
    transition: Vec<f64>,
}

impl Dmc {
    pub fn new(rows: Vec<Vec<f64>>) -> Result<Self> {
        let n_inputs = rows.len();
        let n_outputs = rows.first().map_or(0, Vec::len);
        if n_inputs < 2 || n_outputs < 2 {
            return Err(Error::NotStochastic(format!(
                "need at least 2 inputs and 2 outputs, got {n_inputs}x{n_outputs}"
            )));
        }
        for (x, row) in rows.iter().enumerate() {
            if row.len() != n_outputs {
                return Err(Error::NotStochastic(format!("row {x} has {} entries", row.len())));
            }
            if let Some(bad) = row.iter().find(|v| !v.is_finite() || **v < 0.0) {
                return Err(Error::NotStochastic(format!("row {x} has entry {bad}")));
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > ROW_SUM_TOL {
                return Err(Error::NotStochastic(format!("row {x} sums to {sum}")));
            }
        }
        Ok(Dmc { n_inputs, n_outputs, transition: rows.concat() })
    }

    pub fn bsc(q: f64) -> Result<Self> {
        check_prob("q", q)?;
        Dmc::new(vec![vec![1.0 - q, q], vec![q, 1.0 - q]])
    }

    /// Outputs are `0`, `1`, erased.
    pub fn bec(eps: f64) -> Result<Self> {
        check_prob("epsilon", eps)?;
        Dmc::new(vec![vec![1.0 - eps, 0.0, eps], vec![0.0, 1.0 - eps, eps]])
    }

    pub fn n_inputs(&self) -> usize {
        self.n_inputs
    }

    pub fn n_outputs(&self) -> usize {
        self.n_outputs
    }

    pub fn prob(&self, input: usize, output: usize) -> f64 {
        self.transition[input * self.n_outputs + output]
    }

    pub fn row(&self, input: usize) -> &[f64] {
        &self.transition[input * self.n_outputs..(input + 1) * self.n_outputs]
    }

    /// Same channel with outputs renamed by the bijection `perm`.
    pub fn relabel_outputs(&self, perm: &[usize]) -> Result<Self> {
        if perm.len() != self.n_outputs {
            return Err(Error::Config("output permutation has wrong length".into()));
        }
        let mut seen = vec![false; self.n_outputs];
        for &y in perm {
            if y >= self.n_outputs || std::mem::replace(&mut seen[y], true) {
                return Err(Error::Config("output relabelling is not a bijection".into()));
            }
        }
        let rows = (0..self.n_inputs)
            .map(|x| {
                let mut row = vec![0.0; self.n_outputs];
                for (y, &p) in self.row(x).iter().enumerate() {
                    row[perm[y]] = p;
                }
                row
            })
            .collect();
        Dmc::new(rows)
    }

    /// One row per input, entries separated by single spaces.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for x in 0..self.n_inputs {
            let row: Vec<String> = self.row(x).iter().map(|p| format!("{p:.17e}")).collect();
            out.push_str(&row.join(" "));
            out.push('\n');
        }
        out
    }
}

/// Probability vector over the input alphabet.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InputDistribution {
    probs: Vec<f64>,
}

impl InputDistribution {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.iter().any(|p| !p.is_finite() || *p < 0.0) {
            return Err(Error::Config("input distribution has a negative entry".into()));
        }
        let sum: f64 = probs.iter().sum();
        if (sum - 1.0).abs() > ROW_SUM_TOL {
            return Err(Error::Config(format!("input distribution sums to {sum}")));
        }
        Ok(InputDistribution { probs })
    }

    pub fn uniform(n: usize) -> Self {
        InputDistribution { probs: vec![1.0 / n as f64; n] }
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }
}

/// `I(X; Y)` in bits for input distribution `dist`.
pub fn mutual_information(dmc: &Dmc, dist: &InputDistribution) -> Result<f64> {
    if dist.probs.len() != dmc.n_inputs {
        return Err(Error::Config("distribution length does not match channel inputs".into()));
    }
    Ok(mutual_info_raw(dmc, &dist.probs))
}

pub(crate) fn mutual_info_raw(dmc: &Dmc, p: &[f64]) -> f64 {
    let q = output_marginal(dmc, p);
    let mut info = 0.0;
    for (x, &px) in p.iter().enumerate() {
        if px == 0.0 {
            continue;
        }
        for (y, &w) in dmc.row(x).iter().enumerate() {
            if w > 0.0 {
                info += px * w * (w / q[y]).log2();
            }
        }
    }
    info.max(0.0)
}

fn output_marginal(dmc: &Dmc, p: &[f64]) -> Vec<f64> {
    let mut q = vec![0.0; dmc.n_outputs];
    for (x, &px) in p.iter().enumerate() {
        for (y, &w) in dmc.row(x).iter().enumerate() {
            q[y] += px * w;
        }
    }
    q
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CapacityResult {
    /// Lower capacity estimate, `log2 Σ p(x) 2^{D(x)}`.
    pub capacity: f64,
    /// Upper capacity estimate, `max_x D(x)`.
    pub upper: f64,
    pub dist: InputDistribution,
    pub iterations: usize,
    /// `upper - capacity`.
    pub residual: f64,
}

pub const DEFAULT_TOL: f64 = 1e-9;
pub const DEFAULT_MAX_ITER: usize = 100_000;

/// Blahut-Arimoto alternating maximisation from the uniform input
/// distribution. Stops once the upper and lower capacity estimates are
/// within `tol`.
pub fn blahut_arimoto(dmc: &Dmc, tol: f64, max_iter: usize) -> Result<CapacityResult> {
    if !(tol > 0.0) {
        return Err(Error::Config(format!("tolerance must be positive, got {tol}")));
    }
    let n = dmc.n_inputs;
    let mut p = vec![1.0 / n as f64; n];
    let mut divergence = vec![0.0; n];
    let mut best: Option<CapacityResult> = None;

    for iter in 1..=max_iter.max(1) {
        let q = output_marginal(dmc, &p);
        for (x, d) in divergence.iter_mut().enumerate() {
            *d = dmc.row(x).iter().zip(&q).filter(|(w, _)| **w > 0.0).map(|(w, qy)| w * (w / qy).log2()).sum();
        }
        let weighted: f64 = p.iter().zip(&divergence).map(|(px, d)| px * d.exp2()).sum();
        let lower = weighted.log2();
        let upper = divergence.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let result = CapacityResult {
            capacity: lower.max(0.0),
            upper,
            dist: InputDistribution { probs: p.clone() },
            iterations: iter,
            residual: (upper - lower).max(0.0),
        };
        if result.residual <= tol {
            return Ok(result);
        }
        best = Some(result);
        for (px, d) in p.iter_mut().zip(&divergence) {
            *px *= d.exp2() / weighted;
        }
    }
    Err(Error::NoConvergence { best: Box::new(best.expect("at least one iteration")) })
}

/// [`blahut_arimoto`] with the default tolerance and iteration cap.
pub fn capacity(dmc: &Dmc) -> Result<CapacityResult> {
    blahut_arimoto(dmc, DEFAULT_TOL, DEFAULT_MAX_ITER)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::h2;
    use approx::assert_abs_diff_eq;

    #[test]
    fn bsc_and_bec() {
        let res = capacity(&Dmc::bsc(0.11).unwrap()).unwrap();
        assert_abs_diff_eq!(res.capacity, 1.0 - h2(0.11), epsilon = 1e-9);
        assert_abs_diff_eq!(res.capacity, 0.50008, epsilon = 1e-4);
        let res = capacity(&Dmc::bec(0.3).unwrap()).unwrap();
        assert_abs_diff_eq!(res.capacity, 0.7, epsilon = 1e-9);
    }

    #[test]
    fn asymmetric_channel_converges() {
        // Z-channel with crossover 0.5: capacity log2(5/4) at P(1) = 2/5
        let z = Dmc::new(vec![vec![1.0, 0.0], vec![0.5, 0.5]]).unwrap();
        let res = capacity(&z).unwrap();
        assert_abs_diff_eq!(res.capacity, (1.25f64).log2(), epsilon = 1e-8);
        assert_abs_diff_eq!(res.dist.probs()[1], 0.4, epsilon = 1e-4);
        assert!(res.capacity <= res.upper && res.residual <= DEFAULT_TOL);
        let mi = mutual_information(&z, &res.dist).unwrap();
        assert!(mi <= res.capacity + 1e-12 && res.capacity - mi < 1e-8);
    }

    #[test]
    fn iteration_cap_reports_best() {
        let z = Dmc::new(vec![vec![1.0, 0.0], vec![0.5, 0.5]]).unwrap();
        match blahut_arimoto(&z, 1e-15, 3) {
            Err(Error::NoConvergence { best }) => {
                assert_eq!(best.iterations, 3);
                assert!(best.capacity > 0.3);
            }
            other => panic!("expected NoConvergence, got {other:?}"),
        }
        assert!(blahut_arimoto(&z, 0.0, 10).is_err());
    }

    #[test]
    fn rejects_non_stochastic() {
        assert!(Dmc::new(vec![vec![0.5, 0.4], vec![0.5, 0.5]]).is_err());
        assert!(Dmc::new(vec![vec![1.2, -0.2], vec![0.5, 0.5]]).is_err());
        assert!(Dmc::new(vec![vec![1.0]]).is_err());
        assert!(Dmc::new(vec![vec![1.0, 0.0], vec![1.0]]).is_err());
        assert!(InputDistribution::new(vec![0.7, 0.7]).is_err());
    }

    #[test]
    fn relabel_and_text() {
        let bec = Dmc::bec(0.2).unwrap();
        let swapped = bec.relabel_outputs(&[2, 0, 1]).unwrap();
        assert_eq!(swapped.prob(0, 2), 0.8);
        assert!(bec.relabel_outputs(&[0, 0, 1]).is_err());
        let text = bec.to_text();
        assert_eq!(text.lines().count(), 2);
        let parsed: Vec<f64> = text.lines().next().unwrap().split(' ').map(|v| v.parse().unwrap()).collect();
        assert_eq!(parsed, bec.row(0));
    }
}
