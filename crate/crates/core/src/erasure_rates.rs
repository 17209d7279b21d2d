//! Closed-form achievable classical rates for erasure butterfly networks.
//!
//! Every rate is in bits per network use per receiver, and counts a bit only
//! when a receiver can decode it with certainty. `s = 1 - ε` throughout.

use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{check_prob, Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ErasureConfig {
    pub nx: usize,
    pub ny: usize,
    pub epsilon: f64,
    pub assisted: bool,
}

impl ErasureConfig {
    pub fn new(nx: usize, ny: usize, epsilon: f64, assisted: bool) -> Result<Self> {
        check_dims(nx, ny)?;
        check_prob("epsilon", epsilon)?;
        Ok(ErasureConfig { nx, ny, epsilon, assisted })
    }

    /// Closed-form rate when one exists: unassisted always (grid formula in
    /// `mode`), assisted only for single rows.
    pub fn closed_form_rate(&self, mode: ExponentMode) -> Option<f64> {
        match (self.assisted, self.ny) {
            (false, _) => rate_grid(self.nx, self.ny, self.epsilon, mode).ok(),
            (true, 1) => rate_parallel_assisted(self.nx, self.epsilon).ok(),
            (true, _) => None,
        }
    }
}

fn check_dims(nx: usize, ny: usize) -> Result<()> {
    if nx < 1 || ny < 1 {
        return Err(Error::Config(format!("grid dimensions must be >= 1, got {nx}x{ny}")));
    }
    Ok(())
}

/// Probability that a bit protected by one block's backup route reaches the
/// next layer.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
pub struct LambdaValue(f64);

impl LambdaValue {
    pub fn value(self) -> f64 {
        self.0
    }
}

pub fn lambda(eps: f64) -> Result<LambdaValue> {
    check_prob("epsilon", eps)?;
    Ok(LambdaValue(lam(eps)))
}

fn lam(eps: f64) -> f64 {
    // fails only when the direct edge and the three-edge backup both fail
    1.0 - eps * (1.0 - (1.0 - eps).powi(3))
}

/// Side channels plus network coding at the bottleneck.
pub fn rate_single(eps: f64) -> Result<f64> {
    check_prob("epsilon", eps)?;
    let s = 1.0 - eps;
    Ok(s + s.powi(5))
}

/// Single block with failure-triggered forwarding at the top relay.
pub fn rate_single_assisted(eps: f64) -> Result<f64> {
    check_prob("epsilon", eps)?;
    let s = 1.0 - eps;
    Ok(s + s.powi(5) + eps * (1.0 + eps) * s.powi(3))
}

fn row_weight(nx: usize) -> f64 {
    let r = (nx + 1) as f64;
    2.0 * (r - 1.0) / r
}

pub fn rate_parallel(nx: usize, eps: f64) -> Result<f64> {
    check_dims(nx, 1)?;
    check_prob("epsilon", eps)?;
    let s = 1.0 - eps;
    Ok(s + row_weight(nx) * s.powi(5))
}

pub fn rate_parallel_assisted(nx: usize, eps: f64) -> Result<f64> {
    check_dims(nx, 1)?;
    check_prob("epsilon", eps)?;
    let s = 1.0 - eps;
    Ok(s + row_weight(nx) * (s.powi(5) + eps * (1.0 + eps) * s.powi(3)))
}

/// `1 × ny` ladder with the bottleneck of every upper block backing up the
/// left column and network coding in the last block.
pub fn rate_series(ny: usize, eps: f64) -> Result<f64> {
    check_dims(1, ny)?;
    check_prob("epsilon", eps)?;
    let s = 1.0 - eps;
    let up = (ny - 1) as i32;
    let l = lam(eps).powi(up);
    Ok((s * l + s.powi(ny as i32)) / 2.0 + s.powi(5) * s.powi(up) * l)
}

/// Two-block ladder that ignores the first block's bottleneck. Not optimal;
/// kept as a baseline.
pub fn rate_series_sideonly(eps: f64) -> Result<f64> {
    check_prob("epsilon", eps)?;
    let s = 1.0 - eps;
    Ok(s.powi(2) + s.powi(7))
}

/// Exponent of `λ` in the inner-block coding term of the grid formula.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExponentMode {
    /// `λ^{2(Nx-1)}`, the exponent as originally written.
    AsPrinted,
    /// `λ^{2(Ny-1)}`: both columns of an inner block carry `Ny - 1` backups.
    NyCorrected,
}

impl ExponentMode {
    pub const ALL: [ExponentMode; 2] = [ExponentMode::AsPrinted, ExponentMode::NyCorrected];
}

impl fmt::Display for ExponentMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ExponentMode::AsPrinted => "as-printed",
            ExponentMode::NyCorrected => "ny-corrected",
        })
    }
}

impl FromStr for ExponentMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "as-printed" => Ok(ExponentMode::AsPrinted),
            "ny-corrected" => Ok(ExponentMode::NyCorrected),
            other => Err(Error::Config(format!("unknown exponent mode '{other}'"))),
        }
    }
}

/// Unassisted rate of the `nx × ny` grid where every sender but the
/// rightmost uses the backup route of the block to its right.
pub fn rate_grid(nx: usize, ny: usize, eps: f64, mode: ExponentMode) -> Result<f64> {
    check_dims(nx, ny)?;
    check_prob("epsilon", eps)?;
    let s = 1.0 - eps;
    let l = lam(eps);
    let up = (ny - 1) as i32;
    let inner_exp = match mode {
        ExponentMode::AsPrinted => 2 * (nx as i32 - 1),
        ExponentMode::NyCorrected => 2 * up,
    };
    let nxf = nx as f64;
    let total = nxf * s * l.powi(up)
        + s.powi(ny as i32)
        + 2.0 * (nxf - 1.0) * s.powi(5) * l.powi(inner_exp)
        + 2.0 * s.powi(5) * s.powi(up) * l.powi(up);
    Ok(total / (nxf + 1.0))
}

/// Large-`nx` limits of the row quantities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AsymptoticRates {
    pub quantum_bound: f64,
    pub classical: f64,
    pub classical_assisted: f64,
}

pub fn asymptotic_rates(eps: f64) -> Result<AsymptoticRates> {
    check_prob("epsilon", eps)?;
    let s = 1.0 - eps;
    let classical = s + 2.0 * s.powi(5);
    Ok(AsymptoticRates {
        quantum_bound: 2.0 * s,
        classical,
        classical_assisted: classical + 2.0 * eps * (1.0 + eps) * s.powi(3),
    })
}
