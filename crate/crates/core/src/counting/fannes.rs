use serde::Serialize;

use crate::qis::{trace_distance, von_neumann_entropy, DensityOperator};
use crate::Result;

/// `η(x) = −x log₂ x`, with `η(0) = 0`.
pub fn eta(x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        -x * x.log2()
    }
}

/// `2T log₂ d + η(2T)` for trace distance `T` in dimension `d`.
pub fn fannes_bound(t: f64, d: usize) -> f64 {
    2.0 * t * (d as f64).log2() + eta(2.0 * t)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum FannesStatus {
    Pass,
    Fail,
    /// Trace distance above `1/e`; the inequality makes no claim.
    NotApplicable,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct FannesReport {
    pub trace_distance: f64,
    pub entropy_gap: f64,
    pub bound: f64,
    pub status: FannesStatus,
}

/// Checks `|S(ρ) − S(σ)| ≤ 2T log₂ d + η(2T)` with `1e-9` slack.
pub fn fannes_check(rho: &DensityOperator, sigma: &DensityOperator) -> Result<FannesReport> {
    let t = trace_distance(rho, sigma)?;
    let entropy_gap = (von_neumann_entropy(rho) - von_neumann_entropy(sigma)).abs();
    let bound = fannes_bound(t, rho.dim());
    let status = if t > (-1.0f64).exp() {
        FannesStatus::NotApplicable
    } else if entropy_gap <= bound + 1e-9 {
        FannesStatus::Pass
    } else {
        FannesStatus::Fail
    };
    Ok(FannesReport { trace_distance: t, entropy_gap, bound, status })
}
