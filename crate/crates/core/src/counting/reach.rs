//! Conditional-gradient search for an input that a channel maps close to
//! a pure target.
//!
//! The objective `f(σ) = ½‖E(σ) − P‖₁` is convex on the state space. Each
//! step takes a subgradient `G = ½ E†(sign(E(σ) − P))`, moves toward the
//! pure state minimizing `Tr(Gσ)` (the lowest eigenvector of `G`), and picks
//! the step length by golden-section search on the segment. The duality gap
//! `Tr(Gσ) − λ_min(G)` gives a lower bound `f − gap` on the global minimum,
//! used only to stop early.

use serde::Serialize;

use crate::channels::Channel;
use crate::qis::linalg::{self, HermitianEigen};
use crate::qis::{DensityOperator, PureState, Space};
use crate::random::{random_pure_state, stream_rng};
use crate::{CMatrix, Error, Result, C64};

/// A search result counts as a witness when its distance is at most
/// `δ + WITNESS_SLACK`.
pub const WITNESS_SLACK: f64 = 1e-12;

const GOLDEN_ITERS: usize = 40;
const STALL_WINDOW: usize = 10;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SearchBudget {
    pub max_iterations: usize,
    /// Random pure starts after the informed one.
    pub restarts: usize,
    pub tolerance: f64,
    pub seed: u64,
    pub stream: u64,
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget {
            max_iterations: 500,
            restarts: 20,
            tolerance: 1e-7,
            seed: 0,
            stream: 0,
        }
    }
}

impl SearchBudget {
    pub fn with_stream(self, stream: u64) -> Self {
        SearchBudget { stream, ..self }
    }
}

#[derive(Clone, Debug)]
pub struct ReachOutcome {
    /// Best input found, as a state on `C^in_dim`.
    pub best: DensityOperator,
    pub best_distance: f64,
    /// Largest certified lower bound on the minimum seen during the search.
    pub lower_bound: f64,
    pub iterations: usize,
    /// Objective after every accepted iterate, one list per start.
    pub history: Vec<Vec<f64>>,
    /// `best` when `best_distance ≤ δ + WITNESS_SLACK`.
    pub witness: Option<DensityOperator>,
}

impl ReachOutcome {
    pub fn witness_at(&self, delta: f64) -> Option<&DensityOperator> {
        (self.best_distance <= delta + WITNESS_SLACK).then_some(&self.best)
    }
}

fn half_trace_norm(m: &CMatrix) -> f64 {
    0.5 * linalg::trace_norm(m)
}

fn sign_matrix(a: &CMatrix) -> CMatrix {
    HermitianEigen::new(a).map(|l| if l > 1e-14 { 1.0 } else if l < -1e-14 { -1.0 } else { 0.0 })
}

/// Minimizes `h(t) = ½‖(1−t)A + tB‖₁` on `[0, 1]`.
fn line_search(a: &CMatrix, b: &CMatrix) -> (f64, f64) {
    let h = |t: f64| half_trace_norm(&(a * C64::new(1.0 - t, 0.0) + b * C64::new(t, 0.0)));
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let (mut lo, mut hi) = (0.0, 1.0);
    let mut x1 = hi - g * (hi - lo);
    let mut x2 = lo + g * (hi - lo);
    let (mut f1, mut f2) = (h(x1), h(x2));
    for _ in 0..GOLDEN_ITERS {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - g * (hi - lo);
            f1 = h(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + g * (hi - lo);
            f2 = h(x2);
        }
    }
    let mut best = if f1 <= f2 { (x1, f1) } else { (x2, f2) };
    let end = h(1.0);
    if end < best.1 {
        best = (1.0, end);
    }
    best
}

/// Stop once the objective is at most `success`, or once the certified
/// lower bound exceeds `give_up`.
#[derive(Clone, Copy)]
struct Thresholds {
    success: f64,
    give_up: f64,
}

struct Run {
    sigma: CMatrix,
    value: f64,
    lower_bound: f64,
    iterations: usize,
    history: Vec<f64>,
}

fn descend(e: &Channel, p: &CMatrix, start: CMatrix, stop: Thresholds, budget: &SearchBudget) -> Run {
    let mut sigma = start;
    let mut image = e.apply_matrix(&sigma);
    let mut diff = &image - p;
    let mut value = half_trace_norm(&diff);
    let mut history = vec![value];
    let mut lower_bound: f64 = 0.0;
    let mut iterations = 0;
    while iterations < budget.max_iterations && value > stop.success {
        iterations += 1;
        let grad = e.adjoint_apply(&sign_matrix(&diff)) * C64::new(0.5, 0.0);
        let eig = HermitianEigen::new(&grad);
        let v = eig.vector(0);
        let along = linalg::trace_re(&(&grad * &sigma));
        let gap = along - eig.values[0];
        lower_bound = lower_bound.max(value - gap);
        if gap <= budget.tolerance || lower_bound > stop.give_up {
            break;
        }
        let vertex = linalg::projector(&v);
        let vertex_image = e.apply_matrix(&vertex);
        let (t, h) = line_search(&diff, &(&vertex_image - p));
        if !(h < value) {
            break;
        }
        let keep = C64::new(1.0 - t, 0.0);
        let step = C64::new(t, 0.0);
        sigma = &sigma * keep + vertex * step;
        image = &image * keep + vertex_image * step;
        diff = &image - p;
        value = half_trace_norm(&diff);
        history.push(value);
        let k = history.len();
        if k > STALL_WINDOW && history[k - 1 - STALL_WINDOW] - value < budget.tolerance {
            break;
        }
    }
    Run { sigma, value, lower_bound, iterations, history }
}

fn search(e: &Channel, target: &PureState, stop: Thresholds, budget: &SearchBudget) -> Result<ReachOutcome> {
    if target.dim() != e.out_dim() {
        return Err(Error::DimensionMismatch { expected: e.out_dim(), found: target.dim() });
    }
    let p = linalg::projector(target.vector());
    let informed = HermitianEigen::new(&e.adjoint_apply(&p));
    let top = informed.vector(e.in_dim() - 1);
    let mut rng = stream_rng(budget.seed, budget.stream);
    let space = Space::Plain(e.in_dim());

    let mut best: Option<Run> = None;
    let mut lower_bound: f64 = 0.0;
    let mut iterations = 0;
    let mut history = Vec::new();
    for start in 0..=budget.restarts {
        let v = if start == 0 {
            top.clone()
        } else {
            random_pure_state(space, &mut rng).vector().clone()
        };
        let mut run = descend(e, &p, linalg::projector(&v), stop, budget);
        iterations += run.iterations;
        lower_bound = lower_bound.max(run.lower_bound);
        history.push(std::mem::take(&mut run.history));
        let improved = best.as_ref().is_none_or(|b| run.value < b.value);
        if improved {
            best = Some(run);
        }
        let b = best.as_ref().expect("at least one start");
        if b.value <= stop.success || lower_bound > stop.give_up {
            break;
        }
    }
    let run = best.expect("at least one start");
    let state = DensityOperator::from_state_matrix(run.sigma, space);
    let target_state = target.to_density().relabel(Space::Plain(e.out_dim()))?;
    let image = e.apply_into(&state, Space::Plain(e.out_dim()))?;
    let best_distance = crate::qis::trace_distance(&image, &target_state)?;
    Ok(ReachOutcome {
        best: state,
        best_distance,
        lower_bound: lower_bound.min(best_distance),
        iterations,
        history,
        witness: None,
    })
}

/// Looks for `σ` with `‖E(σ) − |ψ⟩⟨ψ|‖_Tr ≤ δ`. `None` in `witness` only
/// means the budget ran out; it is not a proof of unreachability.
pub fn reachability(e: &Channel, target: &PureState, delta: f64, budget: &SearchBudget) -> Result<ReachOutcome> {
    let mut out = search(e, target, Thresholds { success: delta, give_up: delta }, budget)?;
    out.witness = out.witness_at(delta).cloned();
    Ok(out)
}

/// Runs the search toward the minimum, for reuse across tolerances up to
/// `max_delta`. Gives up once the minimum is certified above `max_delta`.
pub fn minimize_distance(
    e: &Channel,
    target: &PureState,
    max_delta: f64,
    budget: &SearchBudget,
) -> Result<ReachOutcome> {
    let stop = Thresholds { success: budget.tolerance.min(max_delta), give_up: max_delta };
    search(e, target, stop, budget)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn basis(d: usize, k: usize) -> PureState {
        PureState::basis_index(Space::Plain(d), k).unwrap()
    }

    #[test]
    fn identity_reaches_basis_targets() {
        let e = Channel::identity(3);
        for k in 0..3 {
            let out = reachability(&e, &basis(3, k), 0.0, &SearchBudget::default()).unwrap();
            assert!(out.best_distance < 1e-9);
            assert!(out.witness.is_some());
        }
    }

    #[test]
    fn depolarized_target_is_half_away() {
        let e = Channel::completely_depolarizing(2);
        let out = reachability(&e, &basis(2, 0), 0.4, &SearchBudget::default()).unwrap();
        assert!(out.witness.is_none());
        assert!((out.best_distance - 0.5).abs() < 1e-9);
        let out = reachability(&e, &basis(2, 0), 0.5, &SearchBudget::default()).unwrap();
        assert!((out.witness.map(|_| out.best_distance).unwrap() - 0.5).abs() < 1e-6);
    }

    #[test]
    fn objective_never_increases() {
        let mut rng = crate::random::seeded_rng(5);
        let e = crate::random::random_channel(4, 4, &mut rng);
        let out = minimize_distance(&e, &basis(4, 1), 1.0, &SearchBudget { restarts: 3, ..Default::default() }).unwrap();
        for run in &out.history {
            assert!(run.windows(2).all(|w| w[1] <= w[0] + 1e-12));
        }
        assert!(out.lower_bound <= out.best_distance + 1e-12);
    }
}
