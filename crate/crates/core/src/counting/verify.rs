use serde::Serialize;

use super::bound::counting_bound;
use super::ensemble::Ensemble;
use super::fannes::eta;
use super::reach::{reachability, ReachOutcome, SearchBudget, WITNESS_SLACK};
use crate::channels::{build_pinching, Channel};
use crate::qis::linalg::real;
use crate::qis::{trace_distance, von_neumann_entropy, DensityOperator, PureState, Space};
use crate::{parallel, CMatrix, Error, Result};

/// Slack on the final comparison `log₂N ≤ bound`.
pub const BOUND_SLACK: f64 = 1e-9;

#[derive(Clone, Debug, Serialize)]
pub struct Witness {
    pub target_index: usize,
    pub target: PureState,
    pub input: DensityOperator,
    pub distance: f64,
}

/// Achieved orthonormal-output count against the closed-form bound.
#[derive(Clone, Debug, Serialize)]
pub struct CountingReport {
    pub d: usize,
    pub delta: f64,
    pub targets: usize,
    pub achieved_count: usize,
    /// `None` when no target was reached.
    #[serde(rename = "achieved_log2N")]
    pub achieved_log2n: Option<f64>,
    #[serde(rename = "bound_log2N")]
    pub bound_log2n: f64,
    pub pass: bool,
    /// Best distance found per target, in target order.
    pub best_distances: Vec<f64>,
    pub witnesses: Vec<Witness>,
}

impl CountingReport {
    /// Assembles a report from per-target search results, so one search can
    /// serve several tolerances.
    pub fn from_outcomes(
        e: &Channel,
        targets: &[PureState],
        outcomes: &[ReachOutcome],
        delta: f64,
    ) -> Result<Self> {
        let bound_log2n = counting_bound(e.in_dim(), delta)?;
        let witnesses: Vec<Witness> = targets
            .iter()
            .zip(outcomes)
            .enumerate()
            .filter(|(_, (_, o))| o.best_distance <= delta + WITNESS_SLACK)
            .map(|(i, (t, o))| Witness {
                target_index: i,
                target: t.clone(),
                input: o.best.clone(),
                distance: o.best_distance,
            })
            .collect();
        let achieved_count = witnesses.len();
        let achieved_log2n = (achieved_count > 0).then(|| (achieved_count as f64).log2());
        Ok(CountingReport {
            d: e.in_dim(),
            delta,
            targets: targets.len(),
            achieved_count,
            achieved_log2n,
            bound_log2n,
            pass: achieved_log2n.is_none_or(|a| a <= bound_log2n + BOUND_SLACK),
            best_distances: outcomes.iter().map(|o| o.best_distance).collect(),
            witnesses,
        })
    }
}

pub(crate) fn check_orthonormal(targets: &[PureState]) -> Result<()> {
    build_pinching(targets).map(|_| ())
}

/// Searches every target for a witness (in parallel, one random stream per
/// target index) and compares the count against [`counting_bound`].
pub fn verify_counting_instance(
    e: &Channel,
    targets: &[PureState],
    delta: f64,
    budget: &SearchBudget,
) -> Result<CountingReport> {
    counting_bound(e.in_dim(), delta)?;
    check_orthonormal(targets)?;
    let outcomes = parallel::map_indexed(targets.len(), |i| {
        reachability(e, &targets[i], delta, &budget.with_stream(i as u64))
    })
    .into_iter()
    .collect::<Result<Vec<_>>>()?;
    CountingReport::from_outcomes(e, targets, &outcomes, delta)
}

/// One numerically checked inequality `lhs ≤ rhs` of the proof chain.
#[derive(Clone, Debug, Serialize)]
pub struct ChainStep {
    pub name: &'static str,
    pub statement: &'static str,
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

impl ChainStep {
    fn new(name: &'static str, statement: &'static str, lhs: f64, rhs: f64) -> Self {
        ChainStep { name, statement, lhs, rhs, holds: lhs <= rhs }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct ProofChain {
    pub n: usize,
    pub d: usize,
    pub delta: f64,
    pub steps: Vec<ChainStep>,
}

impl ProofChain {
    pub fn holds(&self) -> bool {
        self.steps.iter().all(|s| s.holds)
    }

    pub fn step(&self, name: &str) -> Option<&ChainStep> {
        self.steps.iter().find(|s| s.name == name)
    }
}

/// Replays the counting argument on concrete witnesses `σ_i` with
/// `‖E(σ_i) − |φ_i⟩⟨φ_i|‖_Tr ≤ δ`: pinch onto the targets, compare Holevo
/// quantities, push trace distances through the pinching, apply the Fannes
/// inequality to members and average, and rearrange.
pub fn replay_proof_chain(
    e: &Channel,
    inputs: &[DensityOperator],
    targets: &[PureState],
    delta: f64,
) -> Result<ProofChain> {
    let bound = counting_bound(e.in_dim(), delta)?;
    let n = targets.len();
    if n == 0 || inputs.len() != n {
        return Err(Error::InvalidEnsemble(format!("{} inputs for {} targets", inputs.len(), n)));
    }
    let d = e.in_dim();
    let input_space = Space::Plain(d);
    let inputs = inputs
        .iter()
        .map(|s| s.relabel(input_space))
        .collect::<Result<Vec<_>>>()?;
    let q = build_pinching(targets)?;
    let qe = Channel::compose(&q, e)?;
    let out_space = Space::Plain(n + 1);
    let e_space = Space::Plain(e.out_dim());
    let log_n = (n as f64).log2();
    let fannes = 2.0 * delta * ((n + 1) as f64).log2() + eta(2.0 * delta);

    let ens = Ensemble::uniform(inputs.clone())?;
    let pinched = ens.map(|s| qe.apply_into(s, out_space))?;
    let chi_in = ens.chi();
    let chi_out = pinched.chi();

    let mut per_witness: f64 = 0.0;
    let mut pinched_gap: f64 = 0.0;
    let mut pinched_dist: f64 = 0.0;
    let mut member_entropy: f64 = 0.0;
    for (i, (sigma, target)) in inputs.iter().zip(targets).enumerate() {
        let p = target.to_density().relabel(e_space)?;
        let raw = trace_distance(&e.apply_into(sigma, e_space)?, &p)?;
        let qp = q.apply_into(&p, out_space)?;
        let pinched_i = &pinched.states()[i];
        let dist = trace_distance(pinched_i, &qp)?;
        per_witness = per_witness.max(raw);
        pinched_dist = pinched_dist.max(dist);
        pinched_gap = pinched_gap.max(dist - raw);
        member_entropy = member_entropy.max(von_neumann_entropy(pinched_i));
    }

    let mut delta_diag = CMatrix::zeros(n + 1, n + 1);
    for i in 0..n {
        delta_diag[(i, i)] = real(1.0 / n as f64);
    }
    let delta_state = DensityOperator::from_state_matrix(delta_diag, out_space);
    let average_dist = trace_distance(pinched.average(), &delta_state)?;
    let average_gap = (von_neumann_entropy(pinched.average()) - von_neumann_entropy(&delta_state)).abs();
    let combined = log_n - 4.0 * delta * ((n + 1) as f64).log2() - 2.0 * eta(2.0 * delta);
    // −2η(2δ) = 4δ log(2δ); log(N+1) ≤ log N + 1 for N ≥ 1.
    let rearranged = (1.0 - 4.0 * delta) * log_n - 4.0 * delta - 2.0 * eta(2.0 * delta);

    let steps = vec![
        ChainStep::new("witnesses", "‖E(σ_i) − P_i‖_Tr ≤ δ", per_witness, delta + WITNESS_SLACK),
        ChainStep::new("chi_monotone", "χ(Q∘E(𝔼_σ)) ≤ χ(𝔼_σ)", chi_out, chi_in + 1e-8),
        ChainStep::new("chi_dimension", "χ(𝔼_σ) ≤ log d", chi_in, (d as f64).log2() + 1e-8),
        ChainStep::new(
            "trace_monotone",
            "‖Q∘E(σ_i) − Q(P_i)‖_Tr ≤ ‖E(σ_i) − P_i‖_Tr",
            pinched_gap,
            1e-9,
        ),
        ChainStep::new("pinched_members", "‖Q∘E(σ_i) − Q(P_i)‖_Tr ≤ δ", pinched_dist, delta + 1e-9),
        ChainStep::new("pinched_average", "‖Q∘E(σ) − Δ‖_Tr ≤ δ", average_dist, delta + 1e-9),
        ChainStep::new(
            "fannes_members",
            "S(Q∘E(σ_i)) ≤ 2δ log(N+1) + η(2δ)",
            member_entropy,
            fannes + 1e-9,
        ),
        ChainStep::new(
            "fannes_average",
            "|S(Q∘E(σ)) − S(Δ)| ≤ 2δ log(N+1) + η(2δ)",
            average_gap,
            fannes + 1e-9,
        ),
        ChainStep::new(
            "combined",
            "log N − 4δ log(N+1) − 2η(2δ) ≤ log d",
            combined,
            (d as f64).log2() + 1e-8,
        ),
        ChainStep::new(
            "log_relaxation",
            "(1−4δ) log N − 4δ + 4δ log(2δ) ≤ log N − 4δ log(N+1) − 2η(2δ)",
            rearranged,
            combined + 1e-9,
        ),
        ChainStep::new("rearranged", "log N ≤ (log d + 4δ log(1/δ))/(1−4δ)", log_n, bound + 1e-6),
    ];
    Ok(ProofChain { n, d, delta, steps })
}
