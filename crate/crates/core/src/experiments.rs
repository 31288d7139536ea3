//! Batch experiments behind the `qcount` commands. Each returns a
//! serializable report; the binary only parses flags and writes files.

use std::collections::BTreeSet;

use rand::Rng;
use serde::Serialize;

use crate::channels::Channel;
use crate::counting::{
    counting_bound, minimize_distance, qc_counting_bound, replay_proof_chain, CountingReport, ProofChain,
    SearchBudget, DELTA_LIMIT,
};
use crate::enumeration::{enumerate_outputs, NetConfig, OutputCatalog, StateNet, CoverageCertificate, CERTIFICATE_SAMPLES};
use crate::machine::{complexity_table, Family, MachineSpec, QuantumMachine, MAX_PROGRAM_BITS};
use crate::qis::{BitString, PureState, Space};
use crate::random::{random_channel, random_noisy_unitary, stream_rng};
use crate::{parallel, Error, Result, VERSION};

pub const SCHEMA_VERSION: u32 = 1;
pub const MAX_LEMMA_DIM: usize = 8;
pub const MAX_INSTANCES: usize = 1000;
/// Largest noise weight of the noisy-unitary campaign family.
pub const MAX_CAMPAIGN_NOISE: f64 = 0.3;

fn validate_delta(delta: f64) -> Result<()> {
    counting_bound(1, delta).map(|_| ())
}

// ---- bound table ----

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct BoundRow {
    pub d: usize,
    pub delta: f64,
    pub bound_bits: f64,
}

/// Rows sorted by `(d, δ)`. Every `δ` is validated before any row is made.
pub fn bound_table(dims: &[usize], deltas: &[f64]) -> Result<Vec<BoundRow>> {
    for &delta in deltas {
        validate_delta(delta)?;
    }
    if dims.contains(&0) {
        return Err(Error::ZeroDimension);
    }
    let mut dims = dims.to_vec();
    dims.sort_unstable();
    dims.dedup();
    let mut deltas = deltas.to_vec();
    deltas.sort_by(f64::total_cmp);
    deltas.dedup();
    let mut rows = Vec::new();
    for &d in &dims {
        for &delta in &deltas {
            rows.push(BoundRow { d, delta, bound_bits: counting_bound(d, delta)? });
        }
    }
    Ok(rows)
}

// ---- lemma campaign ----

#[derive(Clone, Debug, Serialize)]
pub struct LemmaConfig {
    pub dims: Vec<usize>,
    pub deltas: Vec<f64>,
    pub instances: usize,
    pub budget: SearchBudget,
}

impl LemmaConfig {
    pub fn new(dims: Vec<usize>, deltas: Vec<f64>, instances: usize, seed: u64) -> Self {
        LemmaConfig {
            dims,
            deltas,
            instances,
            budget: SearchBudget { seed, ..SearchBudget::default() },
        }
    }

    fn validate(&self) -> Result<()> {
        if self.dims.is_empty() || self.deltas.is_empty() {
            return Err(Error::InvalidParameter("dims and deltas must be non-empty".into()));
        }
        if let Some(&d) = self.dims.iter().find(|&&d| d == 0 || d > MAX_LEMMA_DIM) {
            return Err(Error::InvalidParameter(format!("dimension {d} outside 1..={MAX_LEMMA_DIM}")));
        }
        if self.instances > MAX_INSTANCES {
            return Err(Error::InvalidParameter(format!(
                "{} instances exceeds {MAX_INSTANCES}",
                self.instances
            )));
        }
        self.deltas.iter().try_for_each(|&d| validate_delta(d))
    }
}

/// Which random channel an instance uses.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "family", rename_all = "kebab-case")]
pub enum CampaignChannel {
    Identity,
    /// Induced by a Haar isometry `C^d → C^d ⊗ C^d`.
    HaarIsometry,
    /// `(1−q) U·U† + q R` with `R` a Haar-isometry channel.
    NoisyUnitary { q: f64 },
}

#[derive(Clone, Debug, Serialize)]
pub struct LemmaCell {
    pub dim: usize,
    pub delta: f64,
    /// `None` for the identity cells.
    pub instance: Option<usize>,
    pub channel: CampaignChannel,
    pub report: CountingReport,
    /// Replay of the proof chain on the found witnesses; `None` when no
    /// target was reached (the claim is then vacuous).
    pub chain: Option<ProofChain>,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct LemmaReport {
    pub schema_version: u32,
    pub command: &'static str,
    pub version: &'static str,
    pub seed: u64,
    pub config: LemmaConfig,
    pub cells: Vec<LemmaCell>,
    pub cell_count: usize,
    pub failed: usize,
    pub all_pass: bool,
}

fn basis_targets(d: usize) -> Vec<PureState> {
    (0..d).map(|k| PureState::basis_index(Space::Plain(d), k).expect("in range")).collect()
}

fn campaign_channel(d: usize, instance: usize, seed: u64) -> (Channel, CampaignChannel) {
    let mut rng = stream_rng(seed, ((d as u64) << 32) | instance as u64);
    if instance % 2 == 0 {
        (random_channel(d, d, &mut rng), CampaignChannel::HaarIsometry)
    } else {
        let q = rng.random_range(0.0..MAX_CAMPAIGN_NOISE);
        (random_noisy_unitary(d, q, &mut rng), CampaignChannel::NoisyUnitary { q })
    }
}

/// Searches every basis target once, then scores each tolerance.
fn lemma_cells(
    e: &Channel,
    kind: CampaignChannel,
    instance: Option<usize>,
    deltas: &[f64],
    budget: &SearchBudget,
) -> Result<Vec<LemmaCell>> {
    let d = e.in_dim();
    let targets = basis_targets(d);
    let max_delta = deltas.iter().copied().fold(0.0, f64::max);
    let stream_base = ((d as u64) << 40) | (instance.map_or(u32::MAX as u64, |i| i as u64) << 8);
    let outcomes = targets
        .iter()
        .enumerate()
        .map(|(k, t)| minimize_distance(e, t, max_delta, &budget.with_stream(stream_base | k as u64)))
        .collect::<Result<Vec<_>>>()?;
    deltas
        .iter()
        .map(|&delta| {
            let report = CountingReport::from_outcomes(e, &targets, &outcomes, delta)?;
            let chain = if report.witnesses.is_empty() {
                None
            } else {
                let inputs: Vec<_> = report.witnesses.iter().map(|w| w.input.clone()).collect();
                let reached: Vec<_> = report.witnesses.iter().map(|w| w.target.clone()).collect();
                Some(replay_proof_chain(e, &inputs, &reached, delta)?)
            };
            let pass = report.pass && chain.as_ref().is_none_or(ProofChain::holds);
            Ok(LemmaCell { dim: d, delta, instance, channel: kind, report, chain, pass })
        })
        .collect()
}

/// Counting-argument campaign: for every dimension, an identity channel
/// plus `instances` seeded random channels (alternating Haar-isometry and
/// noisy-unitary), scored at every tolerance with the proof chain replayed.
pub fn verify_lemma(config: &LemmaConfig) -> Result<LemmaReport> {
    config.validate()?;
    let mut jobs = Vec::new();
    for &d in &config.dims {
        jobs.push((d, None));
        jobs.extend((0..config.instances).map(|i| (d, Some(i))));
    }
    let seed = config.budget.seed;
    let results = parallel::map_indexed(jobs.len(), |j| {
        let (d, instance) = jobs[j];
        let (e, kind) = match instance {
            None => (Channel::identity(d), CampaignChannel::Identity),
            Some(i) => campaign_channel(d, i, seed),
        };
        lemma_cells(&e, kind, instance, &config.deltas, &config.budget)
    });
    let mut cells = Vec::new();
    for r in results {
        cells.extend(r?);
    }
    let failed = cells.iter().filter(|c| !c.pass).count();
    Ok(LemmaReport {
        schema_version: SCHEMA_VERSION,
        command: "verify-lemma",
        version: VERSION,
        seed,
        config: config.clone(),
        cell_count: cells.len(),
        failed,
        all_pass: failed == 0,
        cells,
    })
}

// ---- enumeration ----

#[derive(Clone, Debug, Serialize)]
pub struct EnumerateSummary {
    pub count: usize,
    pub log2_count: Option<f64>,
    pub bound_at_delta: f64,
    pub delta_eff: f64,
    /// Counting bound at `δ + ε`; `None` when `δ + ε ≥ 1/(2e)`.
    pub bound_at_delta_eff: Option<f64>,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct EnumerateReport {
    pub schema_version: u32,
    pub command: &'static str,
    pub version: &'static str,
    pub seed: u64,
    pub net: NetConfig,
    pub catalog: OutputCatalog,
    pub summary: EnumerateSummary,
}

pub fn summarize(catalog: &OutputCatalog) -> Result<EnumerateSummary> {
    let bound_at_delta = catalog.bound()?;
    let (delta_eff, bound_at_delta_eff) = catalog.inflated_bound();
    let log2_count = catalog.log2_count();
    let within = |b: f64| log2_count.is_none_or(|l| l <= b + 1e-9);
    Ok(EnumerateSummary {
        count: catalog.len(),
        log2_count,
        bound_at_delta,
        delta_eff,
        bound_at_delta_eff,
        pass: within(bound_at_delta) && bound_at_delta_eff.is_none_or(within),
    })
}

/// Catalog for one machine, requiring `δ > ε` so that the catalog is
/// complete up to the net resolution.
pub fn enumerate(spec: MachineSpec, delta: f64, net: NetConfig) -> Result<EnumerateReport> {
    validate_delta(delta)?;
    if delta <= net.epsilon {
        return Err(Error::DeltaBelowNetEpsilon { delta, epsilon: net.epsilon });
    }
    if net.n != spec.n {
        return Err(Error::DimensionMismatch { expected: spec.n, found: net.n });
    }
    let machine = QuantumMachine::new(spec)?;
    let state_net = StateNet::build(net)?;
    let catalog = enumerate_outputs(&machine, delta, &state_net)?;
    let summary = summarize(&catalog)?;
    Ok(EnumerateReport {
        schema_version: SCHEMA_VERSION,
        command: "enumerate",
        version: VERSION,
        seed: spec.seed,
        net,
        catalog,
        summary,
    })
}

// ---- net check ----

#[derive(Clone, Debug, Serialize)]
pub struct NetCheckReport {
    pub schema_version: u32,
    pub command: &'static str,
    pub version: &'static str,
    pub seed: u64,
    pub config: NetConfig,
    pub fingerprint: String,
    pub size: usize,
    pub certificate: CoverageCertificate,
    pub pass: bool,
}

pub fn net_check(n: usize, epsilon: Option<f64>, seed: u64) -> Result<NetCheckReport> {
    if n > 3 {
        return Err(Error::InvalidParameter(format!("nets are built for n ≤ 3, got {n}")));
    }
    let mut config = NetConfig::default_for(n).with_seed(seed);
    if let Some(eps) = epsilon {
        config = NetConfig::new(n, eps).with_seed(seed);
    }
    let net = StateNet::build(config)?;
    let certificate = net.certify(CERTIFICATE_SAMPLES);
    Ok(NetCheckReport {
        schema_version: SCHEMA_VERSION,
        command: "net-check",
        version: VERSION,
        seed,
        config,
        fingerprint: net.fingerprint(),
        size: net.len(),
        pass: certificate.passed(),
        certificate,
    })
}

// ---- complexity scan ----

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ComplexityRow {
    pub x: BitString,
    pub complexity: Option<usize>,
}

/// `C(x)` for every `x` of length ≤ 4 and each extra target, in string
/// order, from one pass over all programs of at most `lmax` bits.
pub fn complexity_scan(lmax: usize, targets: &[BitString]) -> Result<Vec<ComplexityRow>> {
    if lmax > MAX_PROGRAM_BITS {
        return Err(Error::InvalidParameter(format!("lmax {lmax} exceeds {MAX_PROGRAM_BITS}")));
    }
    let table = complexity_table(lmax)?;
    let xs: BTreeSet<BitString> = BitString::all_up_to(4).chain(targets.iter().cloned()).collect();
    Ok(xs
        .into_iter()
        .map(|x| ComplexityRow { complexity: table.get(&x).copied(), x })
        .collect())
}

/// `qc_counting_bound` re-exported for report consumers.
pub fn string_space_bound(n: usize, delta: f64) -> Result<f64> {
    qc_counting_bound(n, delta)
}

/// Largest admissible tolerance, for messages.
pub const fn delta_limit() -> f64 {
    DELTA_LIMIT
}

/// Default machine spec for a family name, used by the CLI.
pub fn machine_spec(family: &str, n: usize, seed: u64) -> Result<MachineSpec> {
    let family: Family = family.parse()?;
    Ok(MachineSpec::new(family, n, seed))
}
