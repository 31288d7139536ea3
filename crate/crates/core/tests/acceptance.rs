//! Acceptance report: one PASS/FAIL line per headline criterion.
//!
//! Runs as a plain binary (`harness = false`) so the lines are never
//! captured. Exits nonzero when a criterion fails, unless it is listed in
//! `KNOWN_RED` with the reason it cannot be met.

mod common;

use std::collections::BTreeSet;
use std::process::Command;
use std::time::{Duration, Instant};

use qcount::channels::Channel;
use qcount::counting::{
    counting_bound, fannes_bound, fannes_check, verify_counting_instance, FannesStatus, SearchBudget, DELTA_LIMIT,
};
use qcount::enumeration::{
    enumerate_outputs_multi, index_program_adaptive, NetConfig, OutputCatalog, StateNet, CERTIFICATE_SAMPLES,
};
use qcount::experiments::{verify_lemma, LemmaConfig};
use qcount::machine::{make_machine, run_classical, Family};
use qcount::qis::{relative_entropy, trace_distance, von_neumann_entropy, BitString, DensityOperator, PureState, Space};
use qcount::random::{random_channel, random_density, seeded_rng, stream_rng};
use rand::Rng;

// Pinned tolerances.
const TOL_BOUND_VALUE: f64 = 1e-4;
const TOL_BOUND_LIMIT: f64 = 1e-6;
const TOL_TIGHT: f64 = 1e-12;
const TOL_FANNES: f64 = 1e-8;
const TOL_FANNES_EXAMPLE: f64 = 1e-4;
const TOL_DP_TRACE: f64 = 1e-9;
const TOL_DP_ENTROPY: f64 = 1e-8;
const TOL_COUNT: f64 = 1e-9;
const LEMMA_BUDGET: Duration = Duration::from_secs(300);
const ENUMERATION_BUDGET: Duration = Duration::from_secs(600);
const RANDOM_SAMPLES: usize = 1000;
const SEED: u64 = 2024;

/// Criteria that fail for a documented reason. They still print FAIL.
const KNOWN_RED: &[(&str, &str)] = &[(
    "net-certificate",
    "an ε = 0.25 trace-distance net for 7×7 density matrices needs far more points than fit in memory",
)];

struct Line {
    name: &'static str,
    pass: bool,
    detail: String,
}

fn bound_arithmetic() -> Line {
    let v = counting_bound(7, 0.125).unwrap();
    let value_ok = (v - 8.6147).abs() <= TOL_BOUND_VALUE;
    let limit_err = (1..=64)
        .map(|d| (counting_bound(d, 1e-9).unwrap() - (d as f64).log2()).abs())
        .fold(0.0, f64::max);
    let rejected = [DELTA_LIMIT, 0.2, 0.5].iter().all(|&d| counting_bound(7, d).is_err());
    Line {
        name: "bound-arithmetic",
        pass: value_ok && limit_err <= TOL_BOUND_LIMIT && rejected,
        detail: format!(
            "counting_bound(7,1/8)={v:.6}; max |bound(d,1e-9)-log2 d| over d≤64 = {limit_err:.2e}; δ≥1/(2e) rejected={rejected}"
        ),
    }
}

fn tightness() -> Line {
    let mut worst: f64 = 0.0;
    let mut ok = true;
    for d in 2..=8 {
        let e = Channel::identity(d);
        let targets: Vec<_> = (0..d).map(|k| PureState::basis_index(Space::Plain(d), k).unwrap()).collect();
        let r = verify_counting_instance(&e, &targets, 0.0, &SearchBudget::default()).unwrap();
        let achieved = r.achieved_log2n.unwrap_or(f64::NAN);
        let gap = (achieved - r.bound_log2n).abs().max((r.bound_log2n - (d as f64).log2()).abs());
        worst = worst.max(gap);
        ok &= r.achieved_count == d && gap <= TOL_TIGHT && e.is_cptp();
    }
    Line {
        name: "tightness",
        pass: ok,
        detail: format!("identity d=2..8 at δ=0: achieved N=d, max |log2 N − bound| = {worst:.1e}"),
    }
}

fn lemma_campaign() -> Line {
    let start = Instant::now();
    let config = LemmaConfig::new(vec![2, 4, 8], vec![0.0, 0.05, 0.1, 0.15], 100, SEED);
    let report = verify_lemma(&config).unwrap();
    let elapsed = start.elapsed();
    let random: Vec<_> = report.cells.iter().filter(|c| c.instance.is_some()).collect();
    let over = report
        .cells
        .iter()
        .filter(|c| c.report.achieved_log2n.is_some_and(|a| a > c.report.bound_log2n + TOL_COUNT))
        .count();
    let chains = report.cells.iter().filter(|c| c.chain.is_some()).count();
    let max_count = random.iter().map(|c| c.report.achieved_count).max().unwrap_or(0);
    Line {
        name: "lemma-campaign",
        pass: report.all_pass && over == 0 && random.len() == 1200 && elapsed < LEMMA_BUDGET,
        detail: format!(
            "{} cells ({} random), {} failed, {} above bound, {} proof chains replayed, max achieved N {}, {:.1}s",
            report.cell_count,
            random.len(),
            report.failed,
            over,
            chains,
            max_count,
            elapsed.as_secs_f64()
        ),
    }
}

/// Pairs `(ρ, (1−λ)ρ + λτ)` at random dimensions, kept when `T ≤ 1/e`.
fn fannes_suite() -> Line {
    let mut rng = seeded_rng(SEED);
    let mut pairs = 0;
    let mut failures = 0;
    let mut worst_margin = f64::INFINITY;
    while pairs < RANDOM_SAMPLES {
        let d = rng.random_range(2..=8);
        let space = Space::Plain(d);
        let rho = random_density(space, &mut rng);
        let tau = if rng.random_bool(0.5) {
            random_density(space, &mut rng)
        } else {
            qcount::random::random_pure_state(space, &mut rng).to_density()
        };
        let lambda: f64 = rng.random_range(0.0..1.0);
        let sigma = DensityOperator::mixture(&[1.0 - lambda, lambda], &[rho.clone(), tau]).unwrap();
        let t = trace_distance(&rho, &sigma).unwrap();
        if t > (-1.0f64).exp() {
            continue;
        }
        pairs += 1;
        let gap = (von_neumann_entropy(&rho) - von_neumann_entropy(&sigma)).abs();
        let margin = fannes_bound(t, d) + TOL_FANNES - gap;
        worst_margin = worst_margin.min(margin);
        if margin < 0.0 || fannes_check(&rho, &sigma).unwrap().status != FannesStatus::Pass {
            failures += 1;
        }
    }
    let rho = DensityOperator::diagonal(Space::Plain(2), &[0.9, 0.1]).unwrap();
    let sigma = DensityOperator::diagonal(Space::Plain(2), &[1.0, 0.0]).unwrap();
    let ex = fannes_check(&rho, &sigma).unwrap();
    let example_ok =
        (ex.entropy_gap - 0.46900).abs() <= TOL_FANNES_EXAMPLE && (ex.bound - 0.66439).abs() <= TOL_FANNES_EXAMPLE;
    Line {
        name: "fannes",
        pass: failures == 0 && example_ok,
        detail: format!(
            "{pairs} pairs d≤8 with T≤1/e, {failures} violations, min slack {worst_margin:.3e}; qubit example gap {:.5} bound {:.5}",
            ex.entropy_gap, ex.bound
        ),
    }
}

fn data_processing() -> Line {
    let mut worst_t: f64 = f64::NEG_INFINITY;
    let mut worst_s: f64 = f64::NEG_INFINITY;
    for i in 0..RANDOM_SAMPLES {
        let mut rng = stream_rng(SEED, i as u64);
        let (d_in, d_out) = (rng.random_range(2..=8), rng.random_range(2..=8));
        let space = Space::Plain(d_in);
        let (a, b) = (random_density(space, &mut rng), random_density(space, &mut rng));
        let e = random_channel(d_in, d_out, &mut rng);
        let (ea, eb) = (e.apply(&a).unwrap(), e.apply(&b).unwrap());
        worst_t = worst_t.max(trace_distance(&ea, &eb).unwrap() - trace_distance(&a, &b).unwrap());
        worst_s = worst_s.max(relative_entropy(&ea, &eb).unwrap() - relative_entropy(&a, &b).unwrap());
    }
    Line {
        name: "data-processing",
        pass: worst_t <= TOL_DP_TRACE && worst_s <= TOL_DP_ENTROPY,
        detail: format!(
            "{RANDOM_SAMPLES} random channels: max increase trace distance {worst_t:.2e}, relative entropy {worst_s:.2e}"
        ),
    }
}

const ENUM_DELTAS: [f64; 3] = [1.0 / 6.0, 1.0 / 8.0, 1.0 / 16.0];
const S_SET_KS: [usize; 3] = [8, 16, 32];

fn enumeration_compliance() -> Line {
    let start = Instant::now();
    let mut cells = 0;
    let mut filtered = 0;
    let mut violations = 0;
    let mut nesting_ok = true;
    let mut meet_ok = true;
    let mut identity_ok = false;
    let mut deltas: Vec<f64> = ENUM_DELTAS.to_vec();
    deltas.extend(S_SET_KS.iter().map(|&k| 1.0 / k as f64));
    for n in [1, 2] {
        let net = StateNet::build(NetConfig::default_for(n)).unwrap();
        let dim = net.basis().dim();
        for family in Family::ALL {
            let m = make_machine(family, n, SEED).unwrap();
            let cats = enumerate_outputs_multi(&m, &deltas, &net).unwrap();
            for cat in &cats[..ENUM_DELTAS.len()] {
                cells += 1;
                let within = |b: f64| cat.log2_count().is_none_or(|l| l <= b + TOL_COUNT);
                if !within(counting_bound(dim, cat.delta).unwrap()) {
                    violations += 1;
                }
                let eff = cat.delta + net.epsilon();
                if eff < DELTA_LIMIT {
                    filtered += 1;
                    if !within(counting_bound(dim, eff).unwrap()) {
                        violations += 1;
                    }
                }
            }
            let mut sorted: Vec<&OutputCatalog> = cats.iter().collect();
            sorted.sort_by(|a, b| a.delta.total_cmp(&b.delta));
            nesting_ok &= sorted.windows(2).all(|w| w[0].string_set().is_subset(&w[1].string_set()));
            let s_sets: Vec<BTreeSet<BitString>> = cats[ENUM_DELTAS.len()..].iter().map(|c| c.string_set()).collect();
            let meet = s_sets[0].iter().filter(|x| s_sets.iter().all(|s| s.contains(x))).count();
            meet_ok &= meet <= 1 << (n + 1);
            if n == 1 && family == Family::Identity {
                identity_ok = cats[..ENUM_DELTAS.len()].iter().all(|c| {
                    c.strings() == vec![BitString::empty(), "0".parse().unwrap(), "1".parse().unwrap()]
                });
            }
        }
    }
    // The default nets put δ + ε above 1/(2e) for every listed δ, so the
    // inflated check is also run on finer nets where it is defined.
    let mut fine_cells = 0;
    for (n, eps) in [(1, 0.1), (2, 0.1)] {
        let net = StateNet::build(NetConfig::new(n, eps)).unwrap();
        let dim = net.basis().dim();
        let delta = 1.0 / 16.0;
        for family in Family::ALL {
            let m = make_machine(family, n, SEED).unwrap();
            let cat = enumerate_outputs_multi(&m, &[delta], &net).unwrap().remove(0);
            fine_cells += 1;
            if cat.log2_count().is_some_and(|l| l > counting_bound(dim, delta + eps).unwrap() + TOL_COUNT) {
                violations += 1;
            }
        }
    }
    let elapsed = start.elapsed();
    Line {
        name: "enumeration-compliance",
        pass: violations == 0 && nesting_ok && meet_ok && identity_ok && elapsed < ENUMERATION_BUDGET,
        detail: format!(
            "{cells} default-net cells checked at δ ({filtered} have δ_eff<1/(2e)); {fine_cells} cells at ε=0.1, δ=1/16 checked at δ_eff; \
             {violations} violations; identity n=1 {{ε,0,1}}={identity_ok}; nesting={nesting_ok}; |∩S_k|≤2^(n+1)={meet_ok}; {:.1}s",
            elapsed.as_secs_f64()
        ),
    }
}

fn adaptive_termination() -> Line {
    let mut instances = 0;
    let mut ok = true;
    let mut max_halvings = 0;
    for n in [1, 2] {
        let net = StateNet::build(NetConfig::default_for(n)).unwrap();
        let cap = 1usize << (n + 1);
        for family in Family::ALL {
            let m = make_machine(family, n, SEED).unwrap();
            for i in 1..=cap + 1 {
                instances += 1;
                match index_program_adaptive(i, &m, &net) {
                    Ok(out) => {
                        ok &= out.catalog_size <= cap && i <= out.catalog_size;
                        max_halvings = max_halvings.max(out.halvings);
                    }
                    Err(qcount::Error::IndexBeyondOutputs { .. }) => {}
                    Err(_) => ok = false,
                }
            }
            ok &= index_program_adaptive(cap + 1, &m, &net).is_err();
        }
    }
    Line {
        name: "adaptive-termination",
        pass: ok,
        detail: format!(
            "{instances} calls over 8 machines terminated; final catalogs ≤ 2^(n+1); i = 2^(n+1)+1 rejected; max halvings {max_halvings}"
        ),
    }
}

fn net_certificate() -> Line {
    let mut parts = Vec::new();
    let mut ok = true;
    for n in [1, 2] {
        let net = StateNet::build(NetConfig::default_for(n)).unwrap();
        let cert = net.certify(CERTIFICATE_SAMPLES);
        ok &= cert.passed();
        parts.push(format!(
            "n={n} ε={} size {}: {} of {} samples checked, {} violations{}, worst {:.4}",
            net.epsilon(),
            net.len(),
            cert.checked,
            CERTIFICATE_SAMPLES,
            cert.violations,
            if cert.truncated { " (stopped early)" } else { "" },
            cert.worst_distance
        ));
    }
    Line { name: "net-certificate", pass: ok, detail: parts.join("; ") }
}

fn embedding() -> Line {
    let mut ok = true;
    let mut parts = Vec::new();
    for n in [1, 2, 3] {
        let net = StateNet::build(NetConfig::default_for(n)).unwrap();
        let m = make_machine(Family::BasisPermutation, n, SEED).unwrap();
        let cat = enumerate_outputs_multi(&m, &[0.0], &net).unwrap().remove(0).string_set();
        let classical: BTreeSet<BitString> =
            m.basis().strings().filter_map(|p| run_classical(&p)).filter(|x| x.len() <= n).collect();
        ok &= classical.is_subset(&cat);
        parts.push(format!("n={n}: {} classical outputs ⊆ catalog of {}", classical.len(), cat.len()));
    }
    Line { name: "embedding", pass: ok, detail: parts.join("; ") }
}

fn determinism() -> Line {
    let bin = env!("CARGO_BIN_EXE_qcount");
    let commands: [&[&str]; 5] = [
        &["--command", "bound-table", "--dims", "2,4,7,8", "--deltas", "0,0.05,0.125"],
        &["--command", "verify-lemma", "--dims", "2,4,8", "--deltas", "0,0.1", "--instances", "4", "--seed", "9"],
        &[
            "--command", "enumerate", "--machine-family", "seeded-random-unitary", "--n", "1", "--delta", "0.16",
            "--net-epsilon", "0.15", "--seed", "9",
        ],
        &["--command", "net-check", "--n", "1", "--seed", "9"],
        &["--command", "complexity-scan", "--lmax", "16"],
    ];
    let dir = tempfile::tempdir().unwrap();
    let mut ok = true;
    let mut runs = 0;
    for (c, args) in commands.iter().enumerate() {
        let mut outputs = Vec::new();
        for (r, threads) in [None, Some("1"), Some("4"), None].into_iter().enumerate() {
            let path = dir.path().join(format!("c{c}r{r}"));
            let mut cmd = Command::new(bin);
            cmd.args(*args).arg("--out").arg(&path);
            match threads {
                Some(t) => cmd.env("QCOUNT_THREADS", t),
                None => cmd.env_remove("QCOUNT_THREADS"),
            };
            let status = cmd.output().unwrap().status;
            ok &= status.success();
            outputs.push(std::fs::read(&path).unwrap_or_default());
            runs += 1;
        }
        ok &= outputs.windows(2).all(|w| w[0] == w[1]) && !outputs[0].is_empty();
    }
    Line {
        name: "determinism",
        pass: ok,
        detail: format!("5 commands × (2 reruns, QCOUNT_THREADS=1, 4): {runs} runs, byte-identical={ok}"),
    }
}

fn main() {
    let criteria: [fn() -> Line; 10] = [
        lemma_campaign,
        tightness,
        bound_arithmetic,
        fannes_suite,
        data_processing,
        enumeration_compliance,
        adaptive_termination,
        net_certificate,
        embedding,
        determinism,
    ];
    let mut unexpected = Vec::new();
    let mut passed = 0;
    for criterion in criteria {
        let line = criterion();
        let known = KNOWN_RED.iter().find(|(name, _)| *name == line.name);
        println!("{} {}: {}", if line.pass { "PASS" } else { "FAIL" }, line.name, line.detail);
        if line.pass {
            passed += 1;
        } else if let Some((_, why)) = known {
            println!("     known red: {why}");
        } else {
            unexpected.push(line.name);
        }
    }
    println!("acceptance: {passed}/{} criteria pass", criteria.len());
    if !unexpected.is_empty() {
        eprintln!("unexpected failures: {unexpected:?}");
        std::process::exit(1);
    }
}
