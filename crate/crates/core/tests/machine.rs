mod common;

use std::collections::BTreeMap;

use proptest::prelude::*;
use qcount::machine::{
    classical_complexity, complexity_table, decode, make_machine, run_classical, ClassicalMachine, Family,
    MachineSpec, ProgramJson, QuantumMachine,
};
use qcount::qis::{trace_distance, von_neumann_entropy, BitString, DensityOperator, StringBasis};
use qcount::random::{random_density, seeded_rng};

fn s(x: &str) -> BitString {
    x.parse().unwrap()
}

/// Independent interpreter working on the textual program, following the
/// documented instruction table.
fn oracle_run(program: &str, step_limit: usize) -> Option<String> {
    let bits = program.as_bytes();
    let field = |at: usize, w: usize| -> Option<usize> {
        let chunk = bits.get(at..at + w)?;
        Some(usize::from_str_radix(std::str::from_utf8(chunk).ok()?, 2).ok()?)
    };
    // (opcode, a, e)
    let mut code = Vec::new();
    let mut at = 0;
    while at < bits.len() {
        let op = field(at, 3)?;
        let (a, e, width) = match op {
            0..=2 => (0, 0, 3),
            3 => (field(at + 3, 3)?, 0, 6),
            4 => (field(at + 3, 3)?, field(at + 6, 3)?, 9),
            _ => return None,
        };
        code.push((op, a, e));
        at += width;
    }
    if code.is_empty() || code.iter().any(|&(op, a, _)| (op == 3 || op == 4) && a > code.len()) {
        return None;
    }
    let mut tape = String::new();
    let mut pc = 0;
    for _ in 0..step_limit {
        let Some(&(op, a, e)) = code.get(pc) else { return Some(tape) };
        match op {
            0 => return Some(tape),
            1 | 2 => {
                tape.push(if op == 1 { '0' } else { '1' });
                pc += 1;
            }
            3 => pc = a,
            _ => pc = if tape.len() < (1 << e) { a } else { pc + 1 },
        }
    }
    None
}

fn oracle_table(lmax: usize) -> BTreeMap<(usize, String), usize> {
    let mut table = BTreeMap::new();
    for len in 0..=lmax {
        for v in 0..1u32 << len {
            let p: String = (0..len).rev().map(|k| if v >> k & 1 == 1 { '1' } else { '0' }).collect();
            if let Some(x) = oracle_run(&p, 1024) {
                table.entry((x.len(), x)).or_insert(len);
            }
        }
    }
    table
}

#[test]
fn classical_examples() {
    assert_eq!(run_classical(&s("000")), Some(BitString::empty()));
    assert_eq!(run_classical(&s("010000")), Some(s("1")));
    // JMP 0 forever.
    assert_eq!(run_classical(&s("011000")), None);
    assert_eq!(ClassicalMachine { step_limit: 3 }.run(&s("001001001001")), None);
    assert_eq!(run_classical(&s("")), None);
    assert_eq!(run_classical(&s("00")), None);
    assert_eq!(run_classical(&s("101")), None);
    assert!(decode(&s("011010")).is_none());
}

#[test]
fn complexity_table_matches_oracle() {
    let ours = complexity_table(14).unwrap();
    let oracle = oracle_table(14);
    assert_eq!(ours.len(), oracle.len());
    for (x, c) in &ours {
        let key = (x.len(), x.to_bits_string());
        assert_eq!(oracle.get(&key), Some(c), "{x}");
    }
    assert_eq!(classical_complexity(&BitString::empty(), 16).unwrap(), Some(3));
    assert_eq!(ours[&BitString::empty()], 3);
}

#[test]
fn complexity_is_stable_between_search_depths() {
    let at16 = complexity_table(16).unwrap();
    let at20 = complexity_table(20).unwrap();
    for (x, c) in &at16 {
        assert_eq!(at20.get(x), Some(c), "{x}");
    }
    assert!(at20.len() > at16.len());
    // Strings beyond reach at the smaller depth.
    let unreachable = BitString::all_up_to(12).find(|x| !at16.contains_key(x)).unwrap();
    assert_eq!(classical_complexity(&unreachable, 16).unwrap(), None);
    assert!(classical_complexity(&unreachable, 21).is_err());
}

#[test]
fn program_json_round_trip() {
    for p in ["", "1", "010000", "100101110001"] {
        let bits = s(p);
        let json = ProgramJson::encode(&bits);
        assert_eq!(json.decode().unwrap(), bits);
        let text = serde_json::to_string(&json).unwrap();
        let back: ProgramJson = serde_json::from_str(&text).unwrap();
        assert_eq!(back, json);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(512))]

    #[test]
    fn interpreter_agrees_with_oracle(len in 0usize..=18, v in any::<u32>()) {
        let p: String = (0..len).rev().map(|k| if v >> k & 1 == 1 { '1' } else { '0' }).collect();
        let ours = run_classical(&s_or_empty(&p)).map(|x| x.to_bits_string());
        prop_assert_eq!(ours, oracle_run(&p, 1024));
    }
}

fn s_or_empty(p: &str) -> BitString {
    if p.is_empty() { BitString::empty() } else { s(p) }
}

#[test]
fn every_family_induces_a_channel() {
    for family in Family::ALL {
        for n in 0..=3 {
            let m = make_machine(family, n, 42).unwrap();
            let r = m.channel().cptp_report();
            assert!(r.is_cptp(), "{family} n={n}: {r:?}");
            let again = make_machine(family, n, 42).unwrap();
            assert_eq!(m.isometry(), again.isometry());
        }
    }
    assert!(make_machine(Family::Identity, 5, 0).is_err());
    assert!("quantum-turing".parse::<Family>().is_err());
}

#[test]
fn basis_permutation_mirrors_classical_programs() {
    for n in [2, 3, 4] {
        let m = make_machine(Family::BasisPermutation, n, 9).unwrap();
        let basis = m.basis();
        let pi = m.permutation().unwrap();
        let mut sorted = pi.to_vec();
        sorted.sort();
        assert_eq!(sorted, (0..basis.dim()).collect::<Vec<_>>());
        for (i, p) in basis.strings().enumerate() {
            let out = m.run(&DensityOperator::basis_state(basis, &p).unwrap()).unwrap();
            let image = DensityOperator::basis_index(m.space(), pi[i]).unwrap();
            assert!(trace_distance(&out, &image).unwrap() < 1e-12);
        }
        // Every classical output that fits is the image of some input.
        for p in basis.strings() {
            if let Some(x) = run_classical(&p).filter(|x| x.len() <= n) {
                assert!(pi.contains(&basis.index_of(&x).unwrap()), "{x} missing at n={n}");
            }
        }
    }
}

#[test]
fn random_unitary_preserves_spectrum() {
    let m = make_machine(Family::SeededRandomUnitary, 2, 42).unwrap();
    assert_eq!(m.spec().ancilla_count, 0);
    let rho = random_density(m.space(), &mut seeded_rng(4));
    let out = m.run(&rho).unwrap();
    assert!((von_neumann_entropy(&out) - von_neumann_entropy(&rho)).abs() < 1e-10);
    assert!((common::entropy_oracle(&out) - common::entropy_oracle(&rho)).abs() < 1e-9);
}

#[test]
fn full_dephasing_outputs_the_maximally_mixed_state() {
    let m = QuantumMachine::new(MachineSpec::new(Family::DephasingCompose, 1, 3).with_noise(1.0)).unwrap();
    let rho = random_density(m.space(), &mut seeded_rng(2));
    let mixed = DensityOperator::maximally_mixed(m.space());
    assert!(trace_distance(&m.run(&rho).unwrap(), &mixed).unwrap() < 1e-12);
}

#[test]
fn shorter_inputs_embed_and_longer_are_rejected() {
    let m = make_machine(Family::Identity, 2, 0).unwrap();
    let small = DensityOperator::basis_state(StringBasis::new(1).unwrap(), &s("1")).unwrap();
    let out = m.run(&small).unwrap();
    let want = DensityOperator::basis_state(m.basis(), &s("1")).unwrap();
    assert!(trace_distance(&out, &want).unwrap() < 1e-12);
    let long = DensityOperator::basis_state(StringBasis::new(3).unwrap(), &s("101")).unwrap();
    assert!(m.run(&long).is_err());
    // A longer basis that only uses short strings is accepted.
    let padded = DensityOperator::basis_state(StringBasis::new(3).unwrap(), &s("0")).unwrap();
    assert!(m.run(&padded).is_ok());
}

#[test]
fn spec_serializes_as_documented() {
    let spec = MachineSpec::new(Family::SeededRandomUnitary, 2, 42);
    let v: serde_json::Value = serde_json::to_value(spec).unwrap();
    assert_eq!(v, serde_json::json!({"family": "seeded-random-unitary", "n": 2, "seed": 42, "ancilla_count": 0}));
}
