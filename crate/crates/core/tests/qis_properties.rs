mod common;

use proptest::prelude::*;
use qcount::counting::{eta, fannes_bound, fannes_check, Ensemble, FannesStatus};
use qcount::qis::{relative_entropy, trace_distance, von_neumann_entropy, DensityOperator, Space};
use qcount::random::{random_channel, random_density, random_pure_state, seeded_rng};

use common::{entropy_oracle, trace_distance_svd};

fn states(dim: usize, seed: u64, count: usize) -> Vec<DensityOperator> {
    let mut rng = seeded_rng(seed);
    let space = Space::Plain(dim);
    (0..count)
        .map(|k| if k % 3 == 2 { random_pure_state(space, &mut rng).to_density() } else { random_density(space, &mut rng) })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn trace_distance_is_a_metric(dim in 1usize..=8, seed in any::<u64>()) {
        let s = states(dim, seed, 3);
        let (a, b, c) = (&s[0], &s[1], &s[2]);
        let ab = trace_distance(a, b).unwrap();
        prop_assert!((ab - trace_distance_svd(a.matrix(), b.matrix())).abs() < 1e-10);
        prop_assert!((0.0..=1.0 + 1e-12).contains(&ab));
        prop_assert!((ab - trace_distance(b, a).unwrap()).abs() < 1e-12);
        prop_assert!(trace_distance(a, a).unwrap() < 1e-12);
        let ac = trace_distance(a, c).unwrap();
        let bc = trace_distance(b, c).unwrap();
        prop_assert!(ac <= ab + bc + 1e-12);
    }

    #[test]
    fn entropy_is_bounded_by_log_dimension(dim in 1usize..=8, seed in any::<u64>()) {
        for rho in states(dim, seed, 3) {
            let s = von_neumann_entropy(&rho);
            prop_assert!((s - entropy_oracle(&rho)).abs() < 1e-9);
            prop_assert!(s >= -1e-12 && s <= (dim as f64).log2() + 1e-12);
        }
    }

    #[test]
    fn klein_inequality(dim in 1usize..=8, seed in any::<u64>()) {
        let s = states(dim, seed, 2);
        let r = relative_entropy(&s[0], &s[1]).unwrap();
        prop_assert!(r >= -1e-10);
        prop_assert!(relative_entropy(&s[0], &s[0]).unwrap().abs() < 1e-9);
        // Pinsker: S(ρ‖σ) ≥ (2/ln 2) T².
        let t = trace_distance(&s[0], &s[1]).unwrap();
        prop_assert!(r + 1e-9 >= 2.0 / std::f64::consts::LN_2 * t * t);
    }

    #[test]
    fn trace_distance_contracts_under_channels(d_in in 1usize..=6, d_out in 1usize..=6, seed in any::<u64>()) {
        let s = states(d_in, seed, 2);
        let e = random_channel(d_in, d_out, &mut seeded_rng(seed ^ 0x5eed));
        let before = trace_distance(&s[0], &s[1]).unwrap();
        let after = trace_distance(&e.apply(&s[0]).unwrap(), &e.apply(&s[1]).unwrap()).unwrap();
        prop_assert!(after <= before + 1e-9);
    }

    #[test]
    fn relative_entropy_contracts_under_channels(d_in in 1usize..=6, d_out in 1usize..=6, seed in any::<u64>()) {
        let mut rng = seeded_rng(seed);
        let space = Space::Plain(d_in);
        // Full-rank states keep both sides finite.
        let (a, b) = (random_density(space, &mut rng), random_density(space, &mut rng));
        let e = random_channel(d_in, d_out, &mut rng);
        let before = relative_entropy(&a, &b).unwrap();
        let after = relative_entropy(&e.apply(&a).unwrap(), &e.apply(&b).unwrap()).unwrap();
        prop_assert!(after <= before + 1e-8);
    }

    #[test]
    fn holevo_forms_agree(dim in 1usize..=8, members in 1usize..=5, seed in any::<u64>()) {
        let s = states(dim, seed, members);
        let mut rng = seeded_rng(seed.wrapping_add(1));
        let raw: Vec<f64> = (0..members).map(|_| rand::Rng::random_range(&mut rng, 0.05..1.0)).collect();
        let total: f64 = raw.iter().sum();
        let ens = Ensemble::new(raw.iter().map(|w| w / total).collect(), s).unwrap();
        prop_assert!((ens.chi() - ens.chi_relative()).abs() < 1e-8);
        prop_assert!(ens.chi() <= (dim as f64).log2() + 1e-9);
        prop_assert!(ens.chi() <= -raw.iter().map(|w| w / total).map(|p| p * p.log2()).sum::<f64>() + 1e-9);
    }

    #[test]
    fn fannes_inequality(dim in 2usize..=8, seed in any::<u64>()) {
        let s = states(dim, seed, 2);
        let report = fannes_check(&s[0], &s[1]).unwrap();
        let t = trace_distance(&s[0], &s[1]).unwrap();
        let gap = (von_neumann_entropy(&s[0]) - von_neumann_entropy(&s[1])).abs();
        if t <= (-1.0f64).exp() {
            prop_assert_eq!(report.status, FannesStatus::Pass);
            prop_assert!(gap <= fannes_bound(t, dim) + 1e-8);
        }
    }
}

#[test]
fn eta_matches_binary_entropy_shape() {
    for x in [0.01, 0.1, 0.25, 0.5, 0.9] {
        assert!((eta(x) + eta(1.0 - x) - common::binary_entropy(x)).abs() < 1e-12);
    }
    assert_eq!(eta(0.0), 0.0);
}

#[test]
fn fannes_qubit_worked_example() {
    let rho = DensityOperator::diagonal(Space::Plain(2), &[0.9, 0.1]).unwrap();
    let sigma = DensityOperator::diagonal(Space::Plain(2), &[1.0, 0.0]).unwrap();
    let r = fannes_check(&rho, &sigma).unwrap();
    assert!((r.entropy_gap - 0.46900).abs() < 1e-4, "{r:?}");
    assert!((r.bound - 0.66439).abs() < 1e-4, "{r:?}");
    assert_eq!(r.status, FannesStatus::Pass);
}
