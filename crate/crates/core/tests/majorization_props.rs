use catalytic_erasure::majorization::{
    concentrate, energy_via_partial_sums, majorizes, passive_energy, sorted_descending, DEFAULT_EPS,
};
use catalytic_erasure::oracle::{brute_force_passive_energy, random_majorized, rng};
use catalytic_erasure::qstate::{shannon_entropy, EnergyLadder, ProbDist};
use proptest::prelude::*;

fn dist(d: usize) -> impl Strategy<Value = ProbDist> {
    prop::collection::vec(0.01f64..1.0, d).prop_map(|w| ProbDist::from_weights(w).unwrap())
}

fn ladder(d: usize) -> impl Strategy<Value = EnergyLadder> {
    prop::collection::vec(-3.0f64..3.0, d).prop_map(|mut v| {
        v.sort_by(f64::total_cmp);
        EnergyLadder::new(v).unwrap()
    })
}

proptest! {
    #[test]
    fn majorization_is_a_preorder(p in dist(5), seed in any::<u64>()) {
        let mut r = rng(seed);
        let q = random_majorized(&p, &mut r);
        let s = random_majorized(&q, &mut r);
        prop_assert!(majorizes(&p, &p, DEFAULT_EPS).unwrap());
        prop_assert!(majorizes(&p, &q, DEFAULT_EPS).unwrap());
        prop_assert!(majorizes(&q, &s, DEFAULT_EPS).unwrap());
        prop_assert!(majorizes(&p, &s, DEFAULT_EPS).unwrap());
    }

    #[test]
    fn majorization_is_antisymmetric_up_to_order(p in dist(5), q in dist(5)) {
        if majorizes(&p, &q, 0.0).unwrap() && majorizes(&q, &p, 0.0).unwrap() {
            let (a, b) = (sorted_descending(p.probs()), sorted_descending(q.probs()));
            for (x, y) in a.iter().zip(&b) {
                prop_assert!((x - y).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn majorization_lowers_entropy_and_passive_energy(p in dist(6), l in ladder(6), seed in any::<u64>()) {
        let q = random_majorized(&p, &mut rng(seed));
        prop_assert!(shannon_entropy(&p) <= shannon_entropy(&q) + 1e-12);
        prop_assert!(passive_energy(&l, &p).unwrap() <= passive_energy(&l, &q).unwrap() + 1e-12);
    }

    #[test]
    fn partial_sum_energy_matches_expectation(p in dist(7), l in ladder(7)) {
        let direct = l.expectation(&p).unwrap();
        prop_assert!((energy_via_partial_sums(&l, &p).unwrap() - direct).abs() < 1e-12);
    }

    #[test]
    fn passive_energy_matches_enumeration(d in 2usize..=6, seed in any::<u64>()) {
        let mut r = rng(seed);
        let p = catalytic_erasure::oracle::random_distribution(d, &mut r);
        let l = EnergyLadder::uniform(d, 0.8);
        let brute = brute_force_passive_energy(&l, &p).unwrap();
        prop_assert!((brute - passive_energy(&l, &p).unwrap()).abs() < 1e-14);
    }

    #[test]
    fn concentration_majorizes_its_input(p in dist(6), frac in 0.0f64..=1.0, a in 0usize..6, b in 0usize..6) {
        prop_assume!(a != b && p.probs()[a] > p.probs()[b]);
        let out = concentrate(&p, a, b, frac * p.probs()[b]).unwrap();
        prop_assert!(majorizes(&out, &p, DEFAULT_EPS).unwrap());
    }
}
