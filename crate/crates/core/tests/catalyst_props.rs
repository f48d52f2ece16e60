use catalytic_erasure::catalyst::{
    apply_catalytic, build_permutation, find_witnesses, solve_for_witness, CorrelationWitness,
};
use catalytic_erasure::majorization::{descending_order, majorizes};
use catalytic_erasure::oracle::{catalyst_linear_solve, random_correlated_joint, rng};
use catalytic_erasure::qstate::{mutual_information, EnergyLadder, JointState, ProbDist};
use catalytic_erasure::Error;
use proptest::prelude::*;
use rand::Rng;

/// Heat of `after - before` on random ascending energies assigned so that
/// `before` is passive: the most populated level gets the lowest energy.
fn passive_heat(before: &ProbDist, after: &ProbDist, seed: u64) -> f64 {
    let mut r = rng(seed);
    let mut levels: Vec<f64> = (0..before.len()).map(|_| r.random_range(0.0..4.0)).collect();
    levels.sort_by(f64::total_cmp);
    descending_order(before.probs())
        .iter()
        .enumerate()
        .map(|(rank, &j)| levels[rank] * (after.probs()[j] - before.probs()[j]))
        .sum()
}

fn joints() -> impl Strategy<Value = (JointState, bool)> {
    (2usize..=4, 2usize..=4, any::<u64>(), any::<bool>())
        .prop_map(|(d_s, d_e, seed, corr)| (random_correlated_joint(d_s, d_e, seed, corr), corr))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn witnesses_exist_exactly_for_correlated_states((joint, _) in joints()) {
        let ws = find_witnesses(&joint).unwrap();
        prop_assert_eq!(ws.is_empty(), mutual_information(&joint) < 1e-12);
    }

    #[test]
    fn catalytic_step_preserves_and_helps(d_s in 2usize..=4, d_e in 2usize..=4, d_v in 3usize..=6, seed in any::<u64>()) {
        let joint = random_correlated_joint(d_s, d_e, seed, true);
        for w in find_witnesses(&joint).unwrap() {
            let Ok(sol) = solve_for_witness(&w, d_v) else { continue };
            let perm = build_permutation(&w, d_v);
            let (_, rep) = apply_catalytic(&joint, &sol, &perm).unwrap();
            prop_assert!(rep.catalyst_deviation() <= 1e-12);
            prop_assert!(rep.system_deviation() <= 1e-12);
            prop_assert!(rep.entropy_change_env <= 1e-12 || !w.receiver_dominant);
            if w.receiver_dominant {
                prop_assert!(majorizes(&rep.env_after, &rep.env_before, 1e-12).unwrap());
                prop_assert!(passive_heat(&rep.env_before, &rep.env_after, seed) <= 1e-12);
                let flat = EnergyLadder::uniform(d_e, 1.3);
                prop_assert!(rep.passive_heat_change(&flat).unwrap() <= 1e-12);
            }

            // bookkeeping: J gains and J' loses (d_v - 2) delta
            let moved = sol.environment_transfer();
            for j in 0..d_e {
                let expected = rep.env_before.probs()[j]
                    + if j == w.j { moved } else if j == w.j_prime { -moved } else { 0.0 };
                prop_assert!((rep.env_after.probs()[j] - expected).abs() <= 1e-15);
            }
        }
    }

    #[test]
    fn closed_form_matches_linear_solve(d_s in 2usize..=4, d_e in 2usize..=4, d_v in 3usize..=8, seed in any::<u64>()) {
        let joint = random_correlated_joint(d_s, d_e, seed, true);
        let ws = find_witnesses(&joint).unwrap();
        let w: &CorrelationWitness = &ws[(seed % ws.len() as u64) as usize];
        match solve_for_witness(w, d_v) {
            Ok(sol) => {
                let (p, delta) = catalyst_linear_solve(w.q_ij, w.q_ijp, w.q_ipj, w.q_ipjp, d_v).unwrap();
                prop_assert!((delta - sol.delta).abs() < 1e-12);
                for (a, b) in p.iter().zip(sol.spectrum.probs()) {
                    prop_assert!((a - b).abs() < 1e-12);
                }
            }
            Err(Error::CatalystInfeasible { .. }) => {}
            Err(e) => prop_assert!(false, "unexpected error {e}"),
        }
    }
}
