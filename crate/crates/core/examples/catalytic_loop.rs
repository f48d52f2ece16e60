//! A correlated qubit-qutrit state, its correlation witnesses, and the
//! three-level catalyst that lowers the environment entropy.

use catalytic_erasure::catalyst::{apply_catalytic, build_permutation, find_witnesses, solve_for_witness};
use catalytic_erasure::qstate::{mutual_information, EnergyLadder, JointState};

fn main() -> catalytic_erasure::Result<()> {
    let joint = JointState::classical(&[2, 3], vec![0.30, 0.20, 0.10, 0.25, 0.10, 0.05])?;
    let ladder = EnergyLadder::uniform(3, 1.0);
    println!("I(s:e) = {:.6}", mutual_information(&joint));

    let witnesses = find_witnesses(&joint)?;
    for w in &witnesses {
        println!(
            "witness {:?}: ratios {:.4} > {:.4}, receiver dominant {}",
            w.one_based(),
            w.ratio_strong(),
            w.ratio_weak(),
            w.receiver_dominant
        );
    }

    let d_v = 3;
    for w in witnesses.iter().filter(|w| w.receiver_dominant) {
        let sol = match solve_for_witness(w, d_v) {
            Ok(s) => s,
            Err(e) => {
                println!("{:?}: {e}", w.one_based());
                continue;
            }
        };
        let (_, rep) = apply_catalytic(&joint, &sol, &build_permutation(w, d_v))?;
        println!("\ncatalyst for {:?}: {:?}, delta {:.6}", w.one_based(), sol.spectrum.probs(), sol.delta);
        println!("  environment {:?} -> {:?}", rep.env_before.probs(), rep.env_after.probs());
        println!("  dS_e = {:.6}, dI = {:.6}", rep.entropy_change_env, rep.delta_mutual_info());
        println!("  heat change {:.6}", rep.heat_change(&ladder)?);
        println!(
            "  catalyst drift {:.1e}, system drift {:.1e}",
            rep.catalyst_deviation(),
            rep.system_deviation()
        );
    }
    Ok(())
}
