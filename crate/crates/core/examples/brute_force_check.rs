//! Exhaustive oracles against the fast routines: the 8! joint permutations
//! of a qubit and a four-level environment, and the catalytic permutations
//! available to a product state.

use catalytic_erasure::catalyst::solve_catalyst;
use catalytic_erasure::optimal_erasure::build_vse;
use catalytic_erasure::oracle::{
    brute_force_best_marginal, brute_force_catalytic_min_env_entropy, random_correlated_joint, MarginalObjective,
};
use catalytic_erasure::qstate::{shannon_entropy, thermal_state, EnergyLadder, ProbDist};

fn main() -> catalytic_erasure::Result<()> {
    let ladder = EnergyLadder::uniform(4, 1.0);
    let p_e = thermal_state(&ladder, 0.8);
    let p_s = ProbDist::new(vec![0.6, 0.4])?;
    let out = build_vse(&p_s, &p_e)?;
    let spectrum = ProbDist::new(out.joint_sorted.clone())?;
    let brute = brute_force_best_marginal(&spectrum, 2, 4, &MarginalObjective::MinSystemEntropy)?;
    println!("block sort S(sigma_s) = {:.15}", shannon_entropy(&out.sigma_s));
    println!("exhaustive minimum    = {:.15}", brute.value);

    let catalyst = solve_catalyst(0.4, 0.1, 0.2, 0.3, 3)?.spectrum;
    let joint = random_correlated_joint(2, 2, 7, false);
    let best = brute_force_catalytic_min_env_entropy(&joint, &catalyst, 1e-12)?;
    println!("\nproduct state S_e     = {:.15}", joint.marginal_entropy(1));
    println!("best catalytic S_e    = {:.15}", best);
    Ok(())
}
