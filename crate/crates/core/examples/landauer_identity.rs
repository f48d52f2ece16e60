//! Random unitary on a qubit and a thermal qutrit: heat, entropy and
//! correlation terms of the Landauer balance.

use catalytic_erasure::oracle::random_unitary;
use catalytic_erasure::qstate::{landauer_decomposition, thermal_state, EnergyLadder, JointState, ProbDist};

fn main() -> catalytic_erasure::Result<()> {
    let beta = 1.2;
    let ladder = EnergyLadder::uniform(3, 1.0);
    let rho_e = thermal_state(&ladder, beta);
    let rho_s = ProbDist::new(vec![0.55, 0.45])?;

    for seed in 0..5 {
        let u = random_unitary(6, seed);
        let init = JointState::product(&[&rho_s, &rho_e])?.to_matrix();
        let after = JointState::dense(&[2, 3], &u * init * u.adjoint())?;
        let rec = landauer_decomposition(&ladder, &rho_e, &after, &rho_s, Some(beta))?;
        println!(
            "seed {seed}: beta Q = {:+.6}  -dS_s = {:+.6}  I = {:.6}  D = {:.6}  residual {:.1e}",
            beta * rec.q_e,
            -rec.d_ss,
            rec.i_se,
            rec.relent,
            rec.residual()
        );
    }
    Ok(())
}
