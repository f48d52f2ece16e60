//! Block-sorting erasure of a qubit into a thermal four-level ladder whose
//! ratios are twice the qubit's: the environment ends thermal at half the
//! inverse temperature and the heat meets its minimum.

use catalytic_erasure::optimal_erasure::check_erasure;
use catalytic_erasure::qstate::{thermal_state, EnergyLadder, ProbDist};

fn main() -> catalytic_erasure::Result<()> {
    let (beta, omega) = (1.0, 1.0);
    let ladder = EnergyLadder::uniform(4, omega);
    let p_e = thermal_state(&ladder, beta);
    let r = (beta * omega / 2.0f64).exp();
    let p_s = ProbDist::new(vec![r / (1.0 + r), 1.0 / (1.0 + r)])?;

    let check = check_erasure(&p_s, &p_e, &ladder)?;
    println!("condition       {:?}", check.periodicity.condition);
    println!("bounds          {:?}", check.bounds);
    if let (Some(s), Some(e)) = (&check.sigma_s, &check.sigma_e) {
        println!("sigma_s         {:?}", s.probs());
        println!("sigma_e         {:?}", e.probs());
    }
    println!("dS_s            {:.6}", check.d_ss);
    println!("thermal at      {:?} x beta", check.gamma);
    println!("heat            {:?}", check.achieved_heat);
    println!("minimal heat    {:?}", check.min_heat);
    Ok(())
}
