//! Passive energy, its partial-sum form, and the brute-force minimum.

use catalytic_erasure::majorization::{energy_via_partial_sums, majorizes, passive_arrangement, passive_energy};
use catalytic_erasure::oracle::brute_force_passive_energy;
use catalytic_erasure::qstate::{EnergyLadder, ProbDist};

fn main() -> catalytic_erasure::Result<()> {
    let ladder = EnergyLadder::new(vec![0.0, 0.4, 1.1, 1.5, 2.7])?;
    let p = ProbDist::new(vec![0.05, 0.30, 0.10, 0.40, 0.15])?;

    let passive = passive_arrangement(&p);
    println!("populations     {:?}", p.probs());
    println!("passive order   {:?}", passive.probs());
    println!("energy as given {:.6}", ladder.expectation(&p)?);
    println!("passive energy  {:.6}", passive_energy(&ladder, &p)?);
    println!("partial sums    {:.6}", energy_via_partial_sums(&ladder, &passive)?);
    println!("brute force     {:.6}", brute_force_passive_energy(&ladder, &p)?);

    // a sharper distribution has lower passive energy
    let sharper = ProbDist::new(vec![0.02, 0.25, 0.08, 0.55, 0.10])?;
    println!(
        "sharper majorizes: {}, passive energy {:.6}",
        majorizes(&sharper, &p, 1e-12)?,
        passive_energy(&ladder, &sharper)?
    );
    Ok(())
}
