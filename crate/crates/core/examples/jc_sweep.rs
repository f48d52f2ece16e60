//! Sweeps the oscillator temperature and prints the catalytic coefficients.
//!
//!     cargo run --release --example jc_sweep

use catalytic_erasure::jc_sim::{betas_for, linspace, run_experiment, ExperimentConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let config = ExperimentConfig { scan_all_witnesses: true, ..ExperimentConfig::default() };
    let xs = linspace(0.05, 0.65, 13);
    let records = run_experiment(&betas_for(&xs, config.omega), &config)?;

    println!("{:>6} {:>6} {:>4} {:>9} {:>9} {:>9} {:>9} {:>9} {:>3}", "x", "t", "N", "-dSs", "I(s:e)", "gamma_H", "gamma_E", "all_wit", "dv");
    for r in &records {
        println!(
            "{:>6.3} {:>6.3} {:>4} {:>9.5} {:>9.5} {:>9.5} {:>9.5} {:>9.5} {:>3}",
            r.x,
            r.t,
            r.truncation,
            -r.d_ss,
            r.i_se,
            r.gamma_h,
            r.gamma_e,
            r.gamma_h_all_witnesses.unwrap_or(f64::NAN),
            r.best_dv
        );
    }
    let peak = records
        .iter()
        .max_by(|a, b| a.gamma_h.total_cmp(&b.gamma_h))
        .expect("non-empty sweep");
    println!("peak gamma_H = {:.4} at x = {:.3} (d_v = {})", peak.gamma_h, peak.x, peak.best_dv);
    Ok(())
}
