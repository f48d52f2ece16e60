use catalytic_erasure::jc_sim::{evolve, run_point, ExperimentConfig, JCModel, TimePolicy};
use catalytic_erasure::oracle::{matrix_exp, rng};
use rand::Rng;

#[test]
fn block_evolution_matches_matrix_exponential() {
    let mut r = rng(99);
    for _ in 0..50 {
        let beta = r.random_range(0.4..3.0);
        let t = r.random_range(0.0..6.0);
        let model = JCModel::new(1.0, beta, t).unwrap();
        let n = model.truncation + r.random_range(0..6);
        let model = model.with_truncation(n);
        let analytic = model.unitary();
        let numeric = matrix_exp(&model.hamiltonian(), t);
        let dev = (&analytic - &numeric).iter().map(|z| z.norm()).fold(0.0, f64::max);
        assert!(dev < 1e-9, "beta {beta} t {t} N {n}: deviation {dev:e}");
    }
}

#[test]
fn evolution_is_unitary_on_states() {
    let mut r = rng(5);
    for _ in 0..10 {
        let model = JCModel::new(1.0, r.random_range(0.4..3.0), r.random_range(0.0..4.0)).unwrap();
        let out = evolve(&model).unwrap();
        let spec = out.spectrum();
        assert!(spec.iter().all(|&p| (-1e-10..=1.0 + 1e-10).contains(&p)));
        assert!((spec.iter().sum::<f64>() - 1.0).abs() < 1e-10);
        assert!((out.entropy() - model.initial_state().entropy()).abs() < 1e-10);
    }
}

#[test]
fn sweep_points_are_consistent() {
    let config = ExperimentConfig { time_policy: TimePolicy::MaxErasure { samples: 500 }, ..Default::default() };
    for x in [0.1, 0.3, 0.5] {
        let rec = run_point(-f64::ln(x), &config).unwrap();
        assert!(rec.residual.abs() < 1e-10);
        assert!(rec.dense_catalyst_deviation <= 1e-12);
        assert!(rec.dense_catalyst_coherence <= 1e-12);
        assert!(rec.gamma_e > 0.0);
        assert!(rec.d_i.abs() < rec.i_se);
        // the two forms of the entropy coefficient agree
        let d_se = rec.i_se - rec.d_ss;
        assert!((rec.gamma_e * rec.i_se - rec.gamma_e * (d_se + rec.d_ss)).abs() < 1e-10);
    }
}
