//! Erasure of a qubit by a thermal harmonic oscillator under the resonant
//! Jaynes-Cummings coupling, followed by the catalytic step.
//!
//! Units have the coupling `g = 1`. The qubit has levels `0, omega` and the
//! oscillator `omega, 2 omega, ...` (a constant shift drops out of every
//! heat). Basis states `|s, n>` are flattened as `s * N + n`.

use std::f64::consts::PI;
use std::ops::RangeInclusive;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::catalyst::{
    apply_catalytic, optimize_dv, ErasureContext, MitigationReport, Objective, OptimizedCatalyst, WitnessPolicy,
};
use crate::error::{Error, Result};
use crate::qstate::{
    landauer_decomposition, mutual_information, shannon_entropy, thermal_state, CMatrix, EnergyLadder,
    JointState, ProbDist,
};

/// Largest thermal weight the truncation may discard.
pub const TAIL_TOL: f64 = 1e-10;
pub const MIN_TRUNCATION: usize = 12;

/// The catalytic loop runs on the system levels `(I, I') = (1, 0)` and the
/// two lowest oscillator levels `(J, J') = (0, 1)`.
pub const LOOP_TUPLE: [usize; 4] = [1, 0, 0, 1];

/// Smallest truncation whose discarded thermal weight `x^N` is below
/// [`TAIL_TOL`], with `x = exp(-beta omega)`.
pub fn required_truncation(beta: f64, omega: f64) -> Result<usize> {
    let x = (-beta * omega).exp();
    if !(beta > 0.0 && omega > 0.0 && x < 1.0) {
        return Err(Error::Precondition(format!("need beta, omega > 0 (got {beta}, {omega})")));
    }
    let n = (TAIL_TOL.ln() / x.ln()).floor() as usize + 1;
    Ok(n.max(MIN_TRUNCATION))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JCModel {
    pub omega: f64,
    pub beta: f64,
    pub truncation: usize,
    pub time: f64,
    /// Initial qubit populations; maximally mixed by default.
    pub system: ProbDist,
}

impl JCModel {
    pub fn new(omega: f64, beta: f64, time: f64) -> Result<Self> {
        if !time.is_finite() {
            return Err(Error::Precondition(format!("time {time} is not finite")));
        }
        Ok(JCModel {
            omega,
            beta,
            truncation: required_truncation(beta, omega)?,
            time,
            system: ProbDist::uniform(2),
        })
    }

    pub fn with_truncation(mut self, truncation: usize) -> Self {
        self.truncation = truncation;
        self
    }

    pub fn with_time(mut self, time: f64) -> Self {
        self.time = time;
        self
    }

    pub fn with_system(mut self, system: ProbDist) -> Self {
        self.system = system;
        self
    }

    /// `exp(-beta omega)`.
    pub fn x(&self) -> f64 {
        (-self.beta * self.omega).exp()
    }

    /// Thermal weight of the untruncated oscillator beyond level `N - 1`.
    pub fn tail_mass(&self) -> f64 {
        self.x().powi(self.truncation as i32)
    }

    pub fn env_ladder(&self) -> EnergyLadder {
        EnergyLadder::uniform(self.truncation, self.omega)
    }

    pub fn thermal_env(&self) -> ProbDist {
        thermal_state(&self.env_ladder(), self.beta)
    }

    pub fn initial_state(&self) -> JointState {
        JointState::product(&[&self.system, &self.thermal_env()]).expect("two factors")
    }

    /// `omega |1><1| + omega a^dag a + (|0><1| a^dag + h.c.)` on the truncated space.
    pub fn hamiltonian(&self) -> CMatrix {
        let n = self.truncation;
        let mut h = CMatrix::zeros(2 * n, 2 * n);
        for k in 0..n {
            h[(k, k)] = Complex64::new(self.omega * k as f64, 0.0);
            h[(n + k, n + k)] = Complex64::new(self.omega * (k + 1) as f64, 0.0);
        }
        for k in 0..n - 1 {
            // <0, k+1| a^dag |1, k> = sqrt(k + 1)
            let g = Complex64::new(((k + 1) as f64).sqrt(), 0.0);
            h[(k + 1, n + k)] = g;
            h[(n + k, k + 1)] = g;
        }
        h
    }

    /// `exp(-i H t)` assembled block by block: each pair
    /// `{|0, k+1>, |1, k>}` rotates by the Rabi angle `t sqrt(k + 1)`.
    pub fn unitary(&self) -> CMatrix {
        let n = self.truncation;
        let t = self.time;
        let mut u = CMatrix::zeros(2 * n, 2 * n);
        let phase = |energy: f64| Complex64::from_polar(1.0, -energy * t);
        u[(0, 0)] = Complex64::new(1.0, 0.0);
        u[(2 * n - 1, 2 * n - 1)] = phase(self.omega * n as f64);
        for k in 0..n - 1 {
            let theta = t * ((k + 1) as f64).sqrt();
            let common = phase(self.omega * (k + 1) as f64);
            let (a, b) = (k + 1, n + k);
            let c = common * theta.cos();
            let s = common * Complex64::new(0.0, -theta.sin());
            u[(a, a)] = c;
            u[(b, b)] = c;
            u[(a, b)] = s;
            u[(b, a)] = s;
        }
        u
    }

    /// Qubit populations after the evolution, without building the joint
    /// state. The reduced qubit state carries no coherence.
    pub fn system_populations(&self) -> [f64; 2] {
        let n = self.truncation;
        let env = self.thermal_env();
        let q = env.probs();
        let (p0, p1) = (self.system.probs()[0], self.system.probs()[1]);
        let mut excited = 0.0;
        for k in 0..n {
            let from_excited = p1 * q[k];
            let from_ground = if k + 1 < n { p0 * q[k + 1] } else { 0.0 };
            if k + 1 < n {
                let theta = self.time * ((k + 1) as f64).sqrt();
                let (c2, s2) = (theta.cos().powi(2), theta.sin().powi(2));
                excited += from_excited * c2 + from_ground * s2;
            } else {
                excited += from_excited;
            }
        }
        [1.0 - excited, excited]
    }
}

fn check_truncation(model: &JCModel) -> Result<()> {
    let tail = model.tail_mass();
    if tail >= TAIL_TOL || model.truncation < 2 {
        return Err(Error::TruncationTooSmall {
            given: model.truncation,
            required: required_truncation(model.beta, model.omega)?,
            tail,
        });
    }
    Ok(())
}

/// The exact qubit-oscillator state at `model.time`.
pub fn evolve(model: &JCModel) -> Result<JointState> {
    check_truncation(model)?;
    let u = model.unitary();
    let rho = model.initial_state().to_matrix();
    let out = &u * rho * u.adjoint();
    JointState::dense(&[2, model.truncation], out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dephased {
    pub state: JointState,
    /// Frobenius norm of the discarded off-diagonal part.
    pub coherence_norm: f64,
}

/// Keeps the populations and drops every coherence.
pub fn dephase(joint: &JointState) -> Dephased {
    let coherence_norm = match joint.coherences() {
        None => 0.0,
        Some(m) => {
            let mut acc = 0.0;
            for a in 0..m.nrows() {
                for b in 0..m.ncols() {
                    if a != b {
                        acc += m[(a, b)].norm_sqr();
                    }
                }
            }
            acc.sqrt()
        }
    };
    let state = JointState::classical(joint.dims(), joint.populations().to_vec())
        .expect("populations of a valid state");
    Dephased { state, coherence_norm }
}

/// How the evolution time is chosen at each temperature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TimePolicy {
    /// The grid time in `(0, pi]` with the smallest final qubit entropy;
    /// ties go to the earliest time.
    MaxErasure { samples: usize },
    Fixed(f64),
}

impl Default for TimePolicy {
    fn default() -> Self {
        TimePolicy::MaxErasure { samples: 2000 }
    }
}

impl std::fmt::Display for TimePolicy {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            TimePolicy::MaxErasure { samples } => write!(f, "max-erasure({samples})"),
            TimePolicy::Fixed(t) => write!(f, "fixed:{t}"),
        }
    }
}

/// Evolution time selected by `policy` for `model`.
pub fn choose_time(model: &JCModel, policy: TimePolicy) -> Result<f64> {
    match policy {
        TimePolicy::Fixed(t) if t.is_finite() && t >= 0.0 => Ok(t),
        TimePolicy::Fixed(t) => Err(Error::Precondition(format!("invalid time {t}"))),
        TimePolicy::MaxErasure { samples: 0 } => {
            Err(Error::Precondition("max-erasure policy needs at least one sample".into()))
        }
        TimePolicy::MaxErasure { samples } => {
            let mut best = (f64::INFINITY, 0.0);
            for k in 1..=samples {
                let t = PI * k as f64 / samples as f64;
                let pops = model.clone().with_time(t).system_populations();
                let s = shannon_entropy(&ProbDist::new(pops.to_vec())?);
                if s < best.0 {
                    best = (s, t);
                }
            }
            Ok(best.1)
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub omega: f64,
    pub time_policy: TimePolicy,
    pub dv_range: RangeInclusive<usize>,
    pub witness: WitnessPolicy,
    /// Also score every witness of the dephased state.
    pub scan_all_witnesses: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            omega: 1.0,
            time_policy: TimePolicy::default(),
            dv_range: 3..=10,
            witness: WitnessPolicy::Fixed(LOOP_TUPLE),
            scan_all_witnesses: false,
        }
    }
}

/// One temperature of the sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JcRecord {
    pub x: f64,
    pub beta: f64,
    pub t: f64,
    pub truncation: usize,
    pub d_ss: f64,
    pub q_e: f64,
    /// Mutual information of the exact state.
    pub i_se: f64,
    pub relent: f64,
    pub residual: f64,
    pub gamma_h: f64,
    pub gamma_e: f64,
    /// Change of the exact-state mutual information under the catalytic step.
    pub d_i: f64,
    pub i_dephased: f64,
    pub d_i_dephased: f64,
    pub best_dv: usize,
    /// `(I, I', J, J')` counted from one.
    pub witness: [usize; 4],
    pub coherence_diag: f64,
    /// Largest population change of the qubit in the exact-state route.
    pub dense_system_deviation: f64,
    /// Largest change of the catalyst marginal in the exact-state route.
    pub dense_catalyst_deviation: f64,
    /// Off-diagonal weight of the final catalyst in the exact-state route.
    pub dense_catalyst_coherence: f64,
    /// Best heat coefficient over every witness, when requested.
    pub gamma_h_all_witnesses: Option<f64>,
}

/// Evolves, dephases, and runs the catalyst optimization at one temperature.
pub fn run_point(beta: f64, config: &ExperimentConfig) -> Result<JcRecord> {
    let base = JCModel::new(config.omega, beta, 0.0)?;
    let t = choose_time(&base, config.time_policy)?;
    let model = base.with_time(t);
    let ladder = model.env_ladder();
    let rho_e = model.thermal_env();

    let exact = evolve(&model)?;
    let record = landauer_decomposition(&ladder, &rho_e, &exact, &model.system, Some(beta))?;
    let dephased = dephase(&exact);
    let ctx = ErasureContext { ladder, record };

    let opt = optimize_dv(&dephased.state, config.dv_range.clone(), Objective::Heat, config.witness, Some(&ctx))?;
    let best = &opt.best;
    let (_, dense) = exact_route(&exact, &opt)?;

    let gamma_h_all_witnesses = if config.scan_all_witnesses {
        optimize_dv(&dephased.state, config.dv_range.clone(), Objective::Heat, WitnessPolicy::Exhaustive, Some(&ctx))
            .ok()
            .and_then(|o| o.best.scores.gamma_h)
    } else {
        None
    };

    let gamma_h = best.scores.gamma_h.expect("optimizer keeps scored candidates");
    let gamma_e = crate::catalyst::gamma_e(dense.entropy_change_env, record.i_se)?;
    Ok(JcRecord {
        x: model.x(),
        beta,
        t,
        truncation: model.truncation,
        d_ss: record.d_ss,
        q_e: record.q_e,
        i_se: record.i_se,
        relent: record.relent,
        residual: record.residual(),
        gamma_h,
        gamma_e,
        d_i: dense.delta_mutual_info(),
        i_dephased: best.report.mutual_info_before,
        d_i_dephased: best.report.delta_mutual_info(),
        best_dv: best.dim(),
        witness: best.witness.one_based(),
        coherence_diag: dephased.coherence_norm,
        dense_system_deviation: dense.system_deviation(),
        dense_catalyst_deviation: dense.catalyst_deviation(),
        dense_catalyst_coherence: dense.catalyst_coherence,
        gamma_h_all_witnesses,
    })
}

/// Applies the chosen catalyst to the exact (coherent) state.
fn exact_route(exact: &JointState, opt: &OptimizedCatalyst) -> Result<(JointState, MitigationReport)> {
    apply_catalytic(exact, &opt.best.solution, &opt.best.permutation)
}

/// [`run_point`] over every inverse temperature in `betas`.
pub fn run_experiment(betas: &[f64], config: &ExperimentConfig) -> Result<Vec<JcRecord>> {
    betas.iter().map(|&b| run_point(b, config)).collect()
}

/// Inverse temperatures matching `x = exp(-beta omega)`.
pub fn betas_for(xs: &[f64], omega: f64) -> Vec<f64> {
    xs.iter().map(|x| -x.ln() / omega).collect()
}

/// `steps` evenly spaced values from `start` to `stop` inclusive.
pub fn linspace(start: f64, stop: f64, steps: usize) -> Vec<f64> {
    match steps {
        0 => Vec::new(),
        1 => vec![start],
        _ => (0..steps)
            .map(|k| start + (stop - start) * k as f64 / (steps - 1) as f64)
            .collect(),
    }
}

/// Mutual information of the exact state, for callers that skip the sweep.
pub fn exact_mutual_information(model: &JCModel) -> Result<f64> {
    Ok(mutual_information(&evolve(model)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn truncation_rule() {
        let n = required_truncation((1.0 / 0.65f64).ln(), 1.0).unwrap();
        assert!(0.65f64.powi(n as i32) < TAIL_TOL);
        assert!(0.65f64.powi(n as i32 - 1) >= TAIL_TOL);
        assert_eq!(required_truncation(20.0, 1.0).unwrap(), MIN_TRUNCATION);
        assert!(required_truncation(0.0, 1.0).is_err());
        let m = JCModel::new(1.0, 0.5, 1.0).unwrap().with_truncation(12);
        assert!(matches!(evolve(&m), Err(Error::TruncationTooSmall { given: 12, .. })));
    }

    #[test]
    fn zero_time_is_identity() {
        let m = JCModel::new(1.0, 1.2, 0.0).unwrap();
        let out = evolve(&m).unwrap();
        let rec = landauer_decomposition(&m.env_ladder(), &m.thermal_env(), &out, &m.system, Some(1.2)).unwrap();
        assert_abs_diff_eq!(rec.d_ss, 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(rec.i_se, 0.0, epsilon = 1e-12);
        assert!(dephase(&out).coherence_norm < 1e-15);
    }

    #[test]
    fn half_period_swaps_a_block() {
        // theta_0 = pi moves |1, 0> fully to |0, 1> and back; pi/2 swaps
        let m = JCModel::new(1.0, 1.0, PI / 2.0).unwrap();
        let u = m.unitary();
        let n = m.truncation;
        assert_abs_diff_eq!(u[(1, n)].norm(), 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(u[(n, n)].norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn unitary_and_entropy_preserved() {
        let m = JCModel::new(1.0, 0.9, 1.7).unwrap();
        let u = m.unitary();
        let id = &u * u.adjoint();
        for a in 0..id.nrows() {
            for b in 0..id.ncols() {
                let target = if a == b { 1.0 } else { 0.0 };
                assert!((id[(a, b)] - Complex64::new(target, 0.0)).norm() < 1e-13);
            }
        }
        let out = evolve(&m).unwrap();
        assert_abs_diff_eq!(out.entropy(), m.initial_state().entropy(), epsilon = 1e-10);
        let pops = m.system_populations();
        let direct = out.marginal(0);
        assert_abs_diff_eq!(pops[1], direct.probs()[1], epsilon = 1e-13);
    }

    #[test]
    fn quarter_rotation_has_largest_block_coherence() {
        // a two-level block with populations (a, b) rotated by pi/2 carries
        // coherence |a - b| / 2 in each off-diagonal slot
        let m = JCModel::new(1.0, 1.0, PI / 4.0).unwrap();
        let out = evolve(&m).unwrap();
        let q = m.thermal_env();
        let n = m.truncation;
        let c = out.coherences().unwrap()[(1, n)].norm();
        let expected = 0.5 * (0.5 * q.probs()[1] - 0.5 * q.probs()[0]).abs() * (2.0 * PI / 4.0).sin();
        assert_abs_diff_eq!(c, expected, epsilon = 1e-14);
    }

    #[test]
    fn dephase_keeps_populations() {
        let m = JCModel::new(1.0, 0.8, 1.1).unwrap();
        let out = evolve(&m).unwrap();
        let d = dephase(&out);
        assert!(d.coherence_norm > 0.0);
        assert_eq!(d.state.populations(), out.populations());
        let again = dephase(&d.state);
        assert_eq!(again.coherence_norm, 0.0);
        assert_eq!(again.state, d.state);
    }

    #[test]
    fn landauer_identity_holds_along_evolution() {
        for t in [0.3, 1.0, 2.2] {
            let m = JCModel::new(1.0, 0.7, t).unwrap();
            let out = evolve(&m).unwrap();
            let rec = landauer_decomposition(&m.env_ladder(), &m.thermal_env(), &out, &m.system, None).unwrap();
            assert!(rec.residual().abs() < 1e-10);
        }
    }

    #[test]
    fn cold_bath_erases_almost_fully() {
        let rec = run_point(12.0, &ExperimentConfig::default()).unwrap();
        assert!(rec.d_ss < -2f64.ln() + 1e-3);
        assert!(rec.i_se < 1e-3);
        assert!(rec.gamma_h.abs() < 0.05);
    }

    #[test]
    fn single_point_is_consistent() {
        let beta = -(0.4f64).ln();
        let rec = run_point(beta, &ExperimentConfig::default()).unwrap();
        assert!(rec.residual.abs() < 1e-10);
        assert!(rec.gamma_h > 0.1);
        assert!(rec.gamma_e > 0.0);
        assert!(rec.d_i.abs() < rec.i_se);
        assert!(rec.dense_catalyst_deviation <= 1e-12);
        assert_eq!(rec.witness, [2, 1, 1, 2]);
    }
}
