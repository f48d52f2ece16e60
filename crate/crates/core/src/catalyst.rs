//! Catalytic consumption of system-environment correlations.
//!
//! A classical correlated state `sigma_se` admits a tuple `(I, I', J, J')`
//! with `q[I][J] / q[I][J'] > q[I'][J] / q[I'][J']`. Appending a catalyst
//! with an equal-transfer spectrum and applying a system-controlled
//! permutation then moves `(d_v - 2) delta` of environment population from
//! `J'` to `J` while leaving both the system populations and the catalyst
//! spectrum untouched.
//!
//! All indices here are zero-based; [`CorrelationWitness::one_based`] gives
//! the conventional labels.

use std::ops::RangeInclusive;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::majorization::{majorizes, passive_energy, DEFAULT_EPS};
use crate::qstate::{
    heat, mutual_information, shannon_entropy, EnergyLadder, ErasureRecord, JointState, ProbDist,
};

/// Relative slack separating a genuine ratio gap from rounding.
pub const RATIO_TOL: f64 = 1e-12;
/// Tolerance on marginal preservation and on equality of the transfers.
pub const PRESERVATION_TOL: f64 = 1e-12;
const UNDEFINED_TOL: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CorrelationWitness {
    pub i: usize,
    pub i_prime: usize,
    pub j: usize,
    pub j_prime: usize,
    pub q_ij: f64,
    pub q_ijp: f64,
    pub q_ipj: f64,
    pub q_ipjp: f64,
    /// Environment level `J` already carries more population than `J'`, so
    /// the net transfer makes the environment marginal majorize its input.
    pub receiver_dominant: bool,
}

impl CorrelationWitness {
    pub fn ratio_strong(&self) -> f64 {
        self.q_ij / self.q_ijp
    }

    pub fn ratio_weak(&self) -> f64 {
        self.q_ipj / self.q_ipjp
    }

    /// `(I, I', J, J')` counted from one.
    pub fn one_based(&self) -> [usize; 4] {
        [self.i + 1, self.i_prime + 1, self.j + 1, self.j_prime + 1]
    }

    pub fn indices(&self) -> [usize; 4] {
        [self.i, self.i_prime, self.j, self.j_prime]
    }
}

fn require_classical_bipartite(joint: &JointState) -> Result<()> {
    if joint.dims().len() != 2 {
        return Err(Error::InvalidJointState("expected a bipartite state".into()));
    }
    if !joint.is_classical() {
        return Err(Error::InvalidJointState(
            "witness search needs a classical state; dephase it first".into(),
        ));
    }
    Ok(())
}

fn require_positive(joint: &JointState) -> Result<()> {
    let d_e = joint.dims()[1];
    match joint.populations().iter().position(|&p| !(p > 0.0)) {
        Some(k) => Err(Error::ZeroPopulation { system: k / d_e, environment: k % d_e }),
        None => Ok(()),
    }
}

/// The witness carried by the tuple `[I, I', J, J']`, if the ratio
/// inequality holds for it.
pub fn witness_at(joint: &JointState, tuple: [usize; 4]) -> Result<Option<CorrelationWitness>> {
    require_classical_bipartite(joint)?;
    let [i, ip, j, jp] = tuple;
    let (d_s, d_e) = (joint.dims()[0], joint.dims()[1]);
    if i >= d_s || ip >= d_s || j >= d_e || jp >= d_e || i == ip || j == jp {
        return Err(Error::Precondition(format!("tuple {tuple:?} out of range")));
    }
    for &(s, e) in &[(i, j), (i, jp), (ip, j), (ip, jp)] {
        if !(joint.population(s, e) > 0.0) {
            return Err(Error::ZeroPopulation { system: s, environment: e });
        }
    }
    let env = joint.marginal(1);
    Ok(make_witness(joint, &env, i, ip, j, jp))
}

fn make_witness(
    joint: &JointState,
    env: &ProbDist,
    i: usize,
    ip: usize,
    j: usize,
    jp: usize,
) -> Option<CorrelationWitness> {
    let (q_ij, q_ijp) = (joint.population(i, j), joint.population(i, jp));
    let (q_ipj, q_ipjp) = (joint.population(ip, j), joint.population(ip, jp));
    // cross-multiplied form of q_ij / q_ijp > q_ipj / q_ipjp
    if q_ij * q_ipjp > q_ijp * q_ipj * (1.0 + RATIO_TOL) {
        Some(CorrelationWitness {
            i,
            i_prime: ip,
            j,
            j_prime: jp,
            q_ij,
            q_ijp,
            q_ipj,
            q_ipjp,
            receiver_dominant: env.probs()[j] > env.probs()[jp],
        })
    } else {
        None
    }
}

/// Every tuple `(I, I', J, J')` whose ratio inequality holds, in
/// lexicographic order. Empty exactly when the state is a product.
pub fn find_witnesses(joint: &JointState) -> Result<Vec<CorrelationWitness>> {
    require_classical_bipartite(joint)?;
    require_positive(joint)?;
    let (d_s, d_e) = (joint.dims()[0], joint.dims()[1]);
    let env = joint.marginal(1);
    let mut out = Vec::new();
    for i in 0..d_s {
        for ip in (0..d_s).filter(|&x| x != i) {
            for j in 0..d_e {
                for jp in (0..d_e).filter(|&x| x != j) {
                    if let Some(w) = make_witness(joint, &env, i, ip, j, jp) {
                        out.push(w);
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Catalyst spectrum for which every swap of the loop transfers the same
/// population `delta`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CatalystSolution {
    pub spectrum: ProbDist,
    pub delta: f64,
}

impl CatalystSolution {
    pub fn dim(&self) -> usize {
        self.spectrum.len()
    }

    /// Net population moved from `J'` to `J` in the environment.
    pub fn environment_transfer(&self) -> f64 {
        (self.dim() as f64 - 2.0) * self.delta
    }
}

/// The transfers `delta_1 .. delta_{d_v}` produced by `spectrum` on the four
/// witness populations.
pub fn loop_transfers(q_ij: f64, q_ijp: f64, q_ipj: f64, q_ipjp: f64, spectrum: &[f64]) -> Vec<f64> {
    let n = spectrum.len();
    let mut out: Vec<f64> = (0..n - 1)
        .map(|k| q_ipjp * spectrum[k] - q_ipj * spectrum[k + 1])
        .collect();
    out.push(q_ij * spectrum[n - 1] - q_ijp * spectrum[0]);
    out
}

/// Solves the equal-transfer conditions plus normalization in closed form.
///
/// With `r = q_ipjp / q_ipj` the equal transfers telescope to
/// `p_{k+1} = r p_k - delta / q_ipj`, so every level is fixed by `p_1` and
/// `delta`; the closing swap of the `I` branch then fixes `p_1`. Powers of
/// `r` are evaluated as `exp(m ln r)` and the recursion runs in whichever
/// direction contracts, so long loops neither overflow nor cancel.
///
/// The spectrum is validated (positive, strictly decreasing, transfers equal
/// and positive, ratio chain strict) before it is returned.
pub fn solve_catalyst(
    q_ij: f64,
    q_ijp: f64,
    q_ipj: f64,
    q_ipjp: f64,
    dim: usize,
) -> Result<CatalystSolution> {
    if dim < 3 {
        return Err(Error::Precondition(format!("catalyst dimension {dim} < 3")));
    }
    let q = [q_ij, q_ijp, q_ipj, q_ipjp];
    if q.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
        return Err(Error::Precondition(format!("populations {q:?} must be positive")));
    }
    if !(q_ij * q_ipjp > q_ijp * q_ipj) {
        return Err(Error::Precondition("populations carry no ratio gap".into()));
    }
    let infeasible = |reason: String| Error::CatalystInfeasible { dim, reason };

    let n = dim;
    let (a, b, c, e) = (q_ipj, q_ipjp, q_ij, q_ijp);
    let ln_r = (b / a).ln();
    let pow = |m: f64| (m * ln_r).exp();

    // unnormalized levels with delta = 1
    let mut p = vec![0.0; n];
    if ln_r <= 0.0 {
        let geometric: f64 = (0..n - 1).map(|m| pow(m as f64)).sum();
        let denom = c * pow((n - 1) as f64) - e;
        if !(denom > 0.0) {
            return Err(infeasible(format!(
                "ratio_strong {:.6} does not exceed ratio_weak^{} = {:.6}",
                c / e,
                n - 1,
                (a / b).powi(n as i32 - 1)
            )));
        }
        p[0] = (1.0 + c / a * geometric) / denom;
        for k in 1..n {
            p[k] = (b * p[k - 1] - 1.0) / a;
        }
    } else {
        // divide numerator and denominator by r^(n-1)
        let top = (n - 1) as f64;
        let tail: f64 = (1..n).map(|m| pow(-(m as f64))).sum();
        let denom = c - e * pow(-top);
        if !(denom > 0.0) {
            return Err(infeasible("closing swap cannot transfer positive population".into()));
        }
        p[0] = (pow(-top) + c / a * tail) / denom;
        p[n - 1] = (1.0 + e * p[0]) / c;
        for k in (1..n - 1).rev() {
            p[k] = (a * p[k + 1] + 1.0) / b;
        }
    }

    let total: f64 = p.iter().sum();
    if !total.is_finite() || p.iter().any(|v| !(v.is_finite() && *v > 0.0)) {
        return Err(infeasible(format!("non-positive spectrum {p:?}")));
    }
    p.iter_mut().for_each(|v| *v /= total);
    let delta = 1.0 / total;

    if p.windows(2).any(|w| !(w[0] > w[1])) {
        return Err(infeasible("spectrum is not strictly decreasing".into()));
    }
    let transfers = loop_transfers(c, e, a, b, &p);
    let spread = transfers.iter().map(|t| (t - delta).abs()).fold(0.0, f64::max);
    if spread > PRESERVATION_TOL || !(delta > 0.0) {
        return Err(infeasible(format!("unequal transfers (spread {spread:.3e})")));
    }
    let outer = p[0] / p[n - 1];
    let steps: Vec<f64> = p.windows(2).map(|w| w[0] / w[1]).collect();
    let chain = c / e > outer
        && steps.iter().all(|&s| outer > s && s > a / b);
    if !chain {
        return Err(infeasible("ratio chain is not strict".into()));
    }
    Ok(CatalystSolution { spectrum: ProbDist::new(p)?, delta })
}

pub fn solve_for_witness(w: &CorrelationWitness, dim: usize) -> Result<CatalystSolution> {
    solve_catalyst(w.q_ij, w.q_ijp, w.q_ipj, w.q_ipjp, dim)
}

/// A basis state `|s, e, v>` of system, environment and catalyst.
pub type Triple = [usize; 3];

/// Disjoint transpositions of `(s, e, v)` basis states. Every transposition
/// keeps the system index, so the whole map is controlled by the system.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TriplePermutation {
    swaps: Vec<(Triple, Triple)>,
}

impl TriplePermutation {
    pub fn new(swaps: Vec<(Triple, Triple)>) -> Result<Self> {
        let mut seen = std::collections::HashSet::new();
        for (a, b) in &swaps {
            if a[0] != b[0] {
                return Err(Error::Precondition(format!("swap {a:?} <-> {b:?} changes the system index")));
            }
            if a == b || !seen.insert(*a) || !seen.insert(*b) {
                return Err(Error::Precondition(format!("swap {a:?} <-> {b:?} is not disjoint")));
            }
        }
        Ok(TriplePermutation { swaps })
    }

    pub fn swaps(&self) -> &[(Triple, Triple)] {
        &self.swaps
    }

    pub fn len(&self) -> usize {
        self.swaps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.swaps.is_empty()
    }

    /// `map[src] = dst` over the flattened `s x e x v` basis.
    pub fn index_map(&self, dims: [usize; 3]) -> Result<Vec<usize>> {
        let flat = |t: &Triple| -> Result<usize> {
            if t.iter().zip(&dims).any(|(x, d)| x >= d) {
                return Err(Error::Precondition(format!("triple {t:?} outside dims {dims:?}")));
            }
            Ok((t[0] * dims[1] + t[1]) * dims[2] + t[2])
        };
        let mut map: Vec<usize> = (0..dims.iter().product()).collect();
        for (a, b) in &self.swaps {
            let (fa, fb) = (flat(a)?, flat(b)?);
            map.swap(fa, fb);
        }
        Ok(map)
    }

    pub fn apply(&self, state: &JointState) -> Result<JointState> {
        let dims: [usize; 3] = state
            .dims()
            .try_into()
            .map_err(|_| Error::InvalidJointState("expected a system-environment-catalyst state".into()))?;
        Ok(state.permuted(&self.index_map(dims)?))
    }
}

/// The loop permutation: `|I' J' k> <-> |I' J k+1>` for `k < d_v`, closed by
/// `|I J' 1> <-> |I J d_v>`.
pub fn build_permutation(w: &CorrelationWitness, dim: usize) -> TriplePermutation {
    let mut swaps: Vec<(Triple, Triple)> = (0..dim - 1)
        .map(|k| ([w.i_prime, w.j_prime, k], [w.i_prime, w.j, k + 1]))
        .collect();
    swaps.push(([w.i, w.j_prime, 0], [w.i, w.j, dim - 1]));
    TriplePermutation::new(swaps).expect("loop swaps are disjoint and system-controlled")
}

/// Marginals and information budget before and after the catalytic step.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MitigationReport {
    pub catalyst_before: ProbDist,
    pub catalyst_after: ProbDist,
    pub system_before: ProbDist,
    pub system_after: ProbDist,
    pub env_before: ProbDist,
    pub env_after: ProbDist,
    /// `S(rho'_e) - S(sigma_e)`.
    pub entropy_change_env: f64,
    /// `S(rho'_se) - S(sigma_se)`; never negative.
    pub entropy_change_joint: f64,
    pub mutual_info_before: f64,
    pub mutual_info_after: f64,
    /// Frobenius norm of the off-diagonal part of the final catalyst state.
    pub catalyst_coherence: f64,
}

impl MitigationReport {
    /// `I'(s:e) - I(s:e)`.
    pub fn delta_mutual_info(&self) -> f64 {
        self.mutual_info_after - self.mutual_info_before
    }

    /// `Q'_e - Q_e = Tr[H_e (rho'_e - sigma_e)]`.
    pub fn heat_change(&self, ladder: &EnergyLadder) -> Result<f64> {
        heat(ladder, &self.env_after, &self.env_before)
    }

    /// Change of the passive (work-free) environment energy.
    pub fn passive_heat_change(&self, ladder: &EnergyLadder) -> Result<f64> {
        Ok(passive_energy(ladder, &self.env_after)? - passive_energy(ladder, &self.env_before)?)
    }

    pub fn env_majorizes(&self) -> bool {
        majorizes(&self.env_after, &self.env_before, DEFAULT_EPS).unwrap_or(false)
    }

    pub fn catalyst_deviation(&self) -> f64 {
        self.catalyst_after.max_abs_diff(&self.catalyst_before)
    }

    pub fn system_deviation(&self) -> f64 {
        self.system_after.max_abs_diff(&self.system_before)
    }
}

/// Appends the catalyst to `joint`, applies `perm`, and checks that both the
/// system populations and the catalyst spectrum come out unchanged.
pub fn apply_catalytic(
    joint: &JointState,
    sol: &CatalystSolution,
    perm: &TriplePermutation,
) -> Result<(JointState, MitigationReport)> {
    if joint.dims().len() != 2 {
        return Err(Error::InvalidJointState("expected a bipartite state".into()));
    }
    let before = joint.tensor(&sol.spectrum);
    let after = perm.apply(&before)?;

    let catalyst_after = after.marginal(2);
    let system_after = after.marginal(0);
    let system_before = joint.marginal(0);
    let se_after = after.reduce(&[0, 1]);

    let catalyst_coherence = match after.coherences() {
        None => 0.0,
        Some(_) => {
            let m = after.reduce(&[2]).to_matrix();
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

    let report = MitigationReport {
        catalyst_before: sol.spectrum.clone(),
        catalyst_after,
        system_before,
        system_after,
        env_before: joint.marginal(1),
        env_after: se_after.marginal(1),
        entropy_change_env: se_after.marginal_entropy(1) - joint.marginal_entropy(1),
        entropy_change_joint: se_after.entropy() - joint.entropy(),
        mutual_info_before: mutual_information(joint),
        mutual_info_after: mutual_information(&se_after),
        catalyst_coherence,
    };
    if report.catalyst_deviation() > PRESERVATION_TOL {
        return Err(Error::MarginalViolation(format!(
            "catalyst marginal moved by {:.3e}",
            report.catalyst_deviation()
        )));
    }
    if report.system_deviation() > PRESERVATION_TOL {
        return Err(Error::MarginalViolation(format!(
            "system populations moved by {:.3e}",
            report.system_deviation()
        )));
    }
    Ok((after, report))
}

/// Fraction of the heat excess above the Landauer limit removed by the
/// catalyst: `(Q_e - Q'_e) / (Q_e + T_e dS_s)`.
pub fn gamma_h(q_e: f64, q_e_prime: f64, t_e: f64, d_ss: f64) -> Result<f64> {
    let excess = q_e + t_e * d_ss;
    if !(excess > UNDEFINED_TOL) {
        return Err(Error::Undefined(format!("heat excess {excess:.3e} is not positive")));
    }
    Ok((q_e - q_e_prime) / excess)
}

/// Fraction of the generated correlations converted into an entropy
/// reduction of the environment: `-dS'_e / I(s:e)`.
pub fn gamma_e(d_se_prime: f64, i_se: f64) -> Result<f64> {
    if !(i_se > UNDEFINED_TOL) {
        return Err(Error::Undefined(format!("mutual information {i_se:.3e} is not positive")));
    }
    Ok(-d_se_prime / i_se)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Objective {
    Heat,
    Entropy,
}

/// Which witnesses [`optimize_dv`] scores.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WitnessPolicy {
    /// All witnesses.
    Exhaustive,
    /// Only the witness with the largest `ratio_strong / ratio_weak`.
    GreedyRatioGap,
    /// A single prescribed tuple `[I, I', J, J']` (zero-based).
    Fixed([usize; 4]),
}

/// What the erasure step that produced the correlated state cost; needed to
/// normalize the heat coefficient.
#[derive(Debug, Clone, PartialEq)]
pub struct ErasureContext {
    pub ladder: EnergyLadder,
    pub record: ErasureRecord,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CatalystScores {
    pub gamma_h: Option<f64>,
    pub gamma_e: Option<f64>,
    /// `Q'_e`, when an erasure context is available.
    pub heat_after: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CatalystCandidate {
    pub witness: CorrelationWitness,
    pub solution: CatalystSolution,
    pub permutation: TriplePermutation,
    pub report: MitigationReport,
    pub scores: CatalystScores,
}

impl CatalystCandidate {
    pub fn dim(&self) -> usize {
        self.solution.dim()
    }

    pub fn score(&self, objective: Objective) -> Option<f64> {
        match objective {
            Objective::Heat => self.scores.gamma_h,
            Objective::Entropy => self.scores.gamma_e,
        }
    }
}

/// Solves, builds and applies the catalyst for one witness and dimension,
/// then scores it.
pub fn evaluate_candidate(
    joint: &JointState,
    witness: &CorrelationWitness,
    dim: usize,
    ctx: Option<&ErasureContext>,
) -> Result<CatalystCandidate> {
    let solution = solve_for_witness(witness, dim)?;
    let permutation = build_permutation(witness, dim);
    let (_, report) = apply_catalytic(joint, &solution, &permutation)?;

    let correlations = match ctx {
        Some(c) => c.record.i_se,
        None => report.mutual_info_before,
    };
    let gamma_e = gamma_e(report.entropy_change_env, correlations).ok();
    let (gamma_h, heat_after) = match ctx {
        Some(c) => {
            let q_after = c.record.q_e + report.heat_change(&c.ladder)?;
            let g = gamma_h(c.record.q_e, q_after, c.record.temperature(), c.record.d_ss).ok();
            (g, Some(q_after))
        }
        None => (None, None),
    };
    Ok(CatalystCandidate {
        witness: *witness,
        solution,
        permutation,
        report,
        scores: CatalystScores { gamma_h, gamma_e, heat_after },
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct OptimizedCatalyst {
    pub best: CatalystCandidate,
    /// Witnesses considered.
    pub witnesses: usize,
    /// `(witness, dimension)` pairs that produced a valid catalyst.
    pub feasible: usize,
}

/// Scans witnesses and catalyst dimensions and keeps the best score.
///
/// Ties go to the smallest dimension, then the lexicographically smallest
/// witness.
pub fn optimize_dv(
    joint: &JointState,
    dims: RangeInclusive<usize>,
    objective: Objective,
    policy: WitnessPolicy,
    ctx: Option<&ErasureContext>,
) -> Result<OptimizedCatalyst> {
    if objective == Objective::Heat && ctx.is_none() {
        return Err(Error::Precondition("heat objective needs an erasure context".into()));
    }
    let witnesses = match policy {
        WitnessPolicy::Exhaustive => find_witnesses(joint)?,
        WitnessPolicy::GreedyRatioGap => {
            let all = find_witnesses(joint)?;
            let gap = |w: &CorrelationWitness| w.ratio_strong() / w.ratio_weak();
            let mut best: Option<CorrelationWitness> = None;
            for w in all {
                if best.as_ref().is_none_or(|b| gap(&w) > gap(b)) {
                    best = Some(w);
                }
            }
            best.into_iter().collect()
        }
        WitnessPolicy::Fixed(tuple) => match witness_at(joint, tuple)? {
            Some(w) => vec![w],
            None => {
                return Err(Error::Precondition(format!(
                    "tuple {tuple:?} is not a correlation witness for this state"
                )))
            }
        },
    };
    if witnesses.is_empty() {
        return Err(Error::Uncorrelated);
    }

    let mut best: Option<(f64, CatalystCandidate)> = None;
    let mut feasible = 0;
    for dim in dims.clone() {
        for w in &witnesses {
            let cand = match evaluate_candidate(joint, w, dim, ctx) {
                Ok(c) => c,
                Err(Error::CatalystInfeasible { .. }) | Err(Error::Precondition(_)) => continue,
                Err(e) => return Err(e),
            };
            feasible += 1;
            let Some(score) = cand.score(objective) else { continue };
            if best.as_ref().is_none_or(|(s, _)| score > *s) {
                best = Some((score, cand));
            }
        }
    }
    match best {
        Some((_, best)) => Ok(OptimizedCatalyst { best, witnesses: witnesses.len(), feasible }),
        None => Err(Error::CatalystInfeasible {
            dim: *dims.end(),
            reason: format!("no witness admits a scored catalyst with dimension in {dims:?}"),
        }),
    }
}

/// Shannon entropy of the environment marginal of a classical joint.
pub fn environment_entropy(joint: &JointState) -> f64 {
    shannon_entropy(&joint.marginal(1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn hand_joint() -> JointState {
        JointState::classical(&[2, 2], vec![0.4, 0.1, 0.2, 0.3]).unwrap()
    }

    /// Qubit system and qutrit environment whose tuple (2,1,1,2) is a
    /// witness with `ratio_weak >= 1` and a dominant receiver.
    fn loop_joint() -> JointState {
        JointState::classical(&[2, 3], vec![0.30, 0.20, 0.10, 0.25, 0.10, 0.05]).unwrap()
    }

    #[test]
    fn product_states_have_no_witness() {
        let a = ProbDist::new(vec![0.3, 0.7]).unwrap();
        let b = ProbDist::new(vec![0.2, 0.5, 0.3]).unwrap();
        let prod = JointState::product(&[&a, &b]).unwrap();
        assert!(find_witnesses(&prod).unwrap().is_empty());
    }

    #[test]
    fn hand_example_witnesses() {
        // all 4-tuples by hand: a = q11/q12 = 4, b = q21/q22 = 2/3
        let ws = find_witnesses(&hand_joint()).unwrap();
        let tuples: Vec<[usize; 4]> = ws.iter().map(|w| w.indices()).collect();
        assert_eq!(tuples, vec![[0, 1, 0, 1], [1, 0, 1, 0]]);
        assert_abs_diff_eq!(ws[0].ratio_strong(), 4.0, epsilon = 1e-14);
        assert_abs_diff_eq!(ws[0].ratio_weak(), 2.0 / 3.0, epsilon = 1e-14);
        assert!(ws[0].receiver_dominant);
        assert!(!ws[1].receiver_dominant);
    }

    #[test]
    fn loop_joint_contains_the_loop_tuple() {
        let ws = find_witnesses(&loop_joint()).unwrap();
        let w = ws.iter().find(|w| w.one_based() == [2, 1, 1, 2]).expect("tuple present");
        assert!(w.ratio_strong() > w.ratio_weak() && w.ratio_weak() >= 1.0);
        assert!(w.receiver_dominant);
    }

    #[test]
    fn witness_search_rejects_bad_input() {
        let z = JointState::classical(&[2, 2], vec![0.5, 0.0, 0.25, 0.25]).unwrap();
        assert!(matches!(find_witnesses(&z), Err(Error::ZeroPopulation { system: 0, environment: 1 })));
        let dense = JointState::dense(&[2, 2], hand_joint().to_matrix()).unwrap();
        assert!(find_witnesses(&dense).is_err());
    }

    #[test]
    fn solver_equalizes_transfers() {
        let sol = solve_catalyst(0.4, 0.1, 0.2, 0.3, 3).unwrap();
        // delta = 1 scaling: p = (7.5, 6.25, 4.375) / 18.125
        let expected = [7.5 / 18.125, 6.25 / 18.125, 4.375 / 18.125];
        for (p, e) in sol.spectrum.probs().iter().zip(expected) {
            assert_abs_diff_eq!(*p, e, epsilon = 1e-14);
        }
        assert_abs_diff_eq!(sol.delta, 1.0 / 18.125, epsilon = 1e-15);
        for t in loop_transfers(0.4, 0.1, 0.2, 0.3, sol.spectrum.probs()) {
            assert_abs_diff_eq!(t, sol.delta, epsilon = 1e-14);
        }
    }

    #[test]
    fn solver_is_homogeneous() {
        let base = solve_catalyst(0.4, 0.1, 0.2, 0.3, 4).unwrap();
        let scaled = solve_catalyst(0.04, 0.01, 0.02, 0.03, 4).unwrap();
        assert!(base.spectrum.max_abs_diff(&scaled.spectrum) < 1e-14);
        assert_abs_diff_eq!(scaled.delta, 0.1 * base.delta, epsilon = 1e-15);
    }

    #[test]
    fn solver_rejects_infeasible_dimensions() {
        // ratio_weak = 1.5, ratio_strong = 2: 1.5^(n-1) >= 2 from n = 3
        assert!(solve_catalyst(0.2, 0.1, 0.3, 0.2, 2).is_err());
        assert!(matches!(
            solve_catalyst(0.2, 0.1, 0.3, 0.2, 3),
            Err(Error::CatalystInfeasible { dim: 3, .. })
        ));
        assert!(matches!(solve_catalyst(0.1, 0.2, 0.3, 0.2, 3), Err(Error::Precondition(_))));
    }

    #[test]
    fn permutation_structure() {
        let w = witness_at(&loop_joint(), [1, 0, 0, 1]).unwrap().unwrap();
        let p3 = build_permutation(&w, 3);
        assert_eq!(p3.len(), 3);
        assert_eq!(
            p3.swaps(),
            &[([0, 1, 0], [0, 0, 1]), ([0, 1, 1], [0, 0, 2]), ([1, 1, 0], [1, 0, 2])]
        );
        let p4 = build_permutation(&w, 4);
        assert_eq!(p4.len(), 4);
        // catalyst index flow: k -> k+1 in the I' branch, d_v -> 1 in the I branch
        let mut next = [usize::MAX; 4];
        for (a, b) in p4.swaps() {
            if a[0] == w.i_prime {
                next[a[2]] = b[2];
            } else {
                next[b[2]] = a[2];
            }
        }
        let mut k = 0;
        for _ in 0..4 {
            k = next[k];
        }
        assert_eq!(k, 0);
        assert_eq!(next, [1, 2, 3, 0]);
        let map = p4.index_map([2, 3, 4]).unwrap();
        for (src, &dst) in map.iter().enumerate() {
            assert_eq!(map[dst], src);
        }
    }

    #[test]
    fn invalid_permutations_are_rejected() {
        assert!(TriplePermutation::new(vec![([0, 0, 0], [1, 0, 0])]).is_err());
        assert!(TriplePermutation::new(vec![([0, 0, 0], [0, 1, 0]), ([0, 1, 0], [0, 2, 0])]).is_err());
    }

    #[test]
    fn catalytic_step_on_loop_joint() {
        let joint = loop_joint();
        let w = witness_at(&joint, [1, 0, 0, 1]).unwrap().unwrap();
        let sol = solve_for_witness(&w, 3).unwrap();
        let perm = build_permutation(&w, 3);
        let (after, rep) = apply_catalytic(&joint, &sol, &perm).unwrap();
        assert!(rep.catalyst_deviation() <= 1e-12);
        assert!(rep.system_deviation() <= 1e-12);
        assert!(rep.env_majorizes());
        assert!(rep.entropy_change_env < 0.0);
        let moved = sol.environment_transfer();
        assert_abs_diff_eq!(rep.env_after.probs()[0], rep.env_before.probs()[0] + moved, epsilon = 1e-15);
        assert_abs_diff_eq!(rep.env_after.probs()[1], rep.env_before.probs()[1] - moved, epsilon = 1e-15);
        assert_eq!(rep.env_after.probs()[2], rep.env_before.probs()[2]);
        assert!(rep.delta_mutual_info() < 0.0);
        assert!(rep.delta_mutual_info().abs() < rep.mutual_info_before);

        // involution
        let back = perm.apply(&after).unwrap();
        assert_eq!(back, joint.tensor(&sol.spectrum));
    }

    #[test]
    fn uncorrelated_control_keeps_catalyst() {
        let w = witness_at(&loop_joint(), [1, 0, 0, 1]).unwrap().unwrap();
        let sol = solve_for_witness(&w, 3).unwrap();
        let perm = build_permutation(&w, 3);
        let a = ProbDist::new(vec![0.6, 0.4]).unwrap();
        let b = ProbDist::new(vec![0.5, 0.3, 0.2]).unwrap();
        let prod = JointState::product(&[&a, &b]).unwrap();
        // the catalyst only survives when its spectrum matches the state
        match apply_catalytic(&prod, &sol, &perm) {
            Ok((_, rep)) => assert!(rep.entropy_change_env >= -1e-12),
            Err(e) => assert!(matches!(e, Error::MarginalViolation(_))),
        }
    }

    #[test]
    fn dense_input_matches_classical_populations() {
        let joint = loop_joint();
        let dense = JointState::dense(&[2, 3], joint.to_matrix()).unwrap();
        let w = witness_at(&joint, [1, 0, 0, 1]).unwrap().unwrap();
        let sol = solve_for_witness(&w, 3).unwrap();
        let perm = build_permutation(&w, 3);
        let (_, rc) = apply_catalytic(&joint, &sol, &perm).unwrap();
        let (_, rd) = apply_catalytic(&dense, &sol, &perm).unwrap();
        assert!(rc.env_after.max_abs_diff(&rd.env_after) < 1e-14);
        assert_abs_diff_eq!(rc.entropy_change_env, rd.entropy_change_env, epsilon = 1e-12);
        assert!(rd.catalyst_coherence < 1e-15);
    }

    #[test]
    fn gamma_coefficients() {
        assert_eq!(gamma_h(0.5, 0.5, 2.0, -0.1).unwrap(), 0.0);
        assert_abs_diff_eq!(gamma_h(0.5, 0.2, 2.0, -0.1).unwrap(), 1.0, epsilon = 1e-15);
        assert!(gamma_h(0.2, 0.1, 2.0, -0.1).is_err());
        assert_eq!(gamma_e(0.0, 0.3).unwrap(), 0.0);
        assert_abs_diff_eq!(gamma_e(-0.3, 0.3).unwrap(), 1.0, epsilon = 1e-15);
        assert!(gamma_e(-0.1, 0.0).is_err());
    }

    #[test]
    fn optimizer_paths() {
        let a = ProbDist::new(vec![0.3, 0.7]).unwrap();
        let b = ProbDist::new(vec![0.2, 0.5, 0.3]).unwrap();
        let prod = JointState::product(&[&a, &b]).unwrap();
        assert_eq!(
            optimize_dv(&prod, 3..=6, Objective::Entropy, WitnessPolicy::Exhaustive, None).unwrap_err(),
            Error::Uncorrelated
        );
        let joint = loop_joint();
        let narrow = optimize_dv(&joint, 3..=3, Objective::Entropy, WitnessPolicy::Exhaustive, None).unwrap();
        let wide = optimize_dv(&joint, 3..=6, Objective::Entropy, WitnessPolicy::Exhaustive, None).unwrap();
        let s3 = narrow.best.score(Objective::Entropy).unwrap();
        assert!(wide.best.score(Objective::Entropy).unwrap() >= s3);
        assert!(s3 > 0.0);
        let greedy = optimize_dv(&joint, 3..=6, Objective::Entropy, WitnessPolicy::GreedyRatioGap, None).unwrap();
        assert_eq!(greedy.witnesses, 1);
        assert!(optimize_dv(&joint, 3..=4, Objective::Heat, WitnessPolicy::Exhaustive, None).is_err());
    }
}
