//! State representations and thermodynamic functionals.
//!
//! All entropies are in nats. Classical (diagonal) states carry only
//! populations; dense states additionally carry the full density matrix in
//! the same product basis, row-major over the tensor factors.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type CMatrix = DMatrix<Complex64>;

/// Inputs whose total deviates from one by less than this are renormalized.
pub const NORMALIZATION_TOL: f64 = 1e-9;
/// Largest inverse temperature returned by [`thermal_state_with_entropy`].
pub const BETA_CAP: f64 = 1e6;

const HERMITIAN_TOL: f64 = 1e-10;
const PSD_TOL: f64 = 1e-10;
const THERMAL_TOL: f64 = 1e-9;

/// A normalized probability vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<f64>", into = "Vec<f64>")]
pub struct ProbDist {
    probs: Vec<f64>,
}

impl ProbDist {
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::InvalidDistribution("empty vector".into()));
        }
        let mut probs = probs;
        for (i, p) in probs.iter_mut().enumerate() {
            if !p.is_finite() {
                return Err(Error::InvalidDistribution(format!("entry {i} is not finite")));
            }
            if *p < 0.0 {
                // rounding noise from sums of products
                if *p > -1e-15 {
                    *p = 0.0;
                } else {
                    return Err(Error::InvalidDistribution(format!("entry {i} is negative ({p})")));
                }
            }
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() >= NORMALIZATION_TOL {
            return Err(Error::InvalidDistribution(format!("entries sum to {total}")));
        }
        probs.iter_mut().for_each(|p| *p /= total);
        Ok(ProbDist { probs })
    }

    /// Normalizes an arbitrary non-negative weight vector.
    pub fn from_weights(weights: Vec<f64>) -> Result<Self> {
        let total: f64 = weights.iter().sum();
        if !(total > 0.0) || !total.is_finite() {
            return Err(Error::InvalidDistribution(format!("weights sum to {total}")));
        }
        ProbDist::new(weights.into_iter().map(|w| w / total).collect())
    }

    pub fn uniform(dim: usize) -> Self {
        assert!(dim > 0, "uniform distribution needs a positive dimension");
        ProbDist { probs: vec![1.0 / dim as f64; dim] }
    }

    /// The pure state concentrated on `index`.
    pub fn point(dim: usize, index: usize) -> Self {
        assert!(index < dim);
        let mut probs = vec![0.0; dim];
        probs[index] = 1.0;
        ProbDist { probs }
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.probs
    }

    pub fn is_full_rank(&self) -> bool {
        self.probs.iter().all(|&p| p > 0.0)
    }

    pub fn max_abs_diff(&self, other: &ProbDist) -> f64 {
        self.probs
            .iter()
            .zip(&other.probs)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

impl TryFrom<Vec<f64>> for ProbDist {
    type Error = Error;

    fn try_from(v: Vec<f64>) -> Result<Self> {
        ProbDist::new(v)
    }
}

impl From<ProbDist> for Vec<f64> {
    fn from(p: ProbDist) -> Vec<f64> {
        p.probs
    }
}

impl AsRef<[f64]> for ProbDist {
    fn as_ref(&self) -> &[f64] {
        &self.probs
    }
}

/// Energy levels of a Hamiltonian diagonal in the reference basis, sorted
/// non-decreasing. Heat is a difference of energies, so a constant offset
/// of all levels never changes any result.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnergyLadder {
    levels: Vec<f64>,
    omega: Option<f64>,
}

impl EnergyLadder {
    pub fn new(levels: Vec<f64>) -> Result<Self> {
        if levels.is_empty() {
            return Err(Error::InvalidLadder("no levels".into()));
        }
        if levels.iter().any(|e| !e.is_finite()) {
            return Err(Error::InvalidLadder("non-finite level".into()));
        }
        if levels.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::InvalidLadder("levels must be non-decreasing".into()));
        }
        Ok(EnergyLadder { levels, omega: None })
    }

    /// Levels `omega, 2 omega, ..., dim omega` (ground energy `omega`).
    pub fn uniform(dim: usize, omega: f64) -> Self {
        assert!(dim > 0 && omega.is_finite() && omega >= 0.0);
        EnergyLadder {
            levels: (1..=dim).map(|j| j as f64 * omega).collect(),
            omega: Some(omega),
        }
    }

    pub fn levels(&self) -> &[f64] {
        &self.levels
    }

    pub fn omega(&self) -> Option<f64> {
        self.omega
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    /// The same ladder with every level moved by `offset`.
    pub fn shifted(&self, offset: f64) -> Self {
        EnergyLadder {
            levels: self.levels.iter().map(|e| e + offset).collect(),
            omega: self.omega,
        }
    }

    pub fn expectation(&self, p: &ProbDist) -> Result<f64> {
        check_dim(self.len(), p.len())?;
        Ok(dot(&self.levels, p.probs()))
    }
}

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Entropy of a weight vector, treating tiny negative eigenvalues as zero.
pub(crate) fn entropy_of(values: &[f64]) -> f64 {
    values
        .iter()
        .filter(|&&p| p > 0.0)
        .map(|&p| -p * p.ln())
        .sum()
}

pub fn shannon_entropy(p: &ProbDist) -> f64 {
    entropy_of(p.probs())
}

/// `sum p ln(p/q)`; `f64::INFINITY` when `p` has support outside `q`.
pub fn relative_entropy(p: &ProbDist, q: &ProbDist) -> Result<f64> {
    check_dim(p.len(), q.len())?;
    let mut acc = 0.0;
    for (&pi, &qi) in p.probs().iter().zip(q.probs()) {
        if pi > 0.0 {
            if qi <= 0.0 {
                return Ok(f64::INFINITY);
            }
            acc += pi * (pi / qi).ln();
        }
    }
    Ok(acc.max(0.0))
}

/// Gibbs populations `exp(-beta e_j) / Z`. `beta = +inf` gives the
/// (possibly degenerate) ground state.
pub fn thermal_state(ladder: &EnergyLadder, beta: f64) -> ProbDist {
    let ground = ladder.levels[0];
    let weights: Vec<f64> = if beta.is_infinite() {
        ladder
            .levels
            .iter()
            .map(|&e| if e == ground { 1.0 } else { 0.0 })
            .collect()
    } else {
        ladder
            .levels
            .iter()
            .map(|&e| (-beta * (e - ground)).exp())
            .collect()
    };
    let z: f64 = weights.iter().sum();
    ProbDist { probs: weights.into_iter().map(|w| w / z).collect() }
}

/// Result of matching a thermal state to a prescribed entropy.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EntropyMatch {
    pub beta: f64,
    pub state: ProbDist,
    /// The target lies below what any finite `beta <= BETA_CAP` reaches.
    pub capped: bool,
}

/// Finds the thermal state on `ladder` whose entropy equals `target`.
///
/// Entropy decreases strictly in `beta >= 0` for a non-degenerate ladder,
/// so the root is bracketed by doubling and then bisected.
pub fn thermal_state_with_entropy(ladder: &EnergyLadder, target: f64) -> Result<EntropyMatch> {
    let d = ladder.len();
    let max = (d as f64).ln();
    if !(target > 0.0) || target > max + 1e-12 {
        return Err(Error::EntropyOutOfRange { target, max });
    }
    if target >= max - 1e-15 {
        return Ok(EntropyMatch { beta: 0.0, state: ProbDist::uniform(d), capped: false });
    }
    let spread = ladder.levels[d - 1] - ladder.levels[0];
    if spread <= 0.0 {
        return Err(Error::EntropyOutOfRange { target, max });
    }
    let entropy_at = |beta: f64| shannon_entropy(&thermal_state(ladder, beta));

    let mut lo = 0.0;
    let mut hi = 1.0 / spread;
    while entropy_at(hi) > target {
        lo = hi;
        hi *= 2.0;
        if hi > BETA_CAP {
            let state = thermal_state(ladder, BETA_CAP);
            return Ok(EntropyMatch { beta: BETA_CAP, state, capped: true });
        }
    }
    for _ in 0..400 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if entropy_at(mid) > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let beta = if (entropy_at(lo) - target).abs() < (entropy_at(hi) - target).abs() { lo } else { hi };
    Ok(EntropyMatch { beta, state: thermal_state(ladder, beta), capped: false })
}

/// `sum e_j (final_j - init_j)`.
pub fn heat(ladder: &EnergyLadder, p_final: &ProbDist, p_init: &ProbDist) -> Result<f64> {
    check_dim(ladder.len(), p_final.len())?;
    check_dim(ladder.len(), p_init.len())?;
    Ok(ladder
        .levels
        .iter()
        .zip(p_final.probs().iter().zip(p_init.probs()))
        .map(|(e, (f, i))| e * (f - i))
        .sum())
}

/// Least-squares inverse temperature of `p` on `ladder`, verified against
/// the reconstructed Gibbs state.
pub fn fit_inverse_temperature(ladder: &EnergyLadder, p: &ProbDist) -> Result<f64> {
    check_dim(ladder.len(), p.len())?;
    if !p.is_full_rank() {
        return Err(Error::NotThermal { deviation: f64::INFINITY });
    }
    let (mut num, mut den) = (0.0, 0.0);
    for j in 0..p.len().saturating_sub(1) {
        let gap = ladder.levels[j + 1] - ladder.levels[j];
        let log_ratio = (p.probs[j] / p.probs[j + 1]).ln();
        num += gap * log_ratio;
        den += gap * gap;
    }
    let beta = if den > 0.0 { num / den } else { 0.0 };
    check_thermal(ladder, p, beta)?;
    Ok(beta)
}

fn check_thermal(ladder: &EnergyLadder, p: &ProbDist, beta: f64) -> Result<()> {
    let deviation = thermal_state(ladder, beta).max_abs_diff(p);
    if deviation > THERMAL_TOL {
        Err(Error::NotThermal { deviation })
    } else {
        Ok(())
    }
}

/// Joint state over a product of two or three factors.
#[derive(Debug, Clone, PartialEq)]
pub struct JointState {
    dims: Vec<usize>,
    populations: Vec<f64>,
    coherences: Option<CMatrix>,
}

impl JointState {
    pub fn classical(dims: &[usize], populations: Vec<f64>) -> Result<Self> {
        check_dims(dims)?;
        let total: usize = dims.iter().product();
        check_dim(total, populations.len())?;
        let populations = ProbDist::new(populations)?.into_vec();
        Ok(JointState { dims: dims.to_vec(), populations, coherences: None })
    }

    /// A dense state; the matrix must be Hermitian, positive semidefinite and
    /// of unit trace up to the usual tolerances.
    pub fn dense(dims: &[usize], matrix: CMatrix) -> Result<Self> {
        check_dims(dims)?;
        let total: usize = dims.iter().product();
        if matrix.nrows() != total || matrix.ncols() != total {
            return Err(Error::DimensionMismatch { expected: total, found: matrix.nrows() });
        }
        let asym = (&matrix - matrix.adjoint()).iter().map(|z| z.norm()).fold(0.0, f64::max);
        if asym > HERMITIAN_TOL {
            return Err(Error::InvalidJointState(format!("not Hermitian (deviation {asym:.3e})")));
        }
        let mut matrix = (&matrix + matrix.adjoint()) * Complex64::new(0.5, 0.0);
        let trace = matrix.trace().re;
        if (trace - 1.0).abs() >= NORMALIZATION_TOL {
            return Err(Error::InvalidJointState(format!("trace {trace}")));
        }
        matrix /= Complex64::new(trace, 0.0);
        let min_eig = matrix.clone().symmetric_eigenvalues().min();
        if min_eig < -PSD_TOL {
            return Err(Error::InvalidJointState(format!("negative eigenvalue {min_eig:.3e}")));
        }
        let populations = (0..total).map(|k| matrix[(k, k)].re.max(0.0)).collect();
        Ok(JointState { dims: dims.to_vec(), populations, coherences: Some(matrix) })
    }

    /// Product of the given factors, classical.
    pub fn product(factors: &[&ProbDist]) -> Result<Self> {
        let dims: Vec<usize> = factors.iter().map(|f| f.len()).collect();
        check_dims(&dims)?;
        let mut pops = vec![1.0];
        for f in factors {
            pops = pops
                .iter()
                .flat_map(|&a| f.probs().iter().map(move |&b| a * b))
                .collect();
        }
        Ok(JointState { dims, populations: pops, coherences: None })
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn dim(&self) -> usize {
        self.populations.len()
    }

    pub fn populations(&self) -> &[f64] {
        &self.populations
    }

    pub fn coherences(&self) -> Option<&CMatrix> {
        self.coherences.as_ref()
    }

    pub fn is_classical(&self) -> bool {
        self.coherences.is_none()
    }

    /// Flat index of a multi-index, row-major.
    pub fn flat_index(&self, multi: &[usize]) -> usize {
        ravel(multi, &self.dims)
    }

    /// Population of `|i_s j_e>` in a bipartite state.
    pub fn population(&self, i: usize, j: usize) -> f64 {
        self.populations[i * self.dims[1] + j]
    }

    /// Population marginal of one factor.
    pub fn marginal(&self, axis: usize) -> ProbDist {
        let mut out = vec![0.0; self.dims[axis]];
        for (k, &p) in self.populations.iter().enumerate() {
            out[unravel(k, &self.dims)[axis]] += p;
        }
        ProbDist { probs: out }
    }

    /// The state as a matrix (diagonal for classical states).
    pub fn to_matrix(&self) -> CMatrix {
        match &self.coherences {
            Some(m) => m.clone(),
            None => {
                let v = nalgebra::DVector::from_iterator(
                    self.dim(),
                    self.populations.iter().map(|&p| Complex64::new(p, 0.0)),
                );
                CMatrix::from_diagonal(&v)
            }
        }
    }

    /// Partial trace keeping the listed factors (in increasing order).
    pub fn reduce(&self, keep: &[usize]) -> JointState {
        debug_assert!(keep.windows(2).all(|w| w[0] < w[1]));
        let kept_dims: Vec<usize> = keep.iter().map(|&a| self.dims[a]).collect();
        let traced: Vec<usize> = (0..self.dims.len()).filter(|a| !keep.contains(a)).collect();
        let traced_dims: Vec<usize> = traced.iter().map(|&a| self.dims[a]).collect();
        let kept_total: usize = kept_dims.iter().product();
        let traced_total: usize = traced_dims.iter().product();

        let compose = |kept_flat: usize, traced_flat: usize| -> usize {
            let km = unravel(kept_flat, &kept_dims);
            let tm = unravel(traced_flat, &traced_dims);
            let mut full = vec![0; self.dims.len()];
            for (slot, &axis) in keep.iter().enumerate() {
                full[axis] = km[slot];
            }
            for (slot, &axis) in traced.iter().enumerate() {
                full[axis] = tm[slot];
            }
            ravel(&full, &self.dims)
        };

        match &self.coherences {
            None => {
                let pops = (0..kept_total)
                    .map(|a| (0..traced_total).map(|t| self.populations[compose(a, t)]).sum())
                    .collect();
                JointState { dims: kept_dims, populations: pops, coherences: None }
            }
            Some(m) => {
                let index: Vec<Vec<usize>> = (0..kept_total)
                    .map(|a| (0..traced_total).map(|t| compose(a, t)).collect())
                    .collect();
                let mut out = CMatrix::zeros(kept_total, kept_total);
                for a in 0..kept_total {
                    for b in 0..kept_total {
                        out[(a, b)] = (0..traced_total).map(|t| m[(index[a][t], index[b][t])]).sum();
                    }
                }
                let pops = (0..kept_total).map(|k| out[(k, k)].re.max(0.0)).collect();
                JointState { dims: kept_dims, populations: pops, coherences: Some(out) }
            }
        }
    }

    /// Eigenvalues of the state (the populations for a classical state).
    pub fn spectrum(&self) -> Vec<f64> {
        match &self.coherences {
            None => self.populations.clone(),
            Some(m) => m.clone().symmetric_eigenvalues().iter().copied().collect(),
        }
    }

    /// Von Neumann entropy.
    pub fn entropy(&self) -> f64 {
        entropy_of(&self.spectrum())
    }

    /// Von Neumann entropy of a single factor.
    pub fn marginal_entropy(&self, axis: usize) -> f64 {
        match &self.coherences {
            None => shannon_entropy(&self.marginal(axis)),
            Some(_) => self.reduce(&[axis]).entropy(),
        }
    }

    /// Appends an uncorrelated classical factor.
    pub fn tensor(&self, factor: &ProbDist) -> JointState {
        let mut dims = self.dims.clone();
        dims.push(factor.len());
        let populations: Vec<f64> = self
            .populations
            .iter()
            .flat_map(|&a| factor.probs().iter().map(move |&b| a * b))
            .collect();
        let coherences = self.coherences.as_ref().map(|m| {
            let v = nalgebra::DVector::from_iterator(
                factor.len(),
                factor.probs().iter().map(|&p| Complex64::new(p, 0.0)),
            );
            m.kronecker(&CMatrix::from_diagonal(&v))
        });
        JointState { dims, populations, coherences }
    }

    /// Relabels basis states: `map[src] = dst`. For dense states this is the
    /// conjugation by the corresponding permutation matrix.
    pub fn permuted(&self, map: &[usize]) -> JointState {
        assert_eq!(map.len(), self.dim());
        let mut pops = vec![0.0; self.dim()];
        for (src, &dst) in map.iter().enumerate() {
            pops[dst] = self.populations[src];
        }
        let coherences = self.coherences.as_ref().map(|m| {
            let mut out = CMatrix::zeros(m.nrows(), m.ncols());
            for a in 0..m.nrows() {
                for b in 0..m.ncols() {
                    out[(map[a], map[b])] = m[(a, b)];
                }
            }
            out
        });
        JointState { dims: self.dims.clone(), populations: pops, coherences }
    }
}

fn check_dims(dims: &[usize]) -> Result<()> {
    if !(2..=3).contains(&dims.len()) {
        return Err(Error::InvalidJointState(format!("{} factors; expected 2 or 3", dims.len())));
    }
    if dims.contains(&0) {
        return Err(Error::InvalidJointState("zero-dimensional factor".into()));
    }
    Ok(())
}

pub(crate) fn ravel(multi: &[usize], dims: &[usize]) -> usize {
    multi.iter().zip(dims).fold(0, |acc, (&m, &d)| acc * d + m)
}

pub(crate) fn unravel(mut flat: usize, dims: &[usize]) -> Vec<usize> {
    let mut out = vec![0; dims.len()];
    for (slot, &d) in out.iter_mut().zip(dims).rev() {
        *slot = flat % d;
        flat /= d;
    }
    out
}

/// `S(first factor) + S(remaining factors) - S(joint)`.
///
/// Dense states use eigenvalues of the full matrix and of its partial traces.
pub fn mutual_information(joint: &JointState) -> f64 {
    let rest: Vec<usize> = (1..joint.dims.len()).collect();
    let s_first = joint.marginal_entropy(0);
    let s_rest = if rest.len() == 1 {
        joint.marginal_entropy(1)
    } else {
        joint.reduce(&rest).entropy()
    };
    s_first + s_rest - joint.entropy()
}

/// Terms of the finite-bath Landauer equality for one erasure step.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErasureRecord {
    /// Inverse temperature of the initial environment.
    pub beta: f64,
    /// Entropy change of the system.
    pub d_ss: f64,
    /// Entropy change of the environment.
    pub d_se: f64,
    /// Heat dumped into the environment.
    pub q_e: f64,
    /// System-environment mutual information after the step.
    pub i_se: f64,
    /// Relative entropy of the final to the initial environment state.
    pub relent: f64,
}

impl ErasureRecord {
    /// `beta Q_e - (-dS_s + I(s:e) + S(sigma_e || rho_e))`; zero for any
    /// spectrum-preserving evolution of a product thermal state.
    pub fn residual(&self) -> f64 {
        self.beta * self.q_e - (-self.d_ss + self.i_se + self.relent)
    }

    pub fn temperature(&self) -> f64 {
        1.0 / self.beta
    }
}

/// Evaluates every term of the Landauer equality for the transition
/// `rho_s (x) rho_e -> joint_after`.
///
/// `rho_e` must be thermal on `ladder`; its inverse temperature is taken
/// from `beta` when supplied and fitted otherwise.
pub fn landauer_decomposition(
    ladder: &EnergyLadder,
    rho_e: &ProbDist,
    joint_after: &JointState,
    rho_s: &ProbDist,
    beta: Option<f64>,
) -> Result<ErasureRecord> {
    check_dim(ladder.len(), rho_e.len())?;
    if joint_after.dims.len() != 2 {
        return Err(Error::InvalidJointState("expected a bipartite state".into()));
    }
    check_dim(rho_s.len(), joint_after.dims[0])?;
    check_dim(rho_e.len(), joint_after.dims[1])?;
    let beta = match beta {
        Some(b) => {
            check_thermal(ladder, rho_e, b)?;
            b
        }
        None => fit_inverse_temperature(ladder, rho_e)?,
    };

    let sigma_e_pops = joint_after.marginal(1);
    let s_sigma_s = joint_after.marginal_entropy(0);
    let s_sigma_e = joint_after.marginal_entropy(1);
    let s_joint = joint_after.entropy();

    // -Tr(sigma_e ln rho_e) only sees the diagonal of sigma_e
    let cross: f64 = sigma_e_pops
        .probs()
        .iter()
        .zip(rho_e.probs())
        .map(|(&s, &r)| if s > 0.0 { -s * r.ln() } else { 0.0 })
        .sum();

    Ok(ErasureRecord {
        beta,
        d_ss: s_sigma_s - shannon_entropy(rho_s),
        d_se: s_sigma_e - shannon_entropy(rho_e),
        q_e: heat(ladder, &sigma_e_pops, rho_e)?,
        i_se: s_sigma_s + s_sigma_e - s_joint,
        relent: (cross - s_sigma_e).max(0.0),
    })
}
