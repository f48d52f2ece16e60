//! Brute-force and sampling references for the optimized routines.
//!
//! Nothing here is fast; everything is deterministic for a fixed seed and
//! refuses inputs beyond its enumeration cap.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::qstate::{mutual_information, CMatrix, EnergyLadder, JointState, ProbDist};

/// Largest number of items the permutation oracles enumerate (8! orderings).
pub const PERMUTATION_CAP: usize = 8;
/// Largest number of controlled permutations the catalytic oracle visits.
pub const CONTROLLED_CAP: usize = 2_000_000;
/// Minimum mutual information of a sampled correlated joint.
pub const CORRELATION_FLOOR: f64 = 0.01;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Rearranges `perm` into the next permutation in lexicographic order;
/// `false` once the last one has been passed (and `perm` is reset).
pub fn next_permutation(perm: &mut [usize]) -> bool {
    let n = perm.len();
    if n < 2 {
        return false;
    }
    let Some(i) = (0..n - 1).rev().find(|&i| perm[i] < perm[i + 1]) else {
        perm.reverse();
        return false;
    };
    let j = (i + 1..n).rev().find(|&j| perm[j] > perm[i]).expect("successor exists");
    perm.swap(i, j);
    perm[i + 1..].reverse();
    true
}

fn all_permutations(n: usize) -> Vec<Vec<usize>> {
    let mut perm: Vec<usize> = (0..n).collect();
    let mut out = vec![perm.clone()];
    while next_permutation(&mut perm) {
        out.push(perm.clone());
    }
    out
}

fn check_cap(dim: usize, cap: usize) -> Result<()> {
    if dim > cap {
        Err(Error::DimensionCap { dim, cap })
    } else {
        Ok(())
    }
}

/// Lowest energy of any rearrangement of `p` on `ladder`.
pub fn brute_force_passive_energy(ladder: &EnergyLadder, p: &ProbDist) -> Result<f64> {
    check_cap(p.len(), PERMUTATION_CAP)?;
    crate::qstate::check_dim(ladder.len(), p.len())?;
    let mut perm: Vec<usize> = (0..p.len()).collect();
    let mut best = f64::INFINITY;
    loop {
        let e: f64 = perm.iter().enumerate().map(|(k, &j)| ladder.levels()[j] * p.probs()[k]).sum();
        best = best.min(e);
        if !next_permutation(&mut perm) {
            return Ok(best);
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum MarginalObjective {
    MinSystemEntropy,
    /// Least `Tr[H_e (sigma_e - rho_e)]`.
    MinHeat { ladder: EnergyLadder, rho_e: ProbDist },
}

#[derive(Debug, Clone, PartialEq)]
pub struct BruteForceOptimum {
    pub value: f64,
    /// `placement[k]` is the flat `(s, e)` index receiving eigenvalue `k`.
    pub placement: Vec<usize>,
    pub system: ProbDist,
    pub environment: ProbDist,
}

/// Best placement of the joint eigenvalues on the product basis, by
/// exhaustive search. The first optimum in lexicographic order is kept.
pub fn brute_force_best_marginal(
    spectrum: &ProbDist,
    d_s: usize,
    d_e: usize,
    objective: &MarginalObjective,
) -> Result<BruteForceOptimum> {
    check_cap(d_s * d_e, PERMUTATION_CAP)?;
    crate::qstate::check_dim(d_s * d_e, spectrum.len())?;
    if let MarginalObjective::MinHeat { ladder, rho_e } = objective {
        crate::qstate::check_dim(d_e, ladder.len())?;
        crate::qstate::check_dim(d_e, rho_e.len())?;
    }
    let p = spectrum.probs();
    let marginals = |perm: &[usize]| {
        let mut s = vec![0.0; d_s];
        let mut e = vec![0.0; d_e];
        for (k, &dst) in perm.iter().enumerate() {
            s[dst / d_e] += p[k];
            e[dst % d_e] += p[k];
        }
        (s, e)
    };
    let mut perm: Vec<usize> = (0..d_s * d_e).collect();
    let mut best: Option<(f64, Vec<usize>)> = None;
    loop {
        let (s, e) = marginals(&perm);
        let value = match objective {
            MarginalObjective::MinSystemEntropy => crate::qstate::entropy_of(&s),
            MarginalObjective::MinHeat { ladder, rho_e } => ladder
                .levels()
                .iter()
                .zip(e.iter().zip(rho_e.probs()))
                .map(|(en, (a, b))| en * (a - b))
                .sum(),
        };
        if best.as_ref().is_none_or(|(v, _)| value < *v) {
            best = Some((value, perm.clone()));
        }
        if !next_permutation(&mut perm) {
            break;
        }
    }
    let (value, placement) = best.expect("at least one permutation");
    let (s, e) = marginals(&placement);
    Ok(BruteForceOptimum { value, placement, system: ProbDist::new(s)?, environment: ProbDist::new(e)? })
}

/// Smallest environment entropy reachable from `joint (x) catalyst` by any
/// system-controlled permutation that returns the catalyst marginal to
/// within `tol`. The identity is always admissible.
pub fn brute_force_catalytic_min_env_entropy(joint: &JointState, catalyst: &ProbDist, tol: f64) -> Result<f64> {
    if joint.dims().len() != 2 || !joint.is_classical() {
        return Err(Error::InvalidJointState("expected a classical bipartite state".into()));
    }
    let (d_s, d_e, d_v) = (joint.dims()[0], joint.dims()[1], catalyst.len());
    let block = d_e * d_v;
    check_cap(block, PERMUTATION_CAP)?;
    let perms = all_permutations(block);
    let total = (perms.len() as f64).powi(d_s as i32);
    if total > CONTROLLED_CAP as f64 {
        return Err(Error::DimensionCap { dim: d_s * block, cap: CONTROLLED_CAP });
    }

    // contribution of each block permutation to the (environment, catalyst) marginals
    let mut options: Vec<Vec<(Vec<f64>, Vec<f64>)>> = Vec::with_capacity(d_s);
    for i in 0..d_s {
        let weights: Vec<f64> = (0..block)
            .map(|k| joint.population(i, k / d_v) * catalyst.probs()[k % d_v])
            .collect();
        let opts = perms
            .iter()
            .map(|perm| {
                let mut e = vec![0.0; d_e];
                let mut v = vec![0.0; d_v];
                for (src, &dst) in perm.iter().enumerate() {
                    e[dst / d_v] += weights[src];
                    v[dst % d_v] += weights[src];
                }
                (e, v)
            })
            .collect();
        options.push(opts);
    }

    let mut best = f64::INFINITY;
    let mut choice = vec![0usize; d_s];
    loop {
        let mut e = vec![0.0; d_e];
        let mut v = vec![0.0; d_v];
        for (i, &c) in choice.iter().enumerate() {
            let (oe, ov) = &options[i][c];
            e.iter_mut().zip(oe).for_each(|(a, b)| *a += b);
            v.iter_mut().zip(ov).for_each(|(a, b)| *a += b);
        }
        let kept = v.iter().zip(catalyst.probs()).all(|(a, b)| (a - b).abs() <= tol);
        if kept {
            best = best.min(crate::qstate::entropy_of(&e));
        }
        // odometer over the per-level choices
        let mut pos = 0;
        loop {
            if pos == d_s {
                return Ok(best);
            }
            choice[pos] += 1;
            if choice[pos] < perms.len() {
                break;
            }
            choice[pos] = 0;
            pos += 1;
        }
    }
}

/// Haar-distributed unitary: QR of a complex Ginibre matrix with the phases
/// of `R`'s diagonal moved into `Q`.
pub fn random_unitary(dim: usize, seed: u64) -> CMatrix {
    let mut r = rng(seed);
    let g = CMatrix::from_fn(dim, dim, |_, _| {
        let re: f64 = r.sample(StandardNormal);
        let im: f64 = r.sample(StandardNormal);
        Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
    });
    let qr = g.qr();
    let (mut q, rr) = (qr.q(), qr.r());
    for j in 0..dim {
        let d = rr[(j, j)];
        let phase = if d.norm() > 0.0 { d / d.norm() } else { Complex64::new(1.0, 0.0) };
        for i in 0..dim {
            q[(i, j)] *= phase;
        }
    }
    q
}

/// `exp(-i H t)` by Pade scaling and squaring.
pub fn matrix_exp(h: &CMatrix, t: f64) -> CMatrix {
    (h * Complex64::new(0.0, -t)).exp()
}

/// Entries drawn uniformly from `[0.05, 1]` and normalized.
pub fn random_distribution<R: Rng>(dim: usize, rng: &mut R) -> ProbDist {
    let w: Vec<f64> = (0..dim).map(|_| rng.random_range(0.05..=1.0)).collect();
    ProbDist::from_weights(w).expect("positive weights")
}

/// A random full-rank classical joint. Product of random marginals when
/// `correlated` is false; otherwise rejection-sampled until the mutual
/// information exceeds [`CORRELATION_FLOOR`].
pub fn random_correlated_joint(d_s: usize, d_e: usize, seed: u64, correlated: bool) -> JointState {
    let mut r = rng(seed);
    if !correlated {
        let a = random_distribution(d_s, &mut r);
        let b = random_distribution(d_e, &mut r);
        return JointState::product(&[&a, &b]).expect("two factors");
    }
    loop {
        let p = random_distribution(d_s * d_e, &mut r);
        let joint = JointState::classical(&[d_s, d_e], p.into_vec()).expect("valid populations");
        if mutual_information(&joint) > CORRELATION_FLOOR {
            return joint;
        }
    }
}

/// Equal-transfer catalyst from a dense linear solve of the `d_v` transfer
/// equations plus normalization. Returns the spectrum and `delta`.
pub fn catalyst_linear_solve(
    q_ij: f64,
    q_ijp: f64,
    q_ipj: f64,
    q_ipjp: f64,
    dim: usize,
) -> Result<(Vec<f64>, f64)> {
    let n = dim;
    let mut a = DMatrix::<f64>::zeros(n + 1, n + 1);
    let mut b = DVector::<f64>::zeros(n + 1);
    for k in 0..n - 1 {
        a[(k, k)] = q_ipjp;
        a[(k, k + 1)] = -q_ipj;
        a[(k, n)] = -1.0;
    }
    a[(n - 1, n - 1)] = q_ij;
    a[(n - 1, 0)] -= q_ijp;
    a[(n - 1, n)] = -1.0;
    for k in 0..n {
        a[(n, k)] = 1.0;
    }
    b[n] = 1.0;
    let x = a
        .lu()
        .solve(&b)
        .ok_or_else(|| Error::CatalystInfeasible { dim, reason: "singular transfer system".into() })?;
    Ok((x.iter().take(n).copied().collect(), x[n]))
}

/// Entropy of the system marginal of `U (p_s (x) p_e) U^dag`.
pub fn evolved_system_entropy(u: &CMatrix, p_s: &ProbDist, p_e: &ProbDist) -> Result<f64> {
    let joint = JointState::product(&[p_s, p_e])?;
    let rho = joint.to_matrix();
    let out = JointState::dense(&[p_s.len(), p_e.len()], u * rho * u.adjoint())?;
    Ok(out.marginal_entropy(0))
}

/// A random distribution majorized by `p`: a convex mixture of four random
/// rearrangements of `p`.
pub fn random_majorized<R: Rng>(p: &ProbDist, rng: &mut R) -> ProbDist {
    let n = p.len();
    let mut out = vec![0.0; n];
    let mut weights: Vec<f64> = (0..4).map(|_| rng.random_range(0.0..1.0)).collect();
    let total: f64 = weights.iter().sum();
    weights.iter_mut().for_each(|w| *w /= total);
    for w in weights {
        let mut perm: Vec<usize> = (0..n).collect();
        for i in (1..n).rev() {
            perm.swap(i, rng.random_range(0..=i));
        }
        for (k, &dst) in perm.iter().enumerate() {
            out[dst] += w * p.probs()[k];
        }
    }
    ProbDist::new(out).expect("mixture of permutations")
}
