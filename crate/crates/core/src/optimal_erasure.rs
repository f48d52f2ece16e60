//! Maximum erasure of a system against a finite environment.
//!
//! Sorting the joint spectrum of `rho_s (x) rho_e` in descending order and
//! handing consecutive blocks of `d_e` eigenvalues to consecutive system
//! levels yields the most pure system marginal any unitary can reach. When
//! the consecutive-eigenvalue ratios are periodic the output is a product
//! state, so the environment entropy grows by exactly what the system loses.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::majorization::{descending_order, prefix_sums};
use crate::qstate::{
    fit_inverse_temperature, heat, shannon_entropy, thermal_state_with_entropy, EnergyLadder, ProbDist,
};

/// Relative tolerance on eigenvalue ratios.
pub const RATIO_RTOL: f64 = 1e-10;
/// Absolute tolerance on the product form of the block-sorted state.
pub const PRODUCT_TOL: f64 = 1e-12;

fn ratios(p: &[f64]) -> Vec<f64> {
    p.windows(2).map(|w| w[0] / w[1]).collect()
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= RATIO_RTOL * a.abs().max(b.abs())
}

/// Is `r[k + lambda * period] == r[k]` for every admissible `k` and `lambda`?
fn is_periodic(r: &[f64], period: usize) -> bool {
    (period..r.len()).all(|k| close(r[k], r[k % period]))
}

/// Which periodicity condition makes the block-sorted state a product.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "m", rename_all = "snake_case")]
pub enum Periodicity {
    /// `d_e = m d_s` and the environment ratios repeat with period `m`.
    EnvironmentPeriodic(usize),
    /// `d_s = m d_e` and the system ratios repeat with period `d_e`.
    SystemPeriodic(usize),
    None,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PeriodicityReport {
    /// `p_e[j] / p_e[j+1] >= p_s[0] / p_s[last]` for every `j`.
    pub premise_ok: bool,
    pub condition: Periodicity,
    /// Consecutive ratios of the descending environment spectrum.
    pub env_ratios: Vec<f64>,
    /// Consecutive ratios of the descending system spectrum.
    pub system_ratios: Vec<f64>,
}

impl PeriodicityReport {
    pub fn admits_block_sort(&self) -> bool {
        self.premise_ok && self.condition != Periodicity::None
    }
}

fn require_full_rank(p: &ProbDist, which: &str) -> Result<()> {
    if p.is_full_rank() {
        Ok(())
    } else {
        Err(Error::NotFullRank(format!(
            "{which} state has a zero eigenvalue; some joint ratio would diverge"
        )))
    }
}

/// Checks the ratio premise and both periodicity conditions on the
/// descending spectra of `p_s` and `p_e`.
pub fn check_periodicity(p_s: &ProbDist, p_e: &ProbDist) -> Result<PeriodicityReport> {
    require_full_rank(p_s, "system")?;
    require_full_rank(p_e, "environment")?;
    let s = crate::majorization::sorted_descending(p_s.probs());
    let e = crate::majorization::sorted_descending(p_e.probs());
    let (d_s, d_e) = (s.len(), e.len());
    let r_s = ratios(&s);
    let r_e = ratios(&e);

    let spread = s[0] / s[d_s - 1];
    let premise_ok = r_e.iter().all(|&r| r >= spread * (1.0 - RATIO_RTOL));

    let condition = if d_e % d_s == 0 && is_periodic(&r_e, d_e / d_s) {
        Periodicity::EnvironmentPeriodic(d_e / d_s)
    } else if d_s % d_e == 0 && is_periodic(&r_s, d_e) {
        Periodicity::SystemPeriodic(d_s / d_e)
    } else {
        Periodicity::None
    };
    Ok(PeriodicityReport { premise_ok, condition, env_ratios: r_e, system_ratios: r_s })
}

/// Where each joint eigenvalue goes. The eigenvalue of a given rank lands on
/// [`BlockPermutation::target`] and came from `sources[rank]`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockPermutation {
    pub d_s: usize,
    pub d_e: usize,
    pub sources: Vec<(usize, usize)>,
}

impl BlockPermutation {
    pub fn target(&self, rank: usize) -> (usize, usize) {
        (rank / self.d_e, rank % self.d_e)
    }

    /// `map[src] = dst` on the flattened `(s, e)` basis.
    pub fn index_map(&self) -> Vec<usize> {
        let mut map = vec![0; self.d_s * self.d_e];
        for (rank, &(i, j)) in self.sources.iter().enumerate() {
            map[i * self.d_e + j] = rank;
        }
        map
    }
}

/// Output of the block-sorting permutation, with or without the
/// periodicity guarantee.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BlockSorted {
    pub permutation: BlockPermutation,
    /// Joint spectrum in descending order.
    pub joint_sorted: Vec<f64>,
    pub sigma_s: ProbDist,
    /// Environment marginal of the block-sorted state.
    pub sigma_e: ProbDist,
    /// Largest `|p_k - sigma_s(k / d_e) sigma_e(k % d_e)|`.
    pub product_deviation: f64,
}

/// Applies the block-sorting permutation to `p_s (x) p_e` without checking
/// the periodicity conditions.
pub fn block_sort(p_s: &ProbDist, p_e: &ProbDist) -> BlockSorted {
    let (d_s, d_e) = (p_s.len(), p_e.len());
    let joint: Vec<f64> = p_s
        .probs()
        .iter()
        .flat_map(|&a| p_e.probs().iter().map(move |&b| a * b))
        .collect();
    let order = descending_order(&joint);
    let sources: Vec<(usize, usize)> = order.iter().map(|&k| (k / d_e, k % d_e)).collect();
    let sorted: Vec<f64> = order.iter().map(|&k| joint[k]).collect();

    let mut s = vec![0.0; d_s];
    let mut e = vec![0.0; d_e];
    for (rank, &p) in sorted.iter().enumerate() {
        s[rank / d_e] += p;
        e[rank % d_e] += p;
    }
    let sigma_s = ProbDist::new(s).expect("block sums of a distribution");
    let sigma_e = ProbDist::new(e).expect("block sums of a distribution");
    let product_deviation = sorted
        .iter()
        .enumerate()
        .map(|(rank, &p)| (p - sigma_s.probs()[rank / d_e] * sigma_e.probs()[rank % d_e]).abs())
        .fold(0.0, f64::max);
    BlockSorted {
        permutation: BlockPermutation { d_s, d_e, sources },
        joint_sorted: sorted,
        sigma_s,
        sigma_e,
        product_deviation,
    }
}

/// The maximum-erasure permutation, valid when the premise and one
/// periodicity condition hold. The output is verified to be a product.
pub fn build_vse(p_s: &ProbDist, p_e: &ProbDist) -> Result<BlockSorted> {
    let report = check_periodicity(p_s, p_e)?;
    if !report.admits_block_sort() {
        return Err(Error::PeriodicityViolated);
    }
    let out = block_sort(p_s, p_e);
    if out.product_deviation > PRODUCT_TOL {
        return Err(Error::NotProduct(out.product_deviation));
    }
    Ok(out)
}

/// Prefix sums of the descending joint spectrum at `I d_e`, `I = 1..d_s`:
/// no unitary can give the system a more concentrated marginal.
pub fn max_erasure_bound(p_se_sorted: &ProbDist, d_s: usize, d_e: usize) -> Result<Vec<f64>> {
    crate::qstate::check_dim(d_s * d_e, p_se_sorted.len())?;
    let p = p_se_sorted.probs();
    if p.windows(2).any(|w| w[0] < w[1]) {
        return Err(Error::Precondition("joint spectrum must be sorted descending".into()));
    }
    let sums = prefix_sums(p);
    let mut out: Vec<f64> = (1..=d_s).map(|i| sums[i * d_e - 1]).collect();
    // total probability
    out[d_s - 1] = 1.0;
    Ok(out)
}

/// The exponent `gamma < 1` with `p_se[j] / p_se[j+1] = (p_e[j] / p_e[j+1])^gamma`
/// for the first `d_e - 1` joint ratios, if one exists.
pub fn thermal_exponent(p_se_sorted: &ProbDist, p_e: &ProbDist, d_e: usize) -> Option<f64> {
    if p_e.len() != d_e || p_se_sorted.len() < d_e || d_e < 2 {
        return None;
    }
    let joint = p_se_sorted.probs();
    let env = p_e.probs();
    let pairs: Vec<(f64, f64)> = (0..d_e - 1)
        .map(|j| ((env[j] / env[j + 1]).ln(), (joint[j] / joint[j + 1]).ln()))
        .collect();
    if pairs.iter().any(|(x, y)| !x.is_finite() || !y.is_finite()) {
        return None;
    }
    let sxx: f64 = pairs.iter().map(|(x, _)| x * x).sum();
    if sxx == 0.0 {
        return None;
    }
    let gamma = pairs.iter().map(|(x, y)| x * y).sum::<f64>() / sxx;
    let fits = pairs.iter().all(|&(x, y)| {
        let (a, b) = ((gamma * x).exp(), y.exp());
        close(a, b)
    });
    (fits && gamma < 1.0).then_some(gamma)
}

/// Heat needed to bring the thermal `rho_e` to the thermal state whose
/// entropy is larger by `-d_ss`: the least any erasure of `d_ss` can cost.
pub fn min_heat(ladder: &EnergyLadder, rho_e: &ProbDist, d_ss: f64) -> Result<f64> {
    fit_inverse_temperature(ladder, rho_e)?;
    if d_ss == 0.0 {
        return Ok(0.0);
    }
    let target = shannon_entropy(rho_e) - d_ss;
    let matched = thermal_state_with_entropy(ladder, target)?;
    heat(ladder, &matched.state, rho_e)
}

/// Everything the erasure checker reports for one pair of marginals.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErasureCheck {
    pub periodicity: PeriodicityReport,
    pub bounds: Vec<f64>,
    /// Present when the block sort yields a product state.
    pub sigma_s: Option<ProbDist>,
    pub sigma_e: Option<ProbDist>,
    pub d_ss: f64,
    pub gamma: Option<f64>,
    pub achieved_heat: Option<f64>,
    pub min_heat: f64,
}

/// Runs the periodicity checks, the block sort and the heat comparison for
/// a thermal environment on `ladder`.
pub fn check_erasure(p_s: &ProbDist, p_e: &ProbDist, ladder: &EnergyLadder) -> Result<ErasureCheck> {
    crate::qstate::check_dim(ladder.len(), p_e.len())?;
    let periodicity = check_periodicity(p_s, p_e)?;
    let sorted = block_sort(p_s, p_e);
    let joint = ProbDist::new(sorted.joint_sorted.clone())?;
    let bounds = max_erasure_bound(&joint, p_s.len(), p_e.len())?;
    // the block sort always reaches the bound, product or not
    let d_ss = shannon_entropy(&sorted.sigma_s) - shannon_entropy(p_s);
    let exact = periodicity.admits_block_sort() && sorted.product_deviation <= PRODUCT_TOL;
    let gamma = if exact { thermal_exponent(&joint, p_e, p_e.len()) } else { None };
    let achieved_heat = if exact { Some(heat(ladder, &sorted.sigma_e, p_e)?) } else { None };
    Ok(ErasureCheck {
        periodicity,
        bounds,
        sigma_s: exact.then(|| sorted.sigma_s.clone()),
        sigma_e: exact.then(|| sorted.sigma_e.clone()),
        d_ss,
        gamma,
        achieved_heat,
        min_heat: min_heat(ladder, p_e, d_ss)?,
    })
}
