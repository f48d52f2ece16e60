//! Majorization and passive-state energetics.

use crate::error::{Error, Result};
use crate::qstate::{check_dim, dot, EnergyLadder, ProbDist};

/// Default absolute slack for prefix-sum comparisons.
pub const DEFAULT_EPS: f64 = 1e-12;

/// Indices that sort `values` in descending order. Equal values keep their
/// original index order.
pub fn descending_order(values: &[f64]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    idx.sort_by(|&a, &b| values[b].total_cmp(&values[a]));
    idx
}

pub fn sorted_descending(values: &[f64]) -> Vec<f64> {
    descending_order(values).into_iter().map(|i| values[i]).collect()
}

pub fn prefix_sums(values: &[f64]) -> Vec<f64> {
    values
        .iter()
        .scan(0.0, |acc, &v| {
            *acc += v;
            Some(*acc)
        })
        .collect()
}

/// `p` majorizes `q`: every descending prefix sum of `p` is at least the
/// matching prefix sum of `q`, less `eps`.
pub fn majorizes(p: &ProbDist, q: &ProbDist, eps: f64) -> Result<bool> {
    check_dim(p.len(), q.len())?;
    let sp = prefix_sums(&sorted_descending(p.probs()));
    let sq = prefix_sums(&sorted_descending(q.probs()));
    Ok(sp.iter().zip(&sq).all(|(a, b)| *a >= *b - eps))
}

/// The passive rearrangement of `p`: largest population on the lowest level.
pub fn passive_arrangement(p: &ProbDist) -> ProbDist {
    ProbDist::new(sorted_descending(p.probs())).expect("permutation of a distribution")
}

/// Minimum energy over all unitary (here: permutation) orbits of `p`.
pub fn passive_energy(ladder: &EnergyLadder, p: &ProbDist) -> Result<f64> {
    check_dim(ladder.len(), p.len())?;
    Ok(dot(ladder.levels(), &sorted_descending(p.probs())))
}

/// Energy written through descending partial sums `S_J`:
/// `-sum_{J<d} S_J (e_{J+1} - e_J) + e_d`.
///
/// Agrees with the plain expectation when `p` is already in passive order.
pub fn energy_via_partial_sums(ladder: &EnergyLadder, p: &ProbDist) -> Result<f64> {
    check_dim(ladder.len(), p.len())?;
    let e = ladder.levels();
    let d = e.len();
    let partial = prefix_sums(p.probs());
    let telescoped: f64 = (0..d - 1).map(|j| partial[j] * (e[j + 1] - e[j])).sum();
    Ok(e[d - 1] - telescoped)
}

/// Moves `amount` of population from `donor` to `gainer`, where the gainer
/// already holds strictly more. The result always majorizes `q`.
pub fn concentrate(q: &ProbDist, gainer: usize, donor: usize, amount: f64) -> Result<ProbDist> {
    let probs = q.probs();
    if gainer >= probs.len() || donor >= probs.len() || gainer == donor {
        return Err(Error::Precondition(format!("invalid level pair ({gainer}, {donor})")));
    }
    if !(probs[gainer] > probs[donor]) {
        return Err(Error::Precondition(format!(
            "gainer population {} must exceed donor population {}",
            probs[gainer], probs[donor]
        )));
    }
    if !(amount >= 0.0) || amount > probs[donor] {
        return Err(Error::Precondition(format!(
            "amount {amount} outside [0, {}]",
            probs[donor]
        )));
    }
    let mut out = probs.to_vec();
    out[gainer] += amount;
    out[donor] -= amount;
    ProbDist::new(out)
}
