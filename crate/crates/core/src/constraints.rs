//! Deriving must-link / cannot-link pairs from embeddings and exchanging
//! them between networks.
//!
//! After a training stage, node pairs are scored by the Pearson correlation
//! of their hidden representations. Strongly correlated pairs become
//! must-link candidates, strongly anti-correlated pairs cannot-link
//! candidates. Each network then adopts only the pairs that *every other*
//! network also proposed (set intersection), with contradictory pairs
//! dropped from both sides.

use std::collections::BTreeSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::neural::ConstraintMatrices;
use crate::scalar::Scalar;

/// Unordered node pairs (endpoints normalized `i < j`) labeled must-link or
/// cannot-link. Unlike [`ConstraintMatrices`] this is a plain value type and
/// carries no node-count bound; validate against one via [`Self::to_matrices`].
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ConstraintSet {
    pub must: BTreeSet<(usize, usize)>,
    pub cannot: BTreeSet<(usize, usize)>,
}

impl ConstraintSet {
    pub fn is_empty(&self) -> bool {
        self.must.is_empty() && self.cannot.is_empty()
    }

    pub fn len(&self) -> usize {
        self.must.len() + self.cannot.len()
    }

    /// Converts to the trainer's representation, validating ranges and
    /// must/cannot disjointness.
    pub fn to_matrices(&self, n: usize) -> Result<ConstraintMatrices> {
        ConstraintMatrices::from_pairs(n, self.must.iter().copied(), self.cannot.iter().copied())
    }

    /// `M\ti\tj` lines then `C\ti\tj` lines, each set in ascending pair
    /// order — the on-disk dump format.
    pub fn to_dump_string(&self) -> String {
        let mut out = String::new();
        for &(i, j) in &self.must {
            out.push_str(&format!("M\t{i}\t{j}\n"));
        }
        for &(i, j) in &self.cannot {
            out.push_str(&format!("C\t{i}\t{j}\n"));
        }
        out
    }
}

/// Size of the symmetric difference between two constraint sets, summed
/// over the must and cannot parts. Zero iff the sets are identical.
pub fn symmetric_difference_size(a: &ConstraintSet, b: &ConstraintSet) -> usize {
    a.must.symmetric_difference(&b.must).count() + a.cannot.symmetric_difference(&b.cannot).count()
}

/// Pearson correlation between rows `h_i` and `h_j` for each listed pair.
///
/// Entries are `None` when either row has zero variance (correlation
/// undefined); callers drop those pairs from candidate pools. Requires at
/// least two columns. Accumulation is in `f64` regardless of `S`.
pub fn pairwise_pcc<S: Scalar>(
    h: &Matrix<S>,
    pairs: &[(usize, usize)],
) -> Result<Vec<Option<f64>>> {
    if h.cols() < 2 {
        return Err(Error::invalid(format!(
            "correlation needs at least 2 embedding dimensions, found {}",
            h.cols()
        )));
    }
    for &(i, j) in pairs {
        if i >= h.rows() || j >= h.rows() {
            return Err(Error::invalid(format!(
                "pair ({i}, {j}) out of range for {} rows",
                h.rows()
            )));
        }
    }
    let d = h.cols() as f64;
    // Independent per-pair computations: parallel iteration preserves order
    // and cannot perturb results.
    Ok(pairs
        .par_iter()
        .map(|&(i, j)| {
            let u = h.row(i);
            let v = h.row(j);
            let mean = |r: &[S]| r.iter().map(|&x| x.to_f64().unwrap()).sum::<f64>() / d;
            let (mu, mv) = (mean(u), mean(v));
            let mut cov = 0.0;
            let mut var_u = 0.0;
            let mut var_v = 0.0;
            for (a, b) in u.iter().zip(v.iter()) {
                let du = a.to_f64().unwrap() - mu;
                let dv = b.to_f64().unwrap() - mv;
                cov += du * dv;
                var_u += du * du;
                var_v += dv * dv;
            }
            if var_u == 0.0 || var_v == 0.0 {
                None
            } else {
                Some(cov / (var_u * var_v).sqrt())
            }
        })
        .collect())
}

fn sorted_by_score(
    candidates: &[((usize, usize), f64)],
    descending: bool,
) -> Vec<((usize, usize), f64)> {
    let mut sorted = candidates.to_vec();
    sorted.sort_by(|a, b| {
        let ord = a.1.total_cmp(&b.1);
        let ord = if descending { ord.reverse() } else { ord };
        ord.then(a.0.cmp(&b.0))
    });
    sorted
}

/// Picks the `k` highest-scoring pairs as must-link and the `k` lowest as
/// cannot-link. Ties break toward the lexicographically smaller pair, and
/// the cannot side skips anything already claimed as must, so the result is
/// deterministic and disjoint. Errors when `2k` exceeds the candidate count.
pub fn extract_topk(candidates: &[((usize, usize), f64)], k: usize) -> Result<ConstraintSet> {
    if 2 * k > candidates.len() {
        return Err(Error::invalid(format!(
            "cannot draw {k} must-link and {k} cannot-link pairs from {} candidates",
            candidates.len()
        )));
    }
    let must: BTreeSet<(usize, usize)> =
        sorted_by_score(candidates, true).iter().take(k).map(|&(p, _)| p).collect();
    let cannot: BTreeSet<(usize, usize)> = sorted_by_score(candidates, false)
        .iter()
        .map(|&(p, _)| p)
        .filter(|p| !must.contains(p))
        .take(k)
        .collect();
    Ok(ConstraintSet { must, cannot })
}

/// Thresholded extraction: pairs scoring `>= f1` become must-link, pairs
/// scoring `<= f2` cannot-link. Requires `f2 < f1`, which also guarantees
/// disjointness.
pub fn extract_threshold(
    candidates: &[((usize, usize), f64)],
    f1: f64,
    f2: f64,
) -> Result<ConstraintSet> {
    // `partial_cmp` so NaN thresholds fail instead of slipping through.
    if f2.partial_cmp(&f1) != Some(std::cmp::Ordering::Less) {
        return Err(Error::invalid(format!(
            "cannot-link threshold f2 = {f2} must be strictly below must-link threshold f1 = {f1}"
        )));
    }
    let mut set = ConstraintSet::default();
    for &(pair, score) in candidates {
        if score >= f1 {
            set.must.insert(pair);
        } else if score <= f2 {
            set.cannot.insert(pair);
        }
    }
    Ok(set)
}

/// Result of reconciling constraint proposals from several networks.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MergeOutcome {
    pub merged: ConstraintSet,
    /// Pairs that survived intersection on both sides and were therefore
    /// dropped from both.
    pub conflicts: usize,
}

/// Keeps only pairs proposed by *every* input set (per side), then removes
/// pairs the intersection claims as both must and cannot. Order of the
/// inputs does not matter.
pub fn merge_constraints(sets: &[ConstraintSet]) -> Result<MergeOutcome> {
    let Some((first, rest)) = sets.split_first() else {
        return Err(Error::invalid("cannot merge an empty collection of constraint sets"));
    };
    let mut must = first.must.clone();
    let mut cannot = first.cannot.clone();
    for set in rest {
        must = must.intersection(&set.must).copied().collect();
        cannot = cannot.intersection(&set.cannot).copied().collect();
    }
    let conflicting: Vec<(usize, usize)> = must.intersection(&cannot).copied().collect();
    for pair in &conflicting {
        must.remove(pair);
        cannot.remove(pair);
    }
    Ok(MergeOutcome { merged: ConstraintSet { must, cannot }, conflicts: conflicting.len() })
}

/// Candidate pair pool for constraint scoring. Up to 5000 nodes this is
/// every unordered pair; beyond that it is `100 * n` distinct pairs sampled
/// uniformly with the given seed. Always returned in ascending order.
pub fn sample_pair_pool(n: usize, seed: u64) -> Vec<(usize, usize)> {
    use rand::{Rng, SeedableRng};
    if n < 2 {
        return Vec::new();
    }
    if n <= 5000 {
        let mut pool = Vec::with_capacity(n * (n - 1) / 2);
        for i in 0..n {
            for j in i + 1..n {
                pool.push((i, j));
            }
        }
        return pool;
    }
    let target = 100 * n;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut picked = BTreeSet::new();
    while picked.len() < target {
        let i = rng.gen_range(0..n);
        let j = rng.gen_range(0..n);
        if i != j {
            picked.insert((i.min(j), i.max(j)));
        }
    }
    picked.into_iter().collect()
}
