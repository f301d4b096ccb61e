//! Ranking distances, all normalized by `n²` (entry-wise error by `n`).
//!
//! Counts are accumulated in integers and converted once, so with an exact
//! scalar every metric is exact.

use crate::error::{Error, Result};
use crate::fenwick::Fenwick;
use crate::perm::Permutation;
use crate::scalar::Scalar;

fn same_size(a: &Permutation, b: &Permutation) -> Result<usize> {
    if a.len() != b.len() {
        return Err(Error::SizeMismatch {
            left: a.len(),
            right: b.len(),
        });
    }
    Ok(a.len())
}

fn normalized<S: Scalar>(count: u64, n: usize) -> S {
    let n = n as i64;
    S::from_ratio(count as i64, n * n)
}

/// `Σ_t |a(t) - b(t)|`.
pub fn footrule_sum(a: &Permutation, b: &Permutation) -> Result<u64> {
    same_size(a, b)?;
    Ok(a.ranks()
        .iter()
        .zip(b.ranks())
        .map(|(&x, &y)| x.abs_diff(y) as u64)
        .sum())
}

/// Normalized Spearman footrule `‖a - b‖₁ / n²`.
pub fn d_sf<S: Scalar>(a: &Permutation, b: &Permutation) -> Result<S> {
    let n = same_size(a, b)?;
    Ok(normalized(footrule_sum(a, b)?, n))
}

/// Entry-wise error `|a(t) - b(t)| / n` at position `t`.
pub fn d_entrywise<S: Scalar>(a: &Permutation, b: &Permutation, t: usize) -> Result<S> {
    let n = same_size(a, b)?;
    let diff = a.rank(t)?.abs_diff(b.rank(t)?);
    Ok(S::from_ratio(diff as i64, n as i64))
}

/// Number of item pairs ordered one way by `b` and the other way by `a`.
/// O(n log n).
pub fn kendall_flips(a: &Permutation, b: &Permutation) -> Result<u64> {
    let n = same_size(a, b)?;
    // Walk items in increasing b-rank and count earlier items with larger a-rank.
    let by_b = b.inverse();
    let mut seen = Fenwick::new(n);
    let mut flips = 0u64;
    for (k, &item) in by_b.ranks().iter().enumerate() {
        let value = a.ranks()[item - 1];
        flips += (k as u64) - seen.prefix(value) as u64;
        seen.add(value, 1);
    }
    Ok(flips)
}

/// Normalized Kendall tau distance.
pub fn d_kt<S: Scalar>(a: &Permutation, b: &Permutation) -> Result<S> {
    let n = same_size(a, b)?;
    Ok(normalized(kendall_flips(a, b)?, n))
}

/// Normalized ℓ₁ distance between inversion tables.
pub fn d_inv<S: Scalar>(a: &Permutation, b: &Permutation) -> Result<S> {
    let n = same_size(a, b)?;
    let ra = a.relative_ranks();
    let rb = b.relative_ranks();
    let sum: u64 = ra
        .as_slice()
        .iter()
        .zip(rb.as_slice())
        .map(|(&x, &y)| x.abs_diff(y) as u64)
        .sum();
    Ok(normalized(sum, n))
}

/// Ranking induced by sorting scores: rank 1 for the smallest score.
///
/// Equal scores are ordered by position, the earlier item getting the lower
/// rank.
pub fn ranking_from_scores<S: Scalar>(scores: &[S]) -> Result<Permutation> {
    if scores.is_empty() {
        return Err(Error::InvalidPermutation("no scores".into()));
    }
    if let Some(i) = scores.iter().position(|y| !y.is_finite_value()) {
        return Err(Error::NonFiniteScore(i + 1));
    }
    let mut order: Vec<usize> = (0..scores.len()).collect();
    // Stable sort keeps earlier positions first among ties.
    order.sort_by(|&i, &j| {
        scores[i]
            .partial_cmp(&scores[j])
            .expect("finite scores compare")
    });
    let mut ranks = vec![0; scores.len()];
    for (k, &i) in order.iter().enumerate() {
        ranks[i] = k + 1;
    }
    Ok(Permutation::from_vec_unchecked(ranks))
}
