//! Least-squares ranking estimation by online insertion.
//!
//! The squared loss `‖y - x(γ)‖²` splits into one term per position, and each
//! term depends only on the relative rank `r_t(γ)`. Since relative-rank
//! vectors are in bijection with rankings, the minimizer picks every `r_t`
//! independently as the table entry nearest to `y_t`. Inserting item `t` at
//! that rank into a rank-indexed sequence and inverting the final sequence
//! recovers the ranking in O(n log n).

use crate::error::{Error, Result};
use crate::fenwick::Fenwick;
use crate::metrics::ranking_from_scores;
use crate::model::{check_delta, ScoreTable, MAX_ENUMERATION};
use crate::ostree::OrderStatTree;
use crate::perm::{permutations, Permutation, RelativeRankVector};
use crate::scalar::Scalar;

/// Relative rank in `1..=t` whose table score is nearest to `y`.
///
/// Exact half-way ties go to the smaller rank; scores beyond either end of
/// the row clamp to 1 or `t`.
pub fn choose_relative_rank<S: Scalar>(y: &S, t: usize, table: &ScoreTable<S>) -> Result<usize> {
    if t == 0 {
        return Err(Error::PositionOutOfRange { t, n: 0 });
    }
    table.check_covers(t)?;
    let guess = match table {
        ScoreTable::Parametric => {
            // Nearest integer to y (t + 1), found from its floor.
            let scaled = y.clone() * S::from_ratio(t as i64 + 1, 1);
            scaled.floor_i64().clamp(1, t as i64) as usize
        }
        ScoreTable::Explicit(_) => {
            // Largest r with x(t, r) <= y; rows are strictly increasing.
            let (mut lo, mut hi) = (1, t);
            while lo < hi {
                let mid = (lo + hi).div_ceil(2);
                if table.score(t, mid)? <= *y {
                    lo = mid;
                } else {
                    hi = mid - 1;
                }
            }
            lo
        }
    };
    // Settle between neighbours using the same distance the objective uses.
    let mut best = guess.saturating_sub(1).max(1);
    let mut best_dist = (y.clone() - table.score(t, best)?).abs();
    for r in best + 1..=(guess + 1).min(t) {
        let dist = (y.clone() - table.score(t, r)?).abs();
        if dist < best_dist {
            best = r;
            best_dist = dist;
        }
    }
    Ok(best)
}

/// Running state of the insertion estimator after `t` scores.
#[derive(Clone, Debug)]
pub struct InsertionState<S> {
    /// Item `t` is stored as `t`; ids fit in `u32` because the tree does.
    tree: OrderStatTree<u32>,
    rhat: Vec<usize>,
    objective: S,
}

impl<S: Scalar> Default for InsertionState<S> {
    fn default() -> Self {
        Self::new()
    }
}

impl<S: Scalar> InsertionState<S> {
    pub fn new() -> Self {
        Self {
            tree: OrderStatTree::new(),
            rhat: Vec::new(),
            objective: S::zero(),
        }
    }

    pub fn with_capacity(n: usize) -> Self {
        Self {
            tree: OrderStatTree::with_capacity(n),
            rhat: Vec::with_capacity(n),
            objective: S::zero(),
        }
    }

    /// Number of scores consumed.
    pub fn t(&self) -> usize {
        self.rhat.len()
    }

    pub fn rhat(&self) -> &[usize] {
        &self.rhat
    }

    pub fn tree(&self) -> &OrderStatTree<u32> {
        &self.tree
    }

    /// Squared loss accumulated so far.
    pub fn objective(&self) -> &S {
        &self.objective
    }

    /// Consumes the next score and commits item `t` to its rank. Returns the
    /// chosen relative rank.
    pub fn insert_step(&mut self, y: &S, table: &ScoreTable<S>) -> Result<usize> {
        if !y.is_finite_value() {
            return Err(Error::NonFiniteScore(self.t() + 1));
        }
        let t = self.t() + 1;
        let id = u32::try_from(t).map_err(|_| Error::TooLarge {
            n: t,
            max: u32::MAX as usize,
        })?;
        let r = choose_relative_rank(y, t, table)?;
        let diff = y.clone() - table.score(t, r)?;
        self.objective = self.objective.clone() + diff.clone() * diff;
        self.tree.insert_at_rank(r, id)?;
        self.rhat.push(r);
        Ok(r)
    }

    /// Reads the ranking off the final sequence: the item at rank `k` gets
    /// absolute rank `k`.
    pub fn finish(self) -> Result<LsResult<S>> {
        if self.rhat.is_empty() {
            return Err(Error::InvalidParameter("no scores consumed".into()));
        }
        let mut ranks = vec![0; self.tree.len()];
        for (k, &item) in self.tree.iter().enumerate() {
            ranks[item as usize - 1] = k + 1;
        }
        Ok(LsResult {
            ranking: Permutation::from_vec_unchecked(ranks),
            rhat: RelativeRankVector::new(self.rhat)?,
            objective: self.objective,
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct LsResult<S> {
    pub ranking: Permutation,
    pub rhat: RelativeRankVector,
    /// `Σ_t (y_t - x(t, rhat_t))²`.
    pub objective: S,
}

/// Least-squares ranking of `scores` under `table`, in O(n log n).
pub fn ls_estimate<S: Scalar>(scores: &[S], table: &ScoreTable<S>) -> Result<LsResult<S>> {
    if scores.is_empty() {
        return Err(Error::InvalidParameter("no scores".into()));
    }
    table.check_covers(scores.len())?;
    let mut state = InsertionState::with_capacity(scores.len());
    for y in scores {
        state.insert_step(y, table)?;
    }
    state.finish()
}

/// The uncorrected baseline: rank items by raw score.
pub fn induced_ranking<S: Scalar>(scores: &[S]) -> Result<Permutation> {
    ranking_from_scores(scores)
}

#[derive(Clone, Debug, PartialEq)]
pub struct BruteForceLs<S> {
    /// Every ranking attaining the minimum, in lexicographic order.
    pub minimizers: Vec<Permutation>,
    pub objective: S,
}

/// Exhaustive least squares over all `n!` rankings (`n <= 8`).
pub fn brute_force_ls<S: Scalar>(scores: &[S], table: &ScoreTable<S>) -> Result<BruteForceLs<S>> {
    let n = scores.len();
    if n == 0 {
        return Err(Error::InvalidParameter("no scores".into()));
    }
    if n > MAX_ENUMERATION {
        return Err(Error::TooLarge {
            n,
            max: MAX_ENUMERATION,
        });
    }
    if let Some(i) = scores.iter().position(|y| !y.is_finite_value()) {
        return Err(Error::NonFiniteScore(i + 1));
    }
    table.check_covers(n)?;
    let mut best: Option<S> = None;
    let mut minimizers = Vec::new();
    for perm in permutations(n) {
        let mut objective = S::zero();
        for (t, (&r, y)) in perm
            .relative_ranks()
            .as_slice()
            .iter()
            .zip(scores)
            .enumerate()
        {
            let diff = y.clone() - table.score(t + 1, r)?;
            objective = objective + diff.clone() * diff;
        }
        match &best {
            Some(b) if objective > *b => {}
            Some(b) if objective == *b => minimizers.push(perm),
            _ => {
                best = Some(objective);
                minimizers.clear();
                minimizers.push(perm);
            }
        }
    }
    Ok(BruteForceLs {
        minimizers,
        objective: best.expect("n >= 1"),
    })
}

/// Constant-free footrule bound for noise bounded by `delta`:
/// `(1/n²) Σ_t (ρ^t_{r*_t + w_t} - ρ^t_{r*_t - w_t})` with `w_t = ⌈δ(t+1)⌉`,
/// where `ρ^t_r` is the absolute rank of the `r`-th smallest of the first `t`
/// items and `r` is clamped into `1..=t`.
pub fn sf_error_bound<S: Scalar>(perm: &Permutation, delta: &S) -> Result<S> {
    if !(*delta >= S::zero() && *delta <= S::one()) {
        return Err(Error::InvalidParameter(format!(
            "delta {delta} outside [0, 1]"
        )));
    }
    let n = perm.len();
    let mut seen = Fenwick::new(n);
    let mut total = 0u64;
    for (i, &rank) in perm.ranks().iter().enumerate() {
        let t = i + 1;
        seen.add(rank, 1);
        let r_true = seen.prefix(rank) as i64;
        let width = (delta.clone() * S::from_ratio(t as i64 + 1, 1)).ceil_i64();
        let hi = (r_true + width).clamp(1, t as i64) as u32;
        let lo = (r_true - width).clamp(1, t as i64) as u32;
        total += (seen.kth(hi) - seen.kth(lo)) as u64;
    }
    let n = n as i64;
    Ok(S::from_ratio(total as i64, n * n))
}

/// [`sf_error_bound`] for a float `delta`.
pub fn sf_error_bound_f64(perm: &Permutation, delta: f64) -> Result<f64> {
    check_delta(delta)?;
    sf_error_bound(perm, &delta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{generate_scores, ExplicitTable, NoiseSpec};
    use num_rational::Ratio;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    type Q = Ratio<i64>;

    fn q(n: i64, d: i64) -> Q {
        Q::new(n, d)
    }

    fn p(v: &[usize]) -> Permutation {
        Permutation::new(v.to_vec()).unwrap()
    }

    /// Plain argmin over the whole row.
    fn argmin_row<S: Scalar>(y: &S, t: usize, table: &ScoreTable<S>) -> usize {
        let mut best = 1;
        for r in 2..=t {
            let d = (y.clone() - table.score(t, r).unwrap()).abs();
            let b = (y.clone() - table.score(t, best).unwrap()).abs();
            if d < b {
                best = r;
            }
        }
        best
    }

    #[test]
    fn choose_rank_examples() {
        let table = ScoreTable::<Q>::Parametric;
        assert_eq!(choose_relative_rank(&q(1, 4), 3, &table).unwrap(), 1);
        assert_eq!(choose_relative_rank(&q(2, 3), 2, &table).unwrap(), 2);
        assert_eq!(choose_relative_rank(&q(5, 8), 3, &table).unwrap(), 2);
        assert_eq!(
            choose_relative_rank(&0.625f64, 3, &ScoreTable::Parametric).unwrap(),
            2
        );
        assert_eq!(choose_relative_rank(&q(-3, 1), 5, &table).unwrap(), 1);
        assert_eq!(choose_relative_rank(&q(7, 1), 5, &table).unwrap(), 5);
        assert!(choose_relative_rank(&q(1, 2), 0, &table).is_err());
    }

    #[test]
    fn choose_rank_matches_row_argmin() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let explicit = ScoreTable::Explicit(ExplicitTable::<f64>::random_monotone(40, &mut rng));
        let parametric = ScoreTable::<f64>::Parametric;
        for _ in 0..20_000 {
            let t = rng.random_range(1..=40);
            let y: f64 = rng.random_range(-0.3..1.3);
            for table in [&parametric, &explicit] {
                assert_eq!(
                    choose_relative_rank(&y, t, table).unwrap(),
                    argmin_row(&y, t, table)
                );
            }
        }
        // Exact half-way points under rationals.
        let table = ScoreTable::<Q>::Parametric;
        for t in 1..=30i64 {
            for k in 0..=2 * t + 2 {
                let y = q(2 * k + 1, 2 * (t + 1));
                let r = choose_relative_rank(&y, t as usize, &table).unwrap();
                assert_eq!(r, argmin_row(&y, t as usize, &table), "t={t} y={y}");
            }
        }
    }

    #[test]
    fn insertion_replay() {
        let table = ScoreTable::<Q>::Parametric;
        let mut state = InsertionState::new();
        assert_eq!(state.insert_step(&q(1, 2), &table).unwrap(), 1);
        assert_eq!(state.tree().to_sequence(), vec![1]);
        state.insert_step(&q(2, 3), &table).unwrap();
        state.insert_step(&q(1, 4), &table).unwrap();
        assert_eq!(state.t(), 3);
        assert_eq!(state.tree().to_sequence(), vec![3, 1, 2]);
        assert_eq!(state.rhat(), &[1, 2, 1]);

        let mut first = InsertionState::<f64>::new();
        first.insert_step(&123.0, &ScoreTable::Parametric).unwrap();
        assert_eq!(first.tree().to_sequence(), vec![1]);
        assert!(first
            .insert_step(&f64::NAN, &ScoreTable::Parametric)
            .is_err());
    }

    #[test]
    fn ls_examples() {
        let table = ScoreTable::<Q>::Parametric;
        let res = ls_estimate(&[q(1, 2), q(2, 3), q(1, 4)], &table).unwrap();
        assert_eq!(res.ranking, p(&[2, 3, 1]));
        assert_eq!(res.objective, q(0, 1));
        let res = ls_estimate(&[0.9f64], &ScoreTable::Parametric).unwrap();
        assert_eq!(res.ranking, Permutation::identity(1));
        assert_eq!(res.objective, (0.9f64 - 0.5).powi(2));
        assert!(ls_estimate::<f64>(&[], &ScoreTable::Parametric).is_err());
        let small = ScoreTable::Explicit(ExplicitTable::<f64>::parametric(2));
        assert!(ls_estimate(&[0.5, 0.5, 0.5], &small).is_err());
    }

    #[test]
    fn noiseless_exactness_exhaustive() {
        let table = ScoreTable::<Q>::Parametric;
        for n in 1..=7 {
            for perm in permutations(n) {
                let y = table.noiseless_scores(&perm).unwrap();
                let res = ls_estimate(&y, &table).unwrap();
                assert_eq!(res.ranking, perm);
                assert_eq!(res.objective, q(0, 1));
            }
        }
    }

    #[test]
    fn brute_force_examples() {
        let table = ScoreTable::<Q>::Parametric;
        for n in 1..=6 {
            let mut rng = ChaCha8Rng::seed_from_u64(n as u64);
            let perm = Permutation::random(n, &mut rng);
            let y = table.noiseless_scores(&perm).unwrap();
            let bf = brute_force_ls(&y, &table).unwrap();
            assert_eq!(bf.minimizers, vec![perm]);
            assert_eq!(bf.objective, q(0, 1));
        }
        let bf = brute_force_ls(&[q(1, 2), q(1, 2)], &table).unwrap();
        assert_eq!(bf.minimizers, vec![p(&[1, 2]), p(&[2, 1])]);
        assert_eq!(bf.objective, q(1, 36));
        let ls = ls_estimate(&[q(1, 2), q(1, 2)], &table).unwrap();
        assert!(bf.minimizers.contains(&ls.ranking));
        assert!(matches!(
            brute_force_ls(&[0.5f64; 9], &ScoreTable::Parametric),
            Err(Error::TooLarge { .. })
        ));
    }

    #[test]
    fn ls_matches_brute_force_on_noisy_instances() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for _ in 0..200 {
            let n = rng.random_range(1..=7);
            let perm = Permutation::random(n, &mut rng);
            let delta = if rng.random_bool(0.5) { 0.05 } else { 0.3 };
            let noise = NoiseSpec::<f64>::uniform(delta).unwrap();
            let y = generate_scores(&perm, &ScoreTable::Parametric, &noise, rng.random()).unwrap();
            let ls = ls_estimate(y.values(), &ScoreTable::Parametric).unwrap();
            let bf = brute_force_ls(y.values(), &ScoreTable::Parametric).unwrap();
            assert_eq!(ls.objective, bf.objective);
            assert!(bf.minimizers.contains(&ls.ranking));
        }
    }

    #[test]
    fn explicit_tables_also_decompose() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        for _ in 0..100 {
            let n = rng.random_range(1..=6);
            let table = ScoreTable::Explicit(ExplicitTable::<Q>::random_monotone(n, &mut rng));
            let y: Vec<Q> = (0..n)
                .map(|_| q(rng.random_range(-200..1200), 1000))
                .collect();
            let ls = ls_estimate(&y, &table).unwrap();
            let bf = brute_force_ls(&y, &table).unwrap();
            assert_eq!(ls.objective, bf.objective);
            assert!(bf.minimizers.contains(&ls.ranking));
        }
    }

    #[test]
    fn bound_examples() {
        let id = Permutation::identity(3);
        assert_eq!(sf_error_bound(&id, &q(1, 2)).unwrap(), q(1, 3));
        assert_eq!(sf_error_bound_f64(&id, 0.5).unwrap(), 1.0 / 3.0);
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let perm = Permutation::random(50, &mut rng);
        assert_eq!(sf_error_bound(&perm, &q(0, 1)).unwrap(), q(0, 1));
        assert!(sf_error_bound_f64(&perm, 1.5).is_err());
        assert!(sf_error_bound_f64(&perm, -0.1).is_err());
    }

    /// The bound written directly with `rho`, O(n² log n).
    fn bound_via_rho(perm: &Permutation, delta: Q) -> Q {
        let n = perm.len();
        let mut total = 0i64;
        for t in 1..=n {
            let r = perm.relative_rank(t).unwrap() as i64;
            let w = (delta * q(t as i64 + 1, 1)).ceil().to_integer();
            total += perm.rho(t, r + w).unwrap() as i64 - perm.rho(t, r - w).unwrap() as i64;
        }
        q(total, (n * n) as i64)
    }

    proptest! {
        #[test]
        fn bound_matches_rho_definition(seed in any::<u64>(), n in 1usize..60, k in 0i64..=20) {
            let perm = Permutation::random(n, &mut ChaCha8Rng::seed_from_u64(seed));
            let delta = q(k, 20);
            prop_assert_eq!(sf_error_bound(&perm, &delta).unwrap(), bound_via_rho(&perm, delta));
        }

        #[test]
        fn bound_is_monotone_in_delta(seed in any::<u64>(), n in 1usize..80) {
            let perm = Permutation::random(n, &mut ChaCha8Rng::seed_from_u64(seed));
            let values: Vec<Q> = (0..=10).map(|k| sf_error_bound(&perm, &q(k, 10)).unwrap()).collect();
            prop_assert!(values.windows(2).all(|w| w[0] <= w[1]));
        }

        #[test]
        fn choices_are_online(seed in any::<u64>(), n in 1usize..200) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let y: Vec<f64> = (0..n).map(|_| rng.random_range(-0.2..1.2)).collect();
            let full = ls_estimate(&y, &ScoreTable::Parametric).unwrap();
            let cut = rng.random_range(1..=n);
            let prefix = ls_estimate(&y[..cut], &ScoreTable::Parametric).unwrap();
            prop_assert_eq!(&full.rhat.as_slice()[..cut], prefix.rhat.as_slice());
            prop_assert_eq!(full.ranking.restrict(cut).unwrap(), prefix.ranking);
        }

        #[test]
        fn ranking_has_the_chosen_relative_ranks(seed in any::<u64>(), n in 1usize..500) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let y: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..1.0)).collect();
            let res = ls_estimate(&y, &ScoreTable::Parametric).unwrap();
            prop_assert_eq!(res.ranking.relative_ranks(), res.rhat.clone());
            prop_assert_eq!(Permutation::from_relative_ranks(&res.rhat), res.ranking);
        }

        #[test]
        fn displacement_is_bounded_by_noise(seed in any::<u64>(), n in 1usize..300, k in 0u32..=40) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let delta = k as f64 / 100.0;
            let perm = Permutation::random(n, &mut rng);
            let noise = NoiseSpec::<f64>::uniform(delta).unwrap();
            let y = generate_scores(&perm, &ScoreTable::Parametric, &noise, seed).unwrap();
            let res = ls_estimate(y.values(), &ScoreTable::Parametric).unwrap();
            let truth = perm.relative_ranks();
            for t in 1..=n {
                let gap = res.rhat.get(t).unwrap().abs_diff(truth.get(t).unwrap());
                let width = (delta * (t as f64 + 1.0)).ceil() as usize;
                prop_assert!(gap <= width, "t={} gap={} width={}", t, gap, width);
            }
        }
    }
}
