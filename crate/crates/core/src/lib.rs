//! Sequential evaluation bias: a score model in which an item's score depends
//! on its position and on its rank among the items seen so far, plus an exact
//! O(n log n) least-squares estimator that undoes the bias.
//!
//! Numeric code is generic over [`Scalar`]; the aliases below fix the scalar
//! for the common cases. [`Rational`] gives exact arithmetic for oracles.

mod error;
mod fenwick;

pub mod estimator;
pub mod experiments;
pub mod metrics;
pub mod model;
pub mod ostree;
pub mod perm;
pub mod scalar;

pub use error::{Error, Result};
pub use estimator::{
    brute_force_ls, choose_relative_rank, induced_ranking, ls_estimate, sf_error_bound,
    sf_error_bound_f64, BruteForceLs, InsertionState, LsResult,
};
pub use experiments::{
    bench_scaling, run_oracle_suite, run_sweep, run_trial, AggregateRecord, ExperimentConfig,
    SweepKind, SweepResult, TrialRecord,
};
pub use metrics::{
    d_entrywise, d_inv, d_kt, d_sf, footrule_sum, kendall_flips, ranking_from_scores,
};
pub use model::{
    adversarial_permutation, bayes_loss_records, detect_conflicts, exact_bayes_loss,
    exists_conflict_ranking, generate_scores, generate_scores_with, parametric_score,
    validate_table, BayesLossRecord, ConflictPair, ExplicitTable, NoiseSpec, Provenance,
    ScoreTable, ScoreVector, TableCheck,
};
pub use ostree::OrderStatTree;
pub use perm::{permutations, Permutation, Permutations, RelativeRankVector};
pub use scalar::Scalar;

/// Exact rational scalar with arbitrary-precision numerator and denominator.
pub type Rational = num_rational::BigRational;

/// Exact rational scalar on `i64`; fast, but only safe while denominators
/// stay small (metrics, short score vectors).
pub type SmallRational = num_rational::Ratio<i64>;

pub type ScoreTableF64 = ScoreTable<f64>;
pub type ScoreTableF32 = ScoreTable<f32>;
pub type ScoreTableExact = ScoreTable<Rational>;

pub type ScoreVectorF64 = ScoreVector<f64>;
pub type ScoreVectorExact = ScoreVector<Rational>;

pub type NoiseSpecF64 = NoiseSpec<f64>;

pub type LsResultF64 = LsResult<f64>;
pub type LsResultExact = LsResult<Rational>;
