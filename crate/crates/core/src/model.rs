//! Score tables, noise, score generation and the noiseless-conflict analysis.
//!
//! An evaluator scoring item `t` sees only the first `t` items, so the mean
//! score depends on the position `t` and the item's relative rank `r` among
//! those items: `y_t = x(t, r_t) + ε_t`, with `x(t, ·)` strictly increasing.
//! The parametric table `x(t, r) = r / (t + 1)` is the evaluator's best
//! response under squared loss on the normalized true rank.

use std::fmt;
use std::io::Read;
use std::path::Path;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Uniform};

use crate::error::{Error, Result};
use crate::perm::{permutations, Permutation};
use crate::scalar::Scalar;

/// `r / (t + 1)`, the parametric mean score.
pub fn parametric_score<S: Scalar>(t: usize, r: usize) -> Result<S> {
    if t == 0 {
        return Err(Error::PositionOutOfRange { t, n: usize::MAX });
    }
    if r == 0 || r > t {
        return Err(Error::RelativeRankOutOfRange { t, r });
    }
    Ok(S::from_ratio(r as i64, t as i64 + 1))
}

/// Mean score as a function of position and relative rank.
#[derive(Clone, Debug, Default, PartialEq)]
pub enum ScoreTable<S> {
    /// `x(t, r) = r / (t + 1)` for every `t`.
    #[default]
    Parametric,
    Explicit(ExplicitTable<S>),
}

impl<S: Scalar> ScoreTable<S> {
    pub fn score(&self, t: usize, r: usize) -> Result<S> {
        match self {
            Self::Parametric => parametric_score(t, r),
            Self::Explicit(table) => table.score(t, r).cloned(),
        }
    }

    /// Largest `n` the table defines scores for; `None` if unbounded.
    pub fn max_size(&self) -> Option<usize> {
        match self {
            Self::Parametric => None,
            Self::Explicit(table) => Some(table.size()),
        }
    }

    pub fn covers(&self, n: usize) -> bool {
        self.max_size().is_none_or(|max| n <= max)
    }

    pub(crate) fn check_covers(&self, n: usize) -> Result<()> {
        match self.max_size() {
            Some(max) if n > max => Err(Error::SizeMismatch {
                left: max,
                right: n,
            }),
            _ => Ok(()),
        }
    }

    /// `x(t, r_t(perm))` for every position.
    pub fn noiseless_scores(&self, perm: &Permutation) -> Result<Vec<S>> {
        self.check_covers(perm.len())?;
        perm.relative_ranks()
            .as_slice()
            .iter()
            .enumerate()
            .map(|(i, &r)| self.score(i + 1, r))
            .collect()
    }
}

/// Triangular array of scores `x(t, r)` for `1 <= r <= t <= n`.
#[derive(Clone, Debug, PartialEq)]
pub struct ExplicitTable<S> {
    n: usize,
    values: Vec<S>,
}

impl<S: Scalar> ExplicitTable<S> {
    /// Row `t - 1` holds `x(t, 1..=t)`.
    pub fn from_rows(rows: Vec<Vec<S>>) -> Result<Self> {
        if rows.is_empty() {
            return Err(Error::InvalidParameter("score table has no rows".into()));
        }
        let n = rows.len();
        let mut values = Vec::with_capacity(n * (n + 1) / 2);
        for (i, row) in rows.into_iter().enumerate() {
            if row.len() != i + 1 {
                return Err(Error::InvalidParameter(format!(
                    "row t={} has {} entries, expected {}",
                    i + 1,
                    row.len(),
                    i + 1
                )));
            }
            if let Some(r) = row.iter().position(|x| !x.is_finite_value()) {
                return Err(Error::InvalidParameter(format!(
                    "non-finite score at t={}, r={}",
                    i + 1,
                    r + 1
                )));
            }
            values.extend(row);
        }
        Ok(Self { n, values })
    }

    /// Copies the parametric table into explicit storage.
    pub fn parametric(n: usize) -> Self {
        let rows = (1..=n)
            .map(|t| {
                (1..=t)
                    .map(|r| S::from_ratio(r as i64, t as i64 + 1))
                    .collect()
            })
            .collect();
        Self::from_rows(rows).expect("parametric rows are well formed")
    }

    /// Random strictly increasing rows: each row is a sorted sample of
    /// distinct multiples of `1 / 4096` in `(0, 1)`.
    pub fn random_monotone<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Self {
        const GRID: i64 = 4096;
        let rows = (1..=n)
            .map(|t| {
                let mut picks = rand::seq::index::sample(rng, GRID as usize - 1, t)
                    .into_iter()
                    .map(|k| k as i64 + 1)
                    .collect::<Vec<_>>();
                picks.sort_unstable();
                picks.into_iter().map(|k| S::from_ratio(k, GRID)).collect()
            })
            .collect();
        Self::from_rows(rows).expect("generated rows are well formed")
    }

    pub fn size(&self) -> usize {
        self.n
    }

    pub fn score(&self, t: usize, r: usize) -> Result<&S> {
        if t == 0 || t > self.n {
            return Err(Error::PositionOutOfRange { t, n: self.n });
        }
        if r == 0 || r > t {
            return Err(Error::RelativeRankOutOfRange { t, r });
        }
        Ok(&self.values[(t - 1) * t / 2 + (r - 1)])
    }

    /// Reads a CSV with header `t,r,x` holding every `(t, r)` with
    /// `1 <= r <= t <= n` exactly once, in any order.
    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let mut csv = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(reader);
        let headers = csv.headers()?.clone();
        let column = |name: &str| {
            headers
                .iter()
                .position(|h| h == name)
                .ok_or_else(|| Error::Parse(format!("score table is missing column {name:?}")))
        };
        let (ct, cr, cx) = (column("t")?, column("r")?, column("x")?);
        let mut entries = Vec::new();
        for (line, record) in csv.records().enumerate() {
            let record = record?;
            let field = |c: usize| {
                record
                    .get(c)
                    .ok_or_else(|| Error::Parse(format!("row {}: short record", line + 2)))
            };
            let t: usize = field(ct)?
                .parse()
                .map_err(|e| Error::Parse(format!("row {}: t: {e}", line + 2)))?;
            let r: usize = field(cr)?
                .parse()
                .map_err(|e| Error::Parse(format!("row {}: r: {e}", line + 2)))?;
            let x: f64 = field(cx)?
                .parse()
                .map_err(|e| Error::Parse(format!("row {}: x: {e}", line + 2)))?;
            let x = S::from_f64_approx(x)
                .ok_or_else(|| Error::Parse(format!("row {}: non-finite x", line + 2)))?;
            entries.push((t, r, x));
        }
        let n = entries.iter().map(|e| e.0).max().unwrap_or(0);
        let mut rows: Vec<Vec<Option<S>>> = (1..=n).map(|t| vec![None; t]).collect();
        for (t, r, x) in entries {
            if t == 0 || r == 0 || r > t {
                return Err(Error::Parse(format!(
                    "entry (t={t}, r={r}) outside 1 <= r <= t"
                )));
            }
            if rows[t - 1][r - 1].replace(x).is_some() {
                return Err(Error::Parse(format!("entry (t={t}, r={r}) repeated")));
            }
        }
        let rows = rows
            .into_iter()
            .enumerate()
            .map(|(i, row)| {
                row.into_iter()
                    .enumerate()
                    .map(|(j, x)| {
                        x.ok_or_else(|| {
                            Error::Parse(format!("entry (t={}, r={}) missing", i + 1, j + 1))
                        })
                    })
                    .collect::<Result<Vec<S>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_rows(rows)
    }

    pub fn load_csv(path: impl AsRef<Path>) -> Result<Self> {
        Self::read_csv(std::fs::File::open(path)?)
    }
}

/// Outcome of a strict-monotonicity check.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum TableCheck {
    Monotone,
    /// `x(t, r) >= x(t, r_prime)` although `r < r_prime`.
    Violation {
        t: usize,
        r: usize,
        r_prime: usize,
    },
}

/// Checks `x(t, r) < x(t, r + 1)` row by row and reports the first failure.
pub fn validate_table<S: Scalar>(table: &ScoreTable<S>) -> TableCheck {
    let ScoreTable::Explicit(table) = table else {
        return TableCheck::Monotone;
    };
    for t in 2..=table.size() {
        for r in 1..t {
            let lo = table.score(t, r).expect("in range");
            let hi = table.score(t, r + 1).expect("in range");
            if lo >= hi {
                return TableCheck::Violation {
                    t,
                    r,
                    r_prime: r + 1,
                };
            }
        }
    }
    TableCheck::Monotone
}

/// Additive score noise. Every draw lies in `[-delta, delta]`.
#[derive(Clone, Debug, PartialEq)]
pub enum NoiseSpec<S> {
    None,
    /// I.i.d. uniform on `[-delta, delta]`.
    Uniform {
        delta: f64,
    },
    /// A fixed vector, one entry per position.
    Explicit {
        values: Vec<S>,
    },
}

impl<S: Scalar> NoiseSpec<S> {
    pub fn uniform(delta: f64) -> Result<Self> {
        check_delta(delta)?;
        Ok(Self::Uniform { delta })
    }

    pub fn explicit(values: Vec<S>) -> Result<Self> {
        let one = S::one();
        if let Some(i) = values
            .iter()
            .position(|e| !e.is_finite_value() || e.abs() > one)
        {
            return Err(Error::InvalidParameter(format!(
                "noise entry {} = {} outside [-1, 1]",
                i + 1,
                values[i]
            )));
        }
        Ok(Self::Explicit { values })
    }

    /// Bound on `|ε_t|`: the uniform width, or the largest explicit entry.
    pub fn delta(&self) -> f64 {
        match self {
            Self::None => 0.0,
            Self::Uniform { delta } => *delta,
            Self::Explicit { values } => values
                .iter()
                .map(|e| e.abs().to_f64_lossy())
                .fold(0.0, f64::max),
        }
    }

    /// Parses `none`, `uniform:<delta>` or `explicit:<path>`, where the file
    /// holds one value per position separated by commas or whitespace.
    pub fn parse(spec: &str) -> Result<Self> {
        let spec = spec.trim();
        let (kind, arg) = spec.split_once(':').unwrap_or((spec, ""));
        match kind {
            "none" if arg.is_empty() => Ok(Self::None),
            "uniform" => {
                let delta = arg
                    .parse::<f64>()
                    .map_err(|e| Error::Parse(format!("noise delta {arg:?}: {e}")))?;
                Self::uniform(delta)
            }
            "explicit" if !arg.is_empty() => {
                let values = parse_value_list(&std::fs::read_to_string(arg)?, false)?;
                Self::explicit(values)
            }
            _ => Err(Error::Parse(format!(
                "noise spec {spec:?}: expected none, uniform:<delta> or explicit:<path>"
            ))),
        }
    }

    /// Draws `n` noise terms.
    pub fn sample<R: Rng + ?Sized>(&self, n: usize, rng: &mut R) -> Result<Vec<S>> {
        match self {
            Self::None => Ok(vec![S::zero(); n]),
            Self::Uniform { delta } => {
                check_delta(*delta)?;
                let dist = Uniform::new_inclusive(-delta, *delta)
                    .map_err(|e| Error::InvalidParameter(format!("uniform noise: {e}")))?;
                Ok((0..n)
                    .map(|_| {
                        let e = dist.sample(rng).clamp(-delta, *delta);
                        S::from_f64_approx(e).expect("finite draw")
                    })
                    .collect())
            }
            Self::Explicit { values } => {
                if values.len() != n {
                    return Err(Error::SizeMismatch {
                        left: values.len(),
                        right: n,
                    });
                }
                Ok(values.clone())
            }
        }
    }
}

impl<S: Scalar> fmt::Display for NoiseSpec<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::None => f.write_str("none"),
            Self::Uniform { delta } => write!(f, "uniform:{delta}"),
            Self::Explicit { values } => write!(f, "explicit[{}]", values.len()),
        }
    }
}

/// Parses numbers separated by commas or whitespace. With `allow_header`, a
/// leading non-numeric token such as a column name is skipped.
fn parse_value_list<S: Scalar>(text: &str, allow_header: bool) -> Result<Vec<S>> {
    let mut tokens = text
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|tok| !tok.is_empty())
        .peekable();
    if allow_header && tokens.peek().is_some_and(|tok| tok.parse::<f64>().is_err()) {
        tokens.next();
    }
    tokens
        .map(|tok| {
            tok.parse::<f64>()
                .ok()
                .and_then(S::from_f64_approx)
                .ok_or_else(|| Error::Parse(format!("value {tok:?} is not a finite number")))
        })
        .collect()
}

pub(crate) fn check_delta(delta: f64) -> Result<()> {
    if (0.0..=1.0).contains(&delta) {
        Ok(())
    } else {
        Err(Error::InvalidParameter(format!(
            "delta {delta} outside [0, 1]"
        )))
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Provenance {
    pub noise: String,
    pub seed: u64,
}

/// Observed scores `y`, optionally tagged with how they were generated.
#[derive(Clone, Debug, PartialEq)]
pub struct ScoreVector<S> {
    values: Vec<S>,
    provenance: Option<Provenance>,
}

impl<S: Scalar> ScoreVector<S> {
    pub fn new(values: Vec<S>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidParameter("score vector is empty".into()));
        }
        if let Some(i) = values.iter().position(|y| !y.is_finite_value()) {
            return Err(Error::NonFiniteScore(i + 1));
        }
        Ok(Self {
            values,
            provenance: None,
        })
    }

    pub fn with_provenance(mut self, provenance: Provenance) -> Self {
        self.provenance = Some(provenance);
        self
    }

    pub fn values(&self) -> &[S] {
        &self.values
    }

    pub fn into_values(self) -> Vec<S> {
        self.values
    }

    pub fn provenance(&self) -> Option<&Provenance> {
        self.provenance.as_ref()
    }

    /// Reads a single score column (or one comma separated line) with an
    /// optional header.
    pub fn read_text(text: &str) -> Result<Self> {
        Self::new(parse_value_list(text, true)?)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::read_text(&std::fs::read_to_string(path)?)
    }

    #[allow(clippy::len_without_is_empty)]
    pub fn len(&self) -> usize {
        self.values.len()
    }
}

/// `y_t = x(t, r_t(perm)) + ε_t`, with the noise drawn from a ChaCha8 stream
/// seeded by `seed`.
pub fn generate_scores<S: Scalar>(
    perm: &Permutation,
    table: &ScoreTable<S>,
    noise: &NoiseSpec<S>,
    seed: u64,
) -> Result<ScoreVector<S>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scores = generate_scores_with(perm, table, noise, &mut rng)?;
    Ok(scores.with_provenance(Provenance {
        noise: noise.to_string(),
        seed,
    }))
}

/// Same as [`generate_scores`] but draws from a caller-owned generator.
pub fn generate_scores_with<S: Scalar, R: Rng + ?Sized>(
    perm: &Permutation,
    table: &ScoreTable<S>,
    noise: &NoiseSpec<S>,
    rng: &mut R,
) -> Result<ScoreVector<S>> {
    let mean = table.noiseless_scores(perm)?;
    let eps = noise.sample(perm.len(), rng)?;
    ScoreVector::new(mean.into_iter().zip(eps).map(|(x, e)| x + e).collect())
}

/// Two items whose noiseless scores compare opposite to their true ranks.
#[derive(Clone, Debug, PartialEq)]
pub struct ConflictPair<S> {
    pub i: usize,
    pub j: usize,
    pub score_i: S,
    pub score_j: S,
}

/// All conflicting pairs `(i, j)`, `i < j`, by direct O(n²) enumeration.
pub fn detect_conflicts<S: Scalar>(
    table: &ScoreTable<S>,
    perm: &Permutation,
) -> Result<Vec<ConflictPair<S>>> {
    let scores = table.noiseless_scores(perm)?;
    let ranks = perm.ranks();
    let mut out = Vec::new();
    for i in 0..ranks.len() {
        for j in i + 1..ranks.len() {
            let (si, sj) = (&scores[i], &scores[j]);
            let flipped = (si > sj && ranks[i] < ranks[j]) || (si < sj && ranks[i] > ranks[j]);
            if flipped {
                out.push(ConflictPair {
                    i: i + 1,
                    j: j + 1,
                    score_i: si.clone(),
                    score_j: sj.clone(),
                });
            }
        }
    }
    Ok(out)
}

/// Finds a ranking of size `n >= 4` with at least one conflict under `table`.
///
/// Any strictly monotone table conflicts on `[1,3,4,2]` or `[4,1,2,3]`
/// (extended by fixed trailing items): no conflict on either would need
/// `x(1,1) < x(4,2)` and `x(1,1) > x(4,3)` at once. The remaining rankings
/// of four items are tried only when the table is not strictly monotone.
pub fn exists_conflict_ranking<S: Scalar>(table: &ScoreTable<S>, n: usize) -> Result<Permutation> {
    if n < 4 {
        return Err(Error::InvalidParameter(format!(
            "conflicts need n >= 4, got {n}"
        )));
    }
    table.check_covers(n)?;
    let proof_pair = [vec![1, 3, 4, 2], vec![4, 1, 2, 3]]
        .into_iter()
        .map(|v| Permutation::new(v).expect("valid"));
    for head in proof_pair.chain(permutations(4)) {
        // Scores of the first four items do not depend on later items.
        if !detect_conflicts(table, &head)?.is_empty() {
            let mut ranks = head.into_ranks();
            ranks.extend(5..=n);
            return Ok(Permutation::from_vec_unchecked(ranks));
        }
    }
    Err(Error::InvalidParameter(
        "no conflicting ranking; is the table strictly monotone?".into(),
    ))
}

/// Ranking on which the noiseless score-induced ranking has `Ω(n²)` flips.
///
/// For `n = 4m`: the first `2m` items are the lowest in arrival order, then
/// odd positions take ranks `2m+1..=3m` and even positions `3m+1..=4m`.
pub fn adversarial_permutation(n: usize) -> Result<Permutation> {
    if n < 8 || !n.is_multiple_of(4) {
        return Err(Error::InvalidParameter(format!(
            "adversarial ranking needs n = 4m with m >= 2, got {n}"
        )));
    }
    let m = n / 4;
    let ranks = (1..=n)
        .map(|t| match t {
            t if t <= 2 * m => t,
            t if t % 2 == 1 => t.div_ceil(2) + m,
            t => t / 2 + 2 * m,
        })
        .collect();
    Ok(Permutation::from_vec_unchecked(ranks))
}

/// One term of the evaluator's loss: response versus normalized true rank.
#[derive(Clone, Debug, PartialEq)]
pub struct BayesLossRecord<S> {
    pub t: usize,
    /// `γ*(t) / (n + 1)`.
    pub normalized_rank: S,
    pub response: S,
    pub sq_err: S,
}

/// Per-position loss of a response rule `response(t, r_t)` on one ranking.
pub fn bayes_loss_records<S: Scalar, F>(perm: &Permutation, response: F) -> Vec<BayesLossRecord<S>>
where
    F: Fn(usize, usize) -> S,
{
    let n = perm.len() as i64;
    perm.relative_ranks()
        .as_slice()
        .iter()
        .zip(perm.ranks())
        .enumerate()
        .map(|(i, (&r, &rank))| {
            let t = i + 1;
            let normalized_rank = S::from_ratio(rank as i64, n + 1);
            let response = response(t, r);
            let diff = response.clone() - normalized_rank.clone();
            BayesLossRecord {
                t,
                normalized_rank,
                response,
                sq_err: diff.clone() * diff,
            }
        })
        .collect()
}

pub const MAX_ENUMERATION: usize = 8;

/// Exact expected squared loss of a response rule under a uniform prior on
/// the true ranking, by enumerating all `n!` rankings (`n <= 8`).
pub fn exact_bayes_loss<S: Scalar, F>(response: F, n: usize) -> Result<S>
where
    F: Fn(usize, usize) -> S,
{
    if n == 0 {
        return Err(Error::InvalidParameter("n must be at least 1".into()));
    }
    if n > MAX_ENUMERATION {
        return Err(Error::TooLarge {
            n,
            max: MAX_ENUMERATION,
        });
    }
    let mut total = S::zero();
    let mut count = 0i64;
    for perm in permutations(n) {
        for record in bayes_loss_records(&perm, &response) {
            total = total + record.sq_err;
        }
        count += 1;
    }
    Ok(total / S::from_ratio(count, 1))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::{kendall_flips, ranking_from_scores};
    use num_rational::Ratio;

    type Q = Ratio<i64>;

    fn p(v: &[usize]) -> Permutation {
        Permutation::new(v.to_vec()).unwrap()
    }

    fn q(n: i64, d: i64) -> Q {
        Q::new(n, d)
    }

    #[test]
    fn parametric_score_examples() {
        assert_eq!(parametric_score::<Q>(1, 1).unwrap(), q(1, 2));
        assert_eq!(parametric_score::<Q>(2, 2).unwrap(), q(2, 3));
        assert_eq!(parametric_score::<Q>(2, 1).unwrap(), q(1, 3));
        assert_eq!(parametric_score::<Q>(5, 2).unwrap(), q(2, 6));
        assert!(matches!(
            parametric_score::<f64>(3, 4),
            Err(Error::RelativeRankOutOfRange { t: 3, r: 4 })
        ));
        assert!(parametric_score::<f64>(3, 0).is_err());
    }

    #[test]
    fn generate_noiseless_examples() {
        let table = ScoreTable::<Q>::Parametric;
        let y = generate_scores(&p(&[2, 3, 1]), &table, &NoiseSpec::None, 0).unwrap();
        assert_eq!(y.values(), &[q(1, 2), q(2, 3), q(1, 4)]);
        let y = generate_scores(&Permutation::identity(3), &table, &NoiseSpec::None, 0).unwrap();
        assert_eq!(y.values(), &[q(1, 2), q(2, 3), q(3, 4)]);
        assert_eq!(y.provenance().unwrap().noise, "none");
    }

    #[test]
    fn generation_is_deterministic_per_seed() {
        let table = ScoreTable::<f64>::Parametric;
        let noise = NoiseSpec::uniform(0.2).unwrap();
        let perm = p(&[4, 1, 3, 2, 5]);
        let a = generate_scores(&perm, &table, &noise, 99).unwrap();
        let b = generate_scores(&perm, &table, &noise, 99).unwrap();
        let c = generate_scores(&perm, &table, &noise, 100).unwrap();
        assert_eq!(a, b);
        assert_ne!(a.values(), c.values());
    }

    #[test]
    fn generation_rejects_small_tables() {
        let table = ScoreTable::Explicit(ExplicitTable::<f64>::parametric(3));
        let err = generate_scores(&Permutation::identity(4), &table, &NoiseSpec::None, 1);
        assert!(matches!(err, Err(Error::SizeMismatch { .. })));
        let noise = NoiseSpec::explicit(vec![0.1, 0.1]).unwrap();
        let err = generate_scores(&Permutation::identity(3), &table, &noise, 1);
        assert!(matches!(
            err,
            Err(Error::SizeMismatch { left: 2, right: 3 })
        ));
    }

    #[test]
    fn explicit_noise_is_added() {
        let noise = NoiseSpec::explicit(vec![q(1, 10), q(-1, 10)]).unwrap();
        let y = generate_scores(&p(&[1, 2]), &ScoreTable::Parametric, &noise, 0).unwrap();
        assert_eq!(y.values(), &[q(1, 2) + q(1, 10), q(2, 3) - q(1, 10)]);
        assert_eq!(noise.delta(), 0.1);
        assert!(NoiseSpec::explicit(vec![1.5]).is_err());
    }

    #[test]
    fn uniform_noise_stays_in_band() {
        let noise = NoiseSpec::<f64>::uniform(0.3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let draws = noise.sample(100_000, &mut rng).unwrap();
        assert!(draws.iter().all(|e| (-0.3..=0.3).contains(e)));
        assert!(NoiseSpec::<f64>::uniform(1.5).is_err());
        assert!(NoiseSpec::<f64>::uniform(-0.1).is_err());
        let zero = NoiseSpec::<f64>::uniform(0.0)
            .unwrap()
            .sample(10, &mut rng)
            .unwrap();
        assert!(zero.iter().all(|&e| e == 0.0));
    }

    #[test]
    fn noise_spec_parsing() {
        assert_eq!(NoiseSpec::<f64>::parse("none").unwrap(), NoiseSpec::None);
        assert_eq!(
            NoiseSpec::<f64>::parse("uniform:0.1").unwrap(),
            NoiseSpec::Uniform { delta: 0.1 }
        );
        assert!(NoiseSpec::<f64>::parse("uniform:2").is_err());
        assert!(NoiseSpec::<f64>::parse("gaussian:0.1").is_err());
        assert!(NoiseSpec::<f64>::parse("explicit:").is_err());
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("eps.txt");
        std::fs::write(&path, "0.1, -0.05\n0.0\n").unwrap();
        let spec = NoiseSpec::<f64>::parse(&format!("explicit:{}", path.display())).unwrap();
        assert_eq!(
            spec,
            NoiseSpec::Explicit {
                values: vec![0.1, -0.05, 0.0]
            }
        );
        assert_eq!(
            NoiseSpec::<f64>::uniform(0.25).unwrap().to_string(),
            "uniform:0.25"
        );
    }

    #[test]
    fn table_validation() {
        assert_eq!(
            validate_table(&ScoreTable::<f64>::Parametric),
            TableCheck::Monotone
        );
        let explicit = ScoreTable::Explicit(ExplicitTable::<Q>::parametric(9));
        assert_eq!(validate_table(&explicit), TableCheck::Monotone);
        let flat =
            ExplicitTable::from_rows(vec![vec![0.5], vec![0.3, 0.6], vec![0.2, 0.2, 0.9]]).unwrap();
        assert_eq!(
            validate_table(&ScoreTable::Explicit(flat)),
            TableCheck::Violation {
                t: 3,
                r: 1,
                r_prime: 2
            }
        );
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for _ in 0..50 {
            let table = ExplicitTable::<f64>::random_monotone(12, &mut rng);
            assert_eq!(
                validate_table(&ScoreTable::Explicit(table)),
                TableCheck::Monotone
            );
        }
        assert!(ExplicitTable::from_rows(vec![vec![0.1], vec![0.2]]).is_err());
    }

    #[test]
    fn explicit_table_csv() {
        let csv = "t,r,x\n2,2,0.7\n1,1,0.5\n2,1,0.2\n";
        let table = ExplicitTable::<f64>::read_csv(csv.as_bytes()).unwrap();
        assert_eq!(table.size(), 2);
        assert_eq!(*table.score(2, 1).unwrap(), 0.2);
        assert!(ExplicitTable::<f64>::read_csv("t,r,x\n1,1,0.5\n2,2,0.7\n".as_bytes()).is_err());
        assert!(ExplicitTable::<f64>::read_csv("t,r,x\n1,1,0.5\n1,1,0.5\n".as_bytes()).is_err());
        assert!(ExplicitTable::<f64>::read_csv("t,x\n1,0.5\n".as_bytes()).is_err());
        assert!(ExplicitTable::<f64>::read_csv("t,r,x\n1,2,0.5\n".as_bytes()).is_err());
    }

    #[test]
    fn conflict_examples() {
        let table = ScoreTable::<Q>::Parametric;
        let found = detect_conflicts(&table, &p(&[1, 3, 4, 5, 2])).unwrap();
        assert!(found.contains(&ConflictPair {
            i: 1,
            j: 5,
            score_i: q(1, 2),
            score_j: q(1, 3)
        }));
        assert!(detect_conflicts(&table, &Permutation::identity(7))
            .unwrap()
            .is_empty());
        let found = detect_conflicts(&table, &p(&[1, 3, 4, 2])).unwrap();
        assert!(found
            .iter()
            .any(|c| (c.i, c.j) == (1, 4) && c.score_j == q(2, 5)));
    }

    #[test]
    fn adjacent_pairs_never_conflict_under_parametric_table() {
        let table = ScoreTable::<Q>::Parametric;
        for n in 1..=7 {
            for perm in permutations(n) {
                let conflicts = detect_conflicts(&table, &perm).unwrap();
                assert!(conflicts.iter().all(|c| c.j != c.i + 1), "{perm}");
            }
        }
    }

    #[test]
    fn conflict_existence() {
        let table = ScoreTable::<Q>::Parametric;
        assert_eq!(
            exists_conflict_ranking(&table, 4).unwrap(),
            p(&[1, 3, 4, 2])
        );
        assert_eq!(
            exists_conflict_ranking(&table, 6).unwrap(),
            p(&[1, 3, 4, 2, 5, 6])
        );
        assert!(exists_conflict_ranking(&table, 3).is_err());
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..100 {
            let table = ScoreTable::Explicit(ExplicitTable::<Q>::random_monotone(4, &mut rng));
            let perm = exists_conflict_ranking(&table, 4).unwrap();
            assert!(!detect_conflicts(&table, &perm).unwrap().is_empty());
            assert!(perm == p(&[1, 3, 4, 2]) || perm == p(&[4, 1, 2, 3]));
        }
    }

    #[test]
    fn adversarial_construction() {
        assert_eq!(
            adversarial_permutation(8).unwrap(),
            p(&[1, 2, 3, 4, 5, 7, 6, 8])
        );
        for n in (8..=64).step_by(4) {
            adversarial_permutation(n).unwrap();
        }
        assert!(adversarial_permutation(4).is_err());
        assert!(adversarial_permutation(10).is_err());

        let perm = adversarial_permutation(8).unwrap();
        let y: Vec<Q> = ScoreTable::Parametric.noiseless_scores(&perm).unwrap();
        assert_eq!((y[4], y[6]), (q(5, 6), q(6, 8)));
        let induced = ranking_from_scores(&y).unwrap();
        assert!(induced.rank(5).unwrap() > induced.rank(7).unwrap());

        for m in 2..=16 {
            let perm = adversarial_permutation(4 * m).unwrap();
            let y: Vec<Q> = ScoreTable::Parametric.noiseless_scores(&perm).unwrap();
            let induced = ranking_from_scores(&y).unwrap();
            // Flips among odd positions past the first half alone.
            let odd: Vec<usize> = (2 * m + 1..=4 * m).step_by(2).collect();
            let mut odd_flips = 0;
            for (a, &i) in odd.iter().enumerate() {
                for &j in &odd[a + 1..] {
                    if induced.rank(i).unwrap() > induced.rank(j).unwrap() {
                        odd_flips += 1;
                    }
                }
            }
            assert!(odd_flips >= m * (m - 1) / 2);
            assert!(kendall_flips(&induced, &perm).unwrap() >= odd_flips as u64);
        }
    }

    #[test]
    fn bayes_loss_small_cases() {
        let param = |t: usize, r: usize| q(r as i64, t as i64 + 1);
        assert_eq!(exact_bayes_loss(param, 1).unwrap(), q(0, 1));
        assert_eq!(exact_bayes_loss(param, 2).unwrap(), q(1, 36));
        let best = exact_bayes_loss(param, 4).unwrap();
        let naive = exact_bayes_loss(|t, r| q(r as i64, t as i64), 4).unwrap();
        let shifted = exact_bayes_loss(|t, r| q(2 * r as i64 - 1, 2 * t as i64), 4).unwrap();
        assert!(best <= naive && best <= shifted);
        assert!(matches!(
            exact_bayes_loss(param, 9),
            Err(Error::TooLarge { n: 9, max: 8 })
        ));
        assert!(exact_bayes_loss(param, 0).is_err());
    }

    #[test]
    fn bayes_records_are_consistent() {
        let perm = p(&[3, 1, 2]);
        let records = bayes_loss_records(&perm, |t, r| q(r as i64, t as i64 + 1));
        assert_eq!(records.len(), 3);
        assert_eq!(records[0].normalized_rank, q(3, 4));
        for rec in records {
            let d = rec.response - rec.normalized_rank;
            assert_eq!(rec.sq_err, d * d);
        }
    }

    #[test]
    fn score_files() {
        let row = ScoreVector::<f64>::read_text("0.5,0.2,0.7\n").unwrap();
        assert_eq!(row.values(), &[0.5, 0.2, 0.7]);
        let column = ScoreVector::<f64>::read_text("score\n0.5\n0.2\n0.7\n").unwrap();
        assert_eq!(column, row);
        assert!(matches!(
            ScoreVector::<f64>::read_text("score\n"),
            Err(Error::InvalidParameter(_))
        ));
        assert!(matches!(
            ScoreVector::<f64>::read_text("0.1\nabc\n"),
            Err(Error::Parse(_))
        ));
        assert!(ScoreVector::<f64>::read_text("0.1,inf").is_err());
    }
}
