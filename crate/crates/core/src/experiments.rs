//! Seeded Monte-Carlo harness comparing the least-squares estimator against
//! the score-induced ranking.
//!
//! Every trial draws its own generator from `(master seed, point, trial)`, so
//! trials run in parallel and the output does not depend on scheduling. All
//! outputs are sorted by their group key before they are written.

use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::estimator::{brute_force_ls, induced_ranking, ls_estimate};
use crate::metrics::{d_kt, d_sf};
use crate::model::{
    adversarial_permutation, check_delta, generate_scores_with, NoiseSpec, ScoreTable,
};
use crate::ostree::OrderStatTree;
use crate::perm::Permutation;

pub const DEFAULT_TRIALS: usize = 1000;
pub const DEFAULT_NS: [usize; 6] = [10, 20, 50, 100, 200, 500];
pub const DEFAULT_DELTAS: [f64; 5] = [0.025, 0.05, 0.1, 0.2, 0.4];

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SweepKind {
    VaryN,
    VaryDelta,
    PerPosition,
    /// True ranking fixed to the adversarial construction instead of sampled.
    Adversarial,
}

impl SweepKind {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::VaryN => "vary_n",
            Self::VaryDelta => "vary_delta",
            Self::PerPosition => "per_position",
            Self::Adversarial => "adversarial",
        }
    }
}

impl fmt::Display for SweepKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SweepKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "vary_n" => Ok(Self::VaryN),
            "vary_delta" => Ok(Self::VaryDelta),
            "per_position" => Ok(Self::PerPosition),
            "adversarial" => Ok(Self::Adversarial),
            other => Err(Error::Parse(format!(
                "sweep {other:?}: expected vary_n, vary_delta, per_position or adversarial"
            ))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NoiseKind {
    None,
    Uniform,
}

impl FromStr for NoiseKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "none" => Ok(Self::None),
            "uniform" => Ok(Self::Uniform),
            other => Err(Error::Parse(format!(
                "noise {other:?}: expected none or uniform"
            ))),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentConfig {
    pub sweep: SweepKind,
    pub ns: Vec<usize>,
    pub deltas: Vec<f64>,
    pub trials: usize,
    pub seed: u64,
    pub noise: NoiseKind,
    /// Directory the CSV files are written to.
    pub output: PathBuf,
}

impl ExperimentConfig {
    /// Grid defaults for each sweep kind.
    pub fn defaults(sweep: SweepKind) -> Self {
        let (ns, deltas) = match sweep {
            SweepKind::VaryN => (DEFAULT_NS.to_vec(), vec![0.1]),
            SweepKind::VaryDelta => (vec![100], DEFAULT_DELTAS.to_vec()),
            SweepKind::PerPosition => (vec![100], vec![0.1]),
            SweepKind::Adversarial => (vec![8, 16, 32, 64], vec![0.0]),
        };
        Self {
            sweep,
            ns,
            deltas,
            trials: DEFAULT_TRIALS,
            seed: 0,
            noise: NoiseKind::Uniform,
            output: PathBuf::from("results"),
        }
    }

    /// Builds a config from `key=value` pairs; later pairs win. Keys:
    /// `sweep`, `n`, `deltas` (or `delta`), `trials`, `seed`, `noise`,
    /// `output`. Lists are comma separated.
    pub fn from_pairs<K, V>(pairs: &[(K, V)]) -> Result<Self>
    where
        K: AsRef<str>,
        V: AsRef<str>,
    {
        let lookup = |key: &str| {
            pairs
                .iter()
                .rev()
                .find(|(k, _)| k.as_ref() == key)
                .map(|(_, v)| v.as_ref().trim())
        };
        for (k, _) in pairs {
            if ![
                "sweep", "n", "deltas", "delta", "trials", "seed", "noise", "output",
            ]
            .contains(&k.as_ref())
            {
                return Err(Error::Parse(format!("unknown config key {:?}", k.as_ref())));
            }
        }
        let sweep = lookup("sweep")
            .map(str::parse)
            .transpose()?
            .unwrap_or(SweepKind::VaryDelta);
        let mut config = Self::defaults(sweep);
        if let Some(v) = lookup("n") {
            config.ns = parse_list(v, "n")?;
        }
        // `deltas` and `delta` are aliases; whichever came last wins.
        let delta_value = pairs
            .iter()
            .rev()
            .find(|(k, _)| matches!(k.as_ref(), "deltas" | "delta"))
            .map(|(_, v)| v.as_ref().trim());
        if let Some(v) = delta_value {
            config.deltas = parse_list(v, "deltas")?;
        }
        if let Some(v) = lookup("trials") {
            config.trials = parse_one(v, "trials")?;
        }
        if let Some(v) = lookup("seed") {
            config.seed = parse_one(v, "seed")?;
        }
        if let Some(v) = lookup("noise") {
            config.noise = v.parse()?;
        }
        if let Some(v) = lookup("output") {
            config.output = PathBuf::from(v);
        }
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::InvalidParameter("trials must be at least 1".into()));
        }
        if self.ns.is_empty() || self.deltas.is_empty() {
            return Err(Error::InvalidParameter("empty n or delta grid".into()));
        }
        if let Some(&n) = self.ns.iter().find(|&&n| n == 0) {
            return Err(Error::InvalidParameter(format!(
                "n = {n} must be at least 1"
            )));
        }
        for &delta in &self.deltas {
            check_delta(delta)?;
        }
        if self.sweep == SweepKind::Adversarial {
            for &n in &self.ns {
                adversarial_permutation(n)?;
            }
        }
        Ok(())
    }

    /// Grid points `(n, delta)` in canonical order.
    pub fn points(&self) -> Vec<(usize, f64)> {
        let mut points: Vec<(usize, f64)> = self
            .ns
            .iter()
            .flat_map(|&n| self.deltas.iter().map(move |&d| (n, d)))
            .collect();
        points.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.total_cmp(&b.1)));
        points.dedup();
        points
    }
}

/// Parses flat `key=value` text; blank lines and `#` comments are skipped.
pub fn parse_config_text(text: &str) -> Result<Vec<(String, String)>> {
    text.lines()
        .enumerate()
        .map(|(i, line)| (i, line.trim()))
        .filter(|(_, line)| !line.is_empty() && !line.starts_with('#'))
        .map(|(i, line)| {
            line.split_once('=')
                .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
                .ok_or_else(|| Error::Parse(format!("config line {}: expected key=value", i + 1)))
        })
        .collect()
}

fn parse_one<T: FromStr>(value: &str, key: &str) -> Result<T>
where
    T::Err: fmt::Display,
{
    value
        .trim()
        .parse()
        .map_err(|e| Error::Parse(format!("{key} {value:?}: {e}")))
}

fn parse_list<T: FromStr>(value: &str, key: &str) -> Result<Vec<T>>
where
    T::Err: fmt::Display,
{
    value
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| parse_one(s, key))
        .collect()
}

/// Stable 64-bit mix of the master seed, grid point and trial index.
pub fn derive_seed(master: u64, point: u64, trial: u64) -> u64 {
    fn splitmix(mut z: u64) -> u64 {
        z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^ (z >> 31)
    }
    splitmix(splitmix(splitmix(master) ^ point) ^ trial)
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrialRecord {
    pub sweep: SweepKind,
    pub n: usize,
    pub delta: f64,
    pub trial: usize,
    pub seed: u64,
    pub d_sf_ls: f64,
    pub d_sf_induced: f64,
    pub d_kt_ls: f64,
    pub d_kt_induced: f64,
    /// `ℓ_t` for `t = 1..=n`.
    pub entrywise_ls: Vec<f64>,
    pub entrywise_induced: Vec<f64>,
}

impl TrialRecord {
    pub const CSV_HEADER: [&'static str; 9] = [
        "sweep",
        "n",
        "delta",
        "trial",
        "seed",
        "d_sf_ls",
        "d_sf_induced",
        "d_kt_ls",
        "d_kt_induced",
    ];

    fn csv_row(&self) -> [String; 9] {
        [
            self.sweep.to_string(),
            self.n.to_string(),
            self.delta.to_string(),
            self.trial.to_string(),
            self.seed.to_string(),
            self.d_sf_ls.to_string(),
            self.d_sf_induced.to_string(),
            self.d_kt_ls.to_string(),
            self.d_kt_induced.to_string(),
        ]
    }
}

fn entrywise(a: &Permutation, b: &Permutation) -> Vec<f64> {
    let n = a.len() as f64;
    a.ranks()
        .iter()
        .zip(b.ranks())
        .map(|(&x, &y)| x.abs_diff(y) as f64 / n)
        .collect()
}

/// One trial: uniform true ranking, parametric-style scores from `table`
/// with uniform noise on `[-delta, delta]`, both estimators, all metrics.
pub fn run_trial(n: usize, delta: f64, table: &ScoreTable<f64>, seed: u64) -> Result<TrialRecord> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let truth = Permutation::random(n, &mut rng);
    run_trial_on(SweepKind::VaryDelta, &truth, delta, table, seed, &mut rng)
}

fn run_trial_on<R: Rng>(
    sweep: SweepKind,
    truth: &Permutation,
    delta: f64,
    table: &ScoreTable<f64>,
    seed: u64,
    rng: &mut R,
) -> Result<TrialRecord> {
    let noise = if delta == 0.0 {
        NoiseSpec::None
    } else {
        NoiseSpec::uniform(delta)?
    };
    let y = generate_scores_with(truth, table, &noise, rng)?;
    let ls = ls_estimate(y.values(), table)?.ranking;
    let induced = induced_ranking(y.values())?;
    Ok(TrialRecord {
        sweep,
        n: truth.len(),
        delta,
        trial: 0,
        seed,
        d_sf_ls: d_sf(&ls, truth)?,
        d_sf_induced: d_sf(&induced, truth)?,
        d_kt_ls: d_kt(&ls, truth)?,
        d_kt_induced: d_kt(&induced, truth)?,
        entrywise_ls: entrywise(&ls, truth),
        entrywise_induced: entrywise(&induced, truth),
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Metric {
    Sf,
    Kt,
    /// Entry-wise error at the position with the largest mean error.
    MaxEntrywise,
}

impl Metric {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Sf => "sf",
            Self::Kt => "kt",
            Self::MaxEntrywise => "max_entrywise",
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Estimator {
    Ls,
    Induced,
}

impl Estimator {
    pub fn as_str(self) -> &'static str {
        match self {
            Self::Ls => "ls",
            Self::Induced => "induced",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AggregateRecord {
    pub sweep: SweepKind,
    pub n: usize,
    pub delta: f64,
    pub metric: Metric,
    pub estimator: Estimator,
    /// For [`Metric::MaxEntrywise`], the 1-based position that was selected.
    pub position: Option<usize>,
    pub mean: f64,
    pub sem: f64,
    pub count: usize,
}

impl AggregateRecord {
    pub const CSV_HEADER: [&'static str; 8] = [
        "sweep",
        "n",
        "delta",
        "metric",
        "estimator",
        "mean",
        "sem",
        "count",
    ];

    fn csv_row(&self) -> [String; 8] {
        [
            self.sweep.to_string(),
            self.n.to_string(),
            self.delta.to_string(),
            self.metric.as_str().to_string(),
            self.estimator.as_str().to_string(),
            self.mean.to_string(),
            self.sem.to_string(),
            self.count.to_string(),
        ]
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PerPositionRecord {
    pub n: usize,
    pub delta: f64,
    pub t: usize,
    pub mean_err_ls: f64,
    pub sem_ls: f64,
    pub mean_err_induced: f64,
    pub sem_induced: f64,
}

impl PerPositionRecord {
    pub const CSV_HEADER: [&'static str; 7] = [
        "n",
        "delta",
        "t",
        "mean_err_ls",
        "sem_ls",
        "mean_err_induced",
        "sem_induced",
    ];

    fn csv_row(&self) -> [String; 7] {
        [
            self.n.to_string(),
            self.delta.to_string(),
            self.t.to_string(),
            self.mean_err_ls.to_string(),
            self.sem_ls.to_string(),
            self.mean_err_induced.to_string(),
            self.sem_induced.to_string(),
        ]
    }
}

/// Sample mean and standard error of the mean (0 for a single sample).
pub fn mean_sem(values: impl IntoIterator<Item = f64>) -> (f64, f64, usize) {
    let values: Vec<f64> = values.into_iter().collect();
    let count = values.len();
    if count == 0 {
        return (f64::NAN, f64::NAN, 0);
    }
    let mean = values.iter().sum::<f64>() / count as f64;
    if count == 1 {
        return (mean, 0.0, 1);
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (count - 1) as f64;
    (mean, (var / count as f64).sqrt(), count)
}

#[derive(Clone, Debug, PartialEq)]
pub struct SweepResult {
    pub config: ExperimentConfig,
    /// Sorted by `(n, delta, trial)`.
    pub trials: Vec<TrialRecord>,
    /// Sorted by `(n, delta, metric, estimator)`.
    pub aggregates: Vec<AggregateRecord>,
    /// Filled for per-position sweeps; sorted by `(n, delta, t)`.
    pub per_position: Vec<PerPositionRecord>,
}

pub fn run_sweep(config: &ExperimentConfig) -> Result<SweepResult> {
    run_sweep_with_table(config, &ScoreTable::Parametric)
}

pub fn run_sweep_with_table(
    config: &ExperimentConfig,
    table: &ScoreTable<f64>,
) -> Result<SweepResult> {
    config.validate()?;
    let points = config.points();
    let jobs: Vec<(usize, usize, f64, usize)> = points
        .iter()
        .enumerate()
        .flat_map(|(p, &(n, d))| (0..config.trials).map(move |k| (p, n, d, k)))
        .collect();
    let mut trials = jobs
        .par_iter()
        .map(|&(point, n, delta, trial)| {
            let seed = derive_seed(config.seed, point as u64, trial as u64);
            let delta = if config.noise == NoiseKind::None {
                0.0
            } else {
                delta
            };
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let truth = match config.sweep {
                SweepKind::Adversarial => adversarial_permutation(n)?,
                _ => Permutation::random(n, &mut rng),
            };
            let mut record = run_trial_on(config.sweep, &truth, delta, table, seed, &mut rng)?;
            record.trial = trial;
            Ok(record)
        })
        .collect::<Result<Vec<_>>>()?;
    trials.sort_by(|a, b| {
        a.n.cmp(&b.n)
            .then(a.delta.total_cmp(&b.delta))
            .then(a.trial.cmp(&b.trial))
    });

    let mut aggregates = Vec::new();
    let mut per_position = Vec::new();
    for group in trials.chunk_by(|a, b| a.n == b.n && a.delta == b.delta) {
        let (n, delta) = (group[0].n, group[0].delta);
        let push = |aggregates: &mut Vec<AggregateRecord>,
                    metric,
                    estimator,
                    position,
                    stats: (f64, f64, usize)| {
            aggregates.push(AggregateRecord {
                sweep: config.sweep,
                n,
                delta,
                metric,
                estimator,
                position,
                mean: stats.0,
                sem: stats.1,
                count: stats.2,
            })
        };
        push(
            &mut aggregates,
            Metric::Sf,
            Estimator::Ls,
            None,
            mean_sem(group.iter().map(|r| r.d_sf_ls)),
        );
        push(
            &mut aggregates,
            Metric::Sf,
            Estimator::Induced,
            None,
            mean_sem(group.iter().map(|r| r.d_sf_induced)),
        );
        push(
            &mut aggregates,
            Metric::Kt,
            Estimator::Ls,
            None,
            mean_sem(group.iter().map(|r| r.d_kt_ls)),
        );
        push(
            &mut aggregates,
            Metric::Kt,
            Estimator::Induced,
            None,
            mean_sem(group.iter().map(|r| r.d_kt_induced)),
        );

        let ls_profile: Vec<(f64, f64, usize)> = (0..n)
            .map(|t| mean_sem(group.iter().map(|r| r.entrywise_ls[t])))
            .collect();
        let induced_profile: Vec<(f64, f64, usize)> = (0..n)
            .map(|t| mean_sem(group.iter().map(|r| r.entrywise_induced[t])))
            .collect();
        for (estimator, profile) in [
            (Estimator::Ls, &ls_profile),
            (Estimator::Induced, &induced_profile),
        ] {
            let t = argmax_mean(profile);
            push(
                &mut aggregates,
                Metric::MaxEntrywise,
                estimator,
                Some(t + 1),
                profile[t],
            );
        }
        if config.sweep == SweepKind::PerPosition {
            for t in 0..n {
                per_position.push(PerPositionRecord {
                    n,
                    delta,
                    t: t + 1,
                    mean_err_ls: ls_profile[t].0,
                    sem_ls: ls_profile[t].1,
                    mean_err_induced: induced_profile[t].0,
                    sem_induced: induced_profile[t].1,
                });
            }
        }
    }
    aggregates.sort_by(|a, b| {
        a.n.cmp(&b.n)
            .then(a.delta.total_cmp(&b.delta))
            .then(a.metric.cmp(&b.metric))
            .then(a.estimator.cmp(&b.estimator))
    });
    Ok(SweepResult {
        config: config.clone(),
        trials,
        aggregates,
        per_position,
    })
}

/// Index of the largest mean; the earliest one on ties.
fn argmax_mean(profile: &[(f64, f64, usize)]) -> usize {
    let mut best = 0;
    for (i, stats) in profile.iter().enumerate() {
        if stats.0 > profile[best].0 {
            best = i;
        }
    }
    best
}

impl SweepResult {
    pub const TRIALS_FILE: &'static str = "trials.csv";
    pub const AGGREGATE_FILE: &'static str = "aggregate.csv";
    pub const PER_POSITION_FILE: &'static str = "per_position.csv";

    /// Writes the CSV files into `dir` (created if missing) and returns their
    /// paths.
    pub fn write_csv(&self, dir: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
        let dir = dir.as_ref();
        std::fs::create_dir_all(dir)?;
        let mut written = Vec::new();

        let path = dir.join(Self::TRIALS_FILE);
        write_rows(
            &path,
            &TrialRecord::CSV_HEADER,
            self.trials.iter().map(TrialRecord::csv_row),
        )?;
        written.push(path);

        let path = dir.join(Self::AGGREGATE_FILE);
        write_rows(
            &path,
            &AggregateRecord::CSV_HEADER,
            self.aggregates.iter().map(AggregateRecord::csv_row),
        )?;
        written.push(path);

        if self.config.sweep == SweepKind::PerPosition {
            let path = dir.join(Self::PER_POSITION_FILE);
            write_rows(
                &path,
                &PerPositionRecord::CSV_HEADER,
                self.per_position.iter().map(PerPositionRecord::csv_row),
            )?;
            written.push(path);
        }
        Ok(written)
    }
}

fn write_rows<const N: usize>(
    path: &Path,
    header: &[&str; N],
    rows: impl Iterator<Item = [String; N]>,
) -> Result<()> {
    let mut out = csv::Writer::from_path(path)?;
    out.write_record(header)?;
    for row in rows {
        out.write_record(&row)?;
    }
    out.flush()?;
    Ok(())
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchRow {
    pub n: usize,
    pub ostree: Duration,
    pub ls_estimate: Duration,
}

/// Times `n` random-rank tree inserts and one `ls_estimate` on `n` uniformly
/// noisy scores, for each size.
pub fn bench_scaling(sizes: &[usize], delta: f64, seed: u64) -> Result<Vec<BenchRow>> {
    sizes
        .iter()
        .map(|&n| {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, n as u64, 0));
            let ranks: Vec<usize> = (1..=n).map(|t| rng.random_range(1..=t)).collect();
            let start = Instant::now();
            let mut tree = OrderStatTree::with_capacity(n);
            for (item, &rank) in ranks.iter().enumerate() {
                tree.insert_at_rank(rank, item as u32)?;
            }
            let ostree = start.elapsed();
            std::hint::black_box(&tree);

            let truth = Permutation::random(n, &mut rng);
            let noise = NoiseSpec::<f64>::uniform(delta)?;
            let y = generate_scores_with(&truth, &ScoreTable::Parametric, &noise, &mut rng)?;
            let start = Instant::now();
            let res = ls_estimate(y.values(), &ScoreTable::Parametric)?;
            let ls_estimate = start.elapsed();
            std::hint::black_box(res);
            Ok(BenchRow {
                n,
                ostree,
                ls_estimate,
            })
        })
        .collect()
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct OracleReport {
    pub instances: usize,
    pub objective_mismatches: usize,
    pub ranking_not_in_argmin: usize,
    /// Largest `|ls objective - brute-force minimum|` seen.
    pub max_gap: f64,
}

impl OracleReport {
    pub fn passed(&self, tolerance: f64) -> bool {
        self.objective_mismatches == 0
            && self.ranking_not_in_argmin == 0
            && self.max_gap <= tolerance
    }
}

/// Compares `ls_estimate` with exhaustive least squares on random instances:
/// for each `n` in `1..=max_n`, `per_n` draws of a uniform ranking and
/// uniform noise with `delta` alternating over `deltas`.
pub fn run_oracle_suite(
    max_n: usize,
    per_n: usize,
    deltas: &[f64],
    seed: u64,
) -> Result<OracleReport> {
    if deltas.is_empty() {
        return Err(Error::InvalidParameter("no noise levels".into()));
    }
    let table = ScoreTable::<f64>::Parametric;
    let mut report = OracleReport::default();
    for n in 1..=max_n {
        for k in 0..per_n {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, n as u64, k as u64));
            let truth = Permutation::random(n, &mut rng);
            let noise = NoiseSpec::<f64>::uniform(deltas[k % deltas.len()])?;
            let y = generate_scores_with(&truth, &table, &noise, &mut rng)?;
            let ls = ls_estimate(y.values(), &table)?;
            let bf = brute_force_ls(y.values(), &table)?;
            let gap = (ls.objective - bf.objective).abs();
            report.instances += 1;
            report.max_gap = report.max_gap.max(gap);
            if ls.objective != bf.objective {
                report.objective_mismatches += 1;
            }
            if !bf.minimizers.contains(&ls.ranking) {
                report.ranking_not_in_argmin += 1;
            }
        }
    }
    Ok(report)
}

/// `|d_sf - mean_t ℓ_t|` for a record; zero up to float rounding.
pub fn footrule_entrywise_gap(record: &TrialRecord) -> (f64, f64) {
    let n = record.n as f64;
    let mean = |v: &[f64]| v.iter().sum::<f64>() / n;
    (
        (record.d_sf_ls - mean(&record.entrywise_ls)).abs(),
        (record.d_sf_induced - mean(&record.entrywise_induced)).abs(),
    )
}
