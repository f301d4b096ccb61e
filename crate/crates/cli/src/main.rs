use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use seqbias::experiments::{
    bench_scaling, parse_config_text, run_oracle_suite, run_sweep, ExperimentConfig, SweepKind,
};
use seqbias::{induced_ranking, ls_estimate, ExplicitTable, ScoreTable, ScoreVector};

#[derive(Parser)]
#[command(
    name = "seqbias",
    version,
    about = "Model and correct sequential evaluation bias in scores"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a Monte-Carlo sweep and write CSV results.
    Simulate(SimulateArgs),
    /// Rank items from a file of observed scores.
    Correct(CorrectArgs),
    /// Time the order-statistics tree and the estimator at doubling sizes.
    Bench(BenchArgs),
    /// Check the estimator against exhaustive least squares on small inputs.
    Oracle(OracleArgs),
}

#[derive(Args)]
struct SimulateArgs {
    /// key=value file; flags given here override it.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, value_parser = ["vary_n", "vary_delta", "per_position", "adversarial"])]
    sweep: Option<String>,
    /// Comma separated item counts.
    #[arg(long, value_delimiter = ',', value_parser = clap::value_parser!(u32).range(1..))]
    n: Option<Vec<u32>>,
    /// Comma separated noise levels in [0, 1].
    #[arg(long, alias = "delta", value_delimiter = ',', value_parser = parse_delta)]
    deltas: Option<Vec<f64>>,
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    trials: Option<u64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, value_parser = ["uniform", "none"])]
    noise: Option<String>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CorrectArgs {
    /// One score per item in arrival order, as a column or a comma separated line.
    #[arg(long)]
    scores: PathBuf,
    /// Noise level; recorded in the output only.
    #[arg(long, default_value_t = 0.0, value_parser = parse_delta)]
    delta: f64,
    /// Explicit score table CSV with columns t,r,x; the parametric table otherwise.
    #[arg(long)]
    table: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    /// Largest size; timings are also taken at n/2, n/4 and n/8.
    #[arg(long, default_value_t = 1 << 20, value_parser = clap::value_parser!(u64).range(8..))]
    n: u64,
    #[arg(long, default_value_t = 0.1, value_parser = parse_delta)]
    delta: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct OracleArgs {
    #[arg(long, default_value_t = 7, value_parser = clap::value_parser!(u64).range(1..=8))]
    max_n: u64,
    #[arg(long, default_value_t = 200, value_parser = clap::value_parser!(u64).range(1..))]
    per_n: u64,
    #[arg(long, value_delimiter = ',', default_value = "0.05,0.3", value_parser = parse_delta)]
    deltas: Vec<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn parse_delta(s: &str) -> Result<f64, String> {
    let delta: f64 = s.trim().parse().map_err(|e| format!("{e}"))?;
    if (0.0..=1.0).contains(&delta) {
        Ok(delta)
    } else {
        Err(format!("{delta} is outside [0, 1]"))
    }
}

type CliResult<T> = Result<T, Box<dyn std::error::Error>>;

/// Prefixes file errors with the offending path.
fn in_file<T>(path: &Path, result: seqbias::Result<T>) -> CliResult<T> {
    result.map_err(|e| format!("{}: {e}", path.display()).into())
}

fn join<T: ToString>(values: &[T]) -> String {
    values
        .iter()
        .map(T::to_string)
        .collect::<Vec<_>>()
        .join(",")
}

fn simulate(args: SimulateArgs) -> CliResult<()> {
    let mut pairs = match &args.config {
        Some(path) => {
            let text = std::fs::read_to_string(path).map_err(seqbias::Error::from);
            in_file(path, text.and_then(|t| parse_config_text(&t)))?
        }
        None => Vec::new(),
    };
    let flags = [
        ("sweep", args.sweep.clone()),
        ("n", args.n.as_deref().map(join)),
        ("deltas", args.deltas.as_deref().map(join)),
        ("trials", args.trials.map(|t| t.to_string())),
        ("seed", args.seed.map(|s| s.to_string())),
        ("noise", args.noise.clone()),
        ("output", args.out.as_ref().map(|p| p.display().to_string())),
    ];
    pairs.extend(
        flags
            .into_iter()
            .filter_map(|(k, v)| v.map(|v| (k.to_string(), v))),
    );
    let config = ExperimentConfig::from_pairs(&pairs)?;

    let result = run_sweep(&config)?;
    for path in result.write_csv(&config.output)? {
        println!("wrote {}", path.display());
    }
    println!(
        "sweep {} with {} trials per point",
        config.sweep, config.trials
    );
    println!(
        "{:>6} {:>8} {:>14} {:>12} {:>12} {:>10}",
        "n", "delta", "metric", "ls", "induced", "sem(ls)"
    );
    for pair in result.aggregates.chunks(2) {
        let (ls, induced) = (&pair[0], &pair[1]);
        println!(
            "{:>6} {:>8} {:>14} {:>12.6} {:>12.6} {:>10.2e}",
            ls.n,
            ls.delta,
            ls.metric.as_str(),
            ls.mean,
            induced.mean,
            ls.sem
        );
    }
    if config.sweep == SweepKind::PerPosition {
        println!(
            "per-position profile in {}",
            config.output.join("per_position.csv").display()
        );
    }
    Ok(())
}

fn correct(args: CorrectArgs) -> CliResult<()> {
    let scores = in_file(&args.scores, ScoreVector::<f64>::load(&args.scores))?;
    let table = match &args.table {
        Some(path) => ScoreTable::Explicit(in_file(path, ExplicitTable::load_csv(path))?),
        None => ScoreTable::Parametric,
    };
    let ls = ls_estimate(scores.values(), &table)?;
    let induced = induced_ranking(scores.values())?;
    println!("items: {}", scores.len());
    println!("delta: {}", args.delta);
    println!("ls ranking: {}", ls.ranking);
    println!("induced ranking: {induced}");
    println!("relative ranks: {}", ls.rhat);
    println!("objective: {}", ls.objective);
    Ok(())
}

fn bench(args: BenchArgs) -> CliResult<()> {
    let n = args.n as usize;
    let sizes: Vec<usize> = [n / 8, n / 4, n / 2, n]
        .into_iter()
        .filter(|&s| s > 0)
        .collect();
    let rows = bench_scaling(&sizes, args.delta, args.seed)?;
    println!(
        "{:>10} {:>12} {:>8} {:>12} {:>8}",
        "n", "ostree_s", "ratio", "ls_s", "ratio"
    );
    let mut prev: Option<(f64, f64)> = None;
    for row in &rows {
        let (tree, ls) = (row.ostree.as_secs_f64(), row.ls_estimate.as_secs_f64());
        let ratio = |now: f64, before: Option<f64>| match before {
            Some(b) if b > 0.0 => format!("{:.2}", now / b),
            _ => "-".to_string(),
        };
        println!(
            "{:>10} {:>12.4} {:>8} {:>12.4} {:>8}",
            row.n,
            tree,
            ratio(tree, prev.map(|p| p.0)),
            ls,
            ratio(ls, prev.map(|p| p.1))
        );
        prev = Some((tree, ls));
    }
    Ok(())
}

fn oracle(args: OracleArgs) -> CliResult<bool> {
    let report = run_oracle_suite(
        args.max_n as usize,
        args.per_n as usize,
        &args.deltas,
        args.seed,
    )?;
    println!("instances: {}", report.instances);
    println!("objective mismatches: {}", report.objective_mismatches);
    println!(
        "rankings outside argmin set: {}",
        report.ranking_not_in_argmin
    );
    println!("max objective gap: {:e}", report.max_gap);
    let passed = report.passed(1e-12);
    println!("{}", if passed { "PASS" } else { "FAIL" });
    Ok(passed)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Simulate(args) => simulate(args).map(|()| true),
        Command::Correct(args) => correct(args).map(|()| true),
        Command::Bench(args) => bench(args).map(|()| true),
        Command::Oracle(args) => oracle(args),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
