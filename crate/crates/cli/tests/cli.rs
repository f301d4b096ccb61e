use std::process::{Command, Output};

fn seqbias(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_seqbias"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn correct_prints_both_rankings() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("three.csv");
    std::fs::write(&path, "0.5,0.2,0.7\n").unwrap();
    let out = seqbias(&["correct", "--scores", path.to_str().unwrap()]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("induced ranking: 2,1,3"), "{text}");
    assert!(text.contains("ls ranking: 2,1,3"), "{text}");
    assert!(text.contains("objective: "), "{text}");
    assert!(text.contains("delta: 0"), "{text}");
}

#[test]
fn correct_accepts_a_column_with_header_and_echoes_delta() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("col.csv");
    std::fs::write(&path, "score\n0.9\n0.1\n").unwrap();
    let out = seqbias(&[
        "correct",
        "--scores",
        path.to_str().unwrap(),
        "--delta",
        "0.25",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("delta: 0.25"), "{text}");
    assert!(text.contains("induced ranking: 2,1"), "{text}");
}

#[test]
fn malformed_input_is_a_data_error() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.csv");
    std::fs::write(&path, "0.1\nabc\n").unwrap();
    let out = seqbias(&["correct", "--scores", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("abc"));

    let out = seqbias(&[
        "correct",
        "--scores",
        dir.path().join("missing.csv").to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn bad_flags_are_usage_errors() {
    assert_eq!(seqbias(&["simulate", "--bogus"]).status.code(), Some(2));
    assert_eq!(
        seqbias(&["simulate", "--deltas", "1.5"]).status.code(),
        Some(2)
    );
    assert_eq!(
        seqbias(&["simulate", "--trials", "0"]).status.code(),
        Some(2)
    );
    assert_eq!(seqbias(&["correct"]).status.code(), Some(2));
    assert_eq!(seqbias(&[]).status.code(), Some(2));
}

#[test]
fn simulate_writes_reproducible_csvs() {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let out_dir = dir.path().join(name);
        let out = seqbias(&[
            "simulate",
            "--sweep",
            "vary_delta",
            "--n",
            "100",
            "--deltas",
            "0.025,0.05,0.1,0.2",
            "--trials",
            "50",
            "--seed",
            "7",
            "--out",
            out_dir.to_str().unwrap(),
        ]);
        assert!(
            out.status.success(),
            "{}",
            String::from_utf8_lossy(&out.stderr)
        );
        out_dir
    };
    let a = run("a");
    let b = run("b");
    let mut names: Vec<_> = std::fs::read_dir(&a)
        .unwrap()
        .map(|e| e.unwrap().file_name())
        .collect();
    names.sort();
    assert_eq!(names, ["aggregate.csv", "trials.csv"]);
    for name in names {
        assert_eq!(
            std::fs::read(a.join(&name)).unwrap(),
            std::fs::read(b.join(&name)).unwrap()
        );
    }
    let agg = std::fs::read_to_string(a.join("aggregate.csv")).unwrap();
    // 4 noise levels x 3 metrics x 2 estimators.
    assert_eq!(agg.lines().count(), 1 + 24);
    let trials = std::fs::read_to_string(a.join("trials.csv")).unwrap();
    assert_eq!(trials.lines().count(), 1 + 200);
}

#[test]
fn config_file_is_overridden_by_flags() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("sweep.cfg");
    let out_dir = dir.path().join("out");
    std::fs::write(
        &config,
        format!(
            "sweep=per_position\nn=30\ndeltas=0.1\ntrials=100\noutput={}\n",
            out_dir.display()
        ),
    )
    .unwrap();
    let out = seqbias(&[
        "simulate",
        "--config",
        config.to_str().unwrap(),
        "--trials",
        "5",
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let trials = std::fs::read_to_string(out_dir.join("trials.csv")).unwrap();
    assert_eq!(trials.lines().count(), 1 + 5);
    let profile = std::fs::read_to_string(out_dir.join("per_position.csv")).unwrap();
    assert_eq!(profile.lines().count(), 1 + 30);

    std::fs::write(&config, "trials\n").unwrap();
    let out = seqbias(&["simulate", "--config", config.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn oracle_and_bench_run() {
    let out = seqbias(&["oracle", "--max-n", "5", "--per-n", "10"]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("PASS"));

    let out = seqbias(&["bench", "--n", "4096"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(
        text.lines().any(|l| l.trim_start().starts_with("4096 ")),
        "{text}"
    );
}
