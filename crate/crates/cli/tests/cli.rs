//! Behavioral tests of the `teamsim` binary: artifact shapes, config
//! handling and exit codes.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn teamsim() -> Command {
    Command::new(env!("CARGO_BIN_EXE_teamsim"))
}

fn run_ok(args: &[&str]) -> Output {
    let output = teamsim().args(args).output().expect("binary runs");
    assert!(
        output.status.success(),
        "command {args:?} failed: {}",
        String::from_utf8_lossy(&output.stderr)
    );
    output
}

fn tmp_dir(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("teamsim-cli-{name}-{}", std::process::id()));
    let _ = fs::remove_dir_all(&dir);
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn read(path: &Path) -> String {
    fs::read_to_string(path).unwrap_or_else(|e| panic!("reading {}: {e}", path.display()))
}

#[test]
fn simulate_writes_expected_artifacts() {
    let dir = tmp_dir("simulate");
    let out = dir.join("sim");
    run_ok(&[
        "simulate",
        "--seed",
        "5",
        "--replicates",
        "2",
        "--noise",
        "0.1",
        "--out",
        out.to_str().unwrap(),
    ]);

    let trajectories = read(&out.join("trajectories.csv"));
    let lines: Vec<&str> = trajectories.lines().collect();
    assert_eq!(
        lines[0],
        "run_id,timestep,agent_id,x,y,perceived_fitness,true_fitness"
    );
    // 2 replicates x 6 agents x 101 timesteps.
    assert_eq!(lines.len(), 1 + 2 * 6 * 101);

    let summary: serde_json::Value =
        serde_json::from_str(&read(&out.join("summary.json"))).unwrap();
    let per_rep = summary["per_replicate_group_best"].as_array().unwrap();
    assert_eq!(per_rep.len(), 2);
    let mean = summary["mean_over_replicates"].as_f64().unwrap();
    let expect = per_rep.iter().map(|v| v.as_f64().unwrap()).sum::<f64>() / 2.0;
    assert!((mean - expect).abs() < 1e-12);

    let manifest: serde_json::Value =
        serde_json::from_str(&read(&out.join("manifest.json"))).unwrap();
    assert_eq!(manifest["command"], "simulate");
    assert_eq!(manifest["derived_seeds"].as_array().unwrap().len(), 2);
}

#[test]
fn simulate_single_replicate_mean_equals_group_best() {
    let dir = tmp_dir("simulate-single");
    let out = dir.join("sim");
    run_ok(&["simulate", "--seed", "11", "--out", out.to_str().unwrap()]);
    let summary: serde_json::Value =
        serde_json::from_str(&read(&out.join("summary.json"))).unwrap();
    assert_eq!(
        summary["group_best"].as_f64().unwrap(),
        summary["mean_over_replicates"].as_f64().unwrap()
    );
}

#[test]
fn simulate_heterogeneous_team_from_config() {
    let dir = tmp_dir("simulate-config");
    let cfg = dir.join("team.cfg");
    fs::write(
        &cfg,
        "seed = 3\nt_max = 10\nagent = 0.1,0.2,0.3,0.4,0.5\nagent = 0.9,0.8,0.7,0.6,0.5\n",
    )
    .unwrap();
    let out = dir.join("sim");
    run_ok(&[
        "simulate",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    let manifest: serde_json::Value =
        serde_json::from_str(&read(&out.join("manifest.json"))).unwrap();
    let team = manifest["team"].as_array().unwrap();
    assert_eq!(team.len(), 2);
    assert_eq!(team[0][0].as_f64().unwrap(), 0.1);
    assert_eq!(team[1][0].as_f64().unwrap(), 0.9);
    assert_eq!(manifest["t_max"], 10);
}

#[test]
fn sweep_artifacts_and_row_counts() {
    let dir = tmp_dir("sweep");
    let cfg = dir.join("sweep.cfg");
    fs::write(
        &cfg,
        "grid = 0.0, 0.5, 1.0\nruns_per_cell = 3\nteam_size = 2\n\
         noise_levels = 0.0, 0.2\nt_max = 10\n",
    )
    .unwrap();
    let out = dir.join("sw");
    run_ok(&[
        "sweep",
        "--seed",
        "2",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);

    let csv = read(&out.join("sweep.csv"));
    // 5 traits x 3 grid values x 2 noise levels.
    assert_eq!(csv.lines().count(), 1 + 5 * 3 * 2);

    let trends: serde_json::Value = serde_json::from_str(&read(&out.join("trends.json"))).unwrap();
    assert_eq!(trends["trends"].as_array().unwrap().len(), 7);
}

#[test]
fn evolve_writes_per_run_and_aggregate_artifacts() {
    let dir = tmp_dir("evolve");
    let cfg = dir.join("evolve.cfg");
    fs::write(
        &cfg,
        "n_pop = 5\nn_parents = 2\nn_gen = 1\nfitness_reps = 2\nt_max = 10\n",
    )
    .unwrap();
    let out = dir.join("evo");
    run_ok(&[
        "evolve",
        "--seed",
        "8",
        "--replicates",
        "2",
        "--mode",
        "best",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);

    for name in [
        "ga_trace_run0.csv",
        "ga_trace_run1.csv",
        "ga_generations_run0.csv",
        "ga_generations_run1.csv",
        "best_ever_run0.json",
        "best_ever_run1.json",
        "runs.csv",
        "evolved_traits.csv",
        "manifest.json",
    ] {
        assert!(out.join(name).exists(), "{name} missing");
    }

    // n_gen = 1 -> trace carries one generation of 5 individuals.
    let trace = read(&out.join("ga_trace_run0.csv"));
    assert_eq!(trace.lines().count(), 1 + 5);

    let best: serde_json::Value =
        serde_json::from_str(&read(&out.join("best_ever_run0.json"))).unwrap();
    assert_eq!(best["mode"], "best");
    assert_eq!(best["genes"].as_array().unwrap().len(), 20);
    let fitness = best["fitness"].as_f64().unwrap();
    assert!((0.0..=1.0).contains(&fitness));

    // Aggregate has one row per trait.
    let aggregate = read(&out.join("evolved_traits.csv"));
    assert_eq!(aggregate.lines().count(), 1 + 5);
}

#[test]
fn compare_self_gives_p_one_everywhere() {
    let dir = tmp_dir("compare");
    let cfg = dir.join("evolve.cfg");
    fs::write(
        &cfg,
        "n_pop = 4\nn_parents = 2\nn_gen = 1\nfitness_reps = 2\nt_max = 10\n",
    )
    .unwrap();
    let evo = dir.join("evo");
    run_ok(&[
        "evolve",
        "--seed",
        "21",
        "--replicates",
        "3",
        "--config",
        cfg.to_str().unwrap(),
        "--out",
        evo.to_str().unwrap(),
    ]);

    let out = dir.join("cmp");
    let runs = evo.join("runs.csv");
    run_ok(&[
        "compare",
        runs.to_str().unwrap(),
        runs.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);

    let csv = read(&out.join("ttest.csv"));
    let lines: Vec<&str> = csv.lines().collect();
    // 5 traits x 2 variants.
    assert_eq!(lines.len(), 1 + 10);
    for line in &lines[1..] {
        let p: f64 = line.rsplit(',').next().unwrap().parse().unwrap();
        assert!((p - 1.0).abs() < 1e-9, "self-compare p = {p}");
    }
}

#[test]
fn compare_long_format_and_parse_errors() {
    let dir = tmp_dir("compare-long");
    let a = dir.join("a.csv");
    let b = dir.join("b.csv");
    fs::write(&a, "trait,value\nx,1.0\nx,2.0\nx,3.0\n").unwrap();
    fs::write(&b, "trait,value\nx,2.0\nx,3.0\nx,4.0\n").unwrap();
    let out = dir.join("cmp");
    run_ok(&[
        "compare",
        a.to_str().unwrap(),
        b.to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    let csv = read(&out.join("ttest.csv"));
    assert_eq!(csv.lines().count(), 1 + 2);

    // Malformed value: exit code 1 with the line number in the message.
    let bad = dir.join("bad.csv");
    fs::write(&bad, "trait,value\nx,1.0\nx,oops\n").unwrap();
    let output = teamsim()
        .args([
            "compare",
            bad.to_str().unwrap(),
            b.to_str().unwrap(),
            "--out",
            out.to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&output.stderr).contains("line 3"));
}

#[test]
fn missing_seed_is_an_invalid_spec() {
    let dir = tmp_dir("no-seed");
    let output = teamsim()
        .args(["simulate", "--out", dir.join("x").to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&output.stderr).contains("seed"));
}

#[test]
fn unwritable_output_is_an_io_error() {
    let dir = tmp_dir("unwritable");
    // A regular file where a directory is needed.
    let blocker = dir.join("blocker");
    fs::write(&blocker, "x").unwrap();
    let output = teamsim()
        .args([
            "simulate",
            "--seed",
            "1",
            "--out",
            blocker.join("sub").to_str().unwrap(),
        ])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(2));
}

#[test]
fn unknown_flag_is_an_invalid_spec() {
    let output = teamsim().args(["simulate", "--bogus"]).output().unwrap();
    assert_eq!(output.status.code(), Some(1));
    let output = teamsim().args(["--help"]).output().unwrap();
    assert_eq!(output.status.code(), Some(0));
}

#[test]
fn rerun_with_same_spec_is_byte_identical() {
    let dir = tmp_dir("rerun");
    let out_a = dir.join("a");
    let out_b = dir.join("b");
    for out in [&out_a, &out_b] {
        run_ok(&[
            "simulate",
            "--seed",
            "33",
            "--replicates",
            "3",
            "--noise",
            "0.2",
            "--out",
            out.to_str().unwrap(),
        ]);
    }
    for name in ["trajectories.csv", "summary.json", "manifest.json"] {
        assert_eq!(
            read(&out_a.join(name)),
            read(&out_b.join(name)),
            "{name} differs between reruns"
        );
    }
}
