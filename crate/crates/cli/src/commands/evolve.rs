//! `teamsim evolve`: R independent GA runs for one condition, with per-run
//! traces, best-ever genotypes and condition-level aggregates.

use std::fmt::Write as _;

use rayon::prelude::*;
use serde::Serialize;

use teamsim_core::export::{fmt_sig12, ga_generations_csv, ga_trace_csv};
use teamsim_core::ga::{decode, evolve, BestEver, GaConfig, GaMode, GenerationTrace};
use teamsim_core::objective::NoiseModel;
use teamsim_core::personality::{Trait, TraitVector};
use teamsim_core::seed::mix3;
use teamsim_core::stats::summarize;

use super::{cmd_tags, ensure_out_dir, load_config, resolve_seed, to_json, write_file};
use crate::{CliError, CliResult, EvolveArgs, ModeArg, PopulationArg};

#[derive(Debug, Serialize)]
struct Manifest {
    command: &'static str,
    seed: u64,
    mode: GaMode,
    population: String,
    noise: f64,
    n_pop: usize,
    n_parents: usize,
    n_gen: usize,
    fitness_reps: usize,
    creep: f64,
    trait_min: [f64; 5],
    trait_max: [f64; 5],
    t_max: usize,
    ga_runs: usize,
    derived_seeds: Vec<u64>,
}

#[derive(Debug, Serialize)]
struct BestEverArtifact {
    mode: GaMode,
    noise: f64,
    genes: Vec<f64>,
    fitness: f64,
}

pub fn run(args: &EvolveArgs) -> CliResult<()> {
    let common = &args.common;
    let config = load_config(common)?;
    let seed = resolve_seed(common, &config)?;

    let mode = match args.mode {
        Some(ModeArg::Best) => GaMode::Best,
        Some(ModeArg::Worst) => GaMode::Worst,
        None => match config.get("mode") {
            Some("best") | None => GaMode::Best,
            Some("worst") => GaMode::Worst,
            Some(other) => {
                return Err(CliError::Spec(format!(
                    "mode must be best or worst, got {other:?}"
                )))
            }
        },
    };
    let population = match args.population {
        Some(PopulationArg::General) => "general",
        Some(PopulationArg::Sample) => "sample",
        None => match config.get("population") {
            Some("sample") => "sample",
            Some("general") | None => "general",
            Some(other) => {
                return Err(CliError::Spec(format!(
                    "population must be general or sample, got {other:?}"
                )))
            }
        },
    };
    let noise = common
        .noise
        .or(config.parse_value::<f64>("noise")?)
        .unwrap_or(0.0);
    let ga_runs = common
        .replicates
        .or(config.parse_value::<usize>("replicates")?)
        .unwrap_or(1);
    if ga_runs == 0 {
        return Err(CliError::Spec("replicates must be at least 1".into()));
    }

    let noise_model = NoiseModel::new(noise)?;
    let mut base = match population {
        "sample" => GaConfig::sample_population(mode, noise_model, seed),
        _ => GaConfig::general_population(mode, noise_model, seed),
    };
    if let Some(v) = config.parse_value::<usize>("n_pop")? {
        base.n_pop = v;
    }
    if let Some(v) = config.parse_value::<usize>("n_parents")? {
        base.n_parents = v;
    }
    if let Some(v) = config.parse_value::<usize>("n_gen")? {
        base.n_gen = v;
    }
    if let Some(v) = config.parse_value::<usize>("fitness_reps")? {
        base.fitness_reps = v;
    }
    if let Some(v) = config.parse_value::<f64>("creep")? {
        base.creep = v;
    }
    if let Some(v) = config.parse_value::<usize>("t_max")? {
        base.t_max = v;
    }
    if let Some(values) = config.parse_f64_list("trait_min")? {
        base.bounds.min = bounds_from(&values, "trait_min")?;
    }
    if let Some(values) = config.parse_f64_list("trait_max")? {
        base.bounds.max = bounds_from(&values, "trait_max")?;
    }
    base.validate()?;

    let derived_seeds: Vec<u64> = (0..ga_runs)
        .map(|r| mix3(seed, cmd_tags::EVOLVE, r as u64))
        .collect();

    let runs: Vec<(BestEver, Vec<GenerationTrace>)> = derived_seeds
        .par_iter()
        .map(|&run_seed| {
            let mut cfg = base.clone();
            cfg.seed = run_seed;
            evolve(&cfg)
        })
        .collect::<teamsim_core::Result<_>>()?;

    ensure_out_dir(&common.out)?;
    let mut team_means: Vec<TraitVector> = Vec::with_capacity(ga_runs);
    let mut runs_csv = String::from(
        "ga_run_id,fitness,mean_neuroticism,mean_extraversion,mean_openness,\
         mean_agreeableness,mean_conscientiousness\n",
    );
    for (run_id, (best, traces)) in runs.iter().enumerate() {
        write_file(
            &common.out,
            &format!("ga_trace_run{run_id}.csv"),
            &ga_trace_csv(run_id, traces),
        )?;
        write_file(
            &common.out,
            &format!("ga_generations_run{run_id}.csv"),
            &ga_generations_csv(run_id, traces),
        )?;
        let artifact = BestEverArtifact {
            mode,
            noise,
            genes: best.genotype.genes.clone(),
            fitness: best.fitness,
        };
        write_file(
            &common.out,
            &format!("best_ever_run{run_id}.json"),
            &to_json(&artifact)?,
        )?;

        let team = decode(&best.genotype)?;
        let mean = TraitVector::mean_of(&team).expect("team is non-empty");
        team_means.push(mean);
        writeln!(
            runs_csv,
            "{run_id},{},{},{},{},{},{}",
            fmt_sig12(best.fitness),
            fmt_sig12(mean.neuroticism),
            fmt_sig12(mean.extraversion),
            fmt_sig12(mean.openness),
            fmt_sig12(mean.agreeableness),
            fmt_sig12(mean.conscientiousness),
        )
        .expect("writing to a String cannot fail");
    }
    write_file(&common.out, "runs.csv", &runs_csv)?;

    // Condition-level aggregate: mean and SD of the evolved team-mean
    // traits across GA runs.
    let mut aggregate = String::from("trait,n,mean,sd\n");
    for t in Trait::ALL {
        let values: Vec<f64> = team_means.iter().map(|m| m.get(t)).collect();
        let s = summarize(&values)?;
        writeln!(
            aggregate,
            "{},{},{},{}",
            t.name(),
            s.n,
            fmt_sig12(s.mean),
            fmt_sig12(s.sd)
        )
        .expect("writing to a String cannot fail");
    }
    write_file(&common.out, "evolved_traits.csv", &aggregate)?;

    let manifest = Manifest {
        command: "evolve",
        seed,
        mode,
        population: population.to_string(),
        noise,
        n_pop: base.n_pop,
        n_parents: base.n_parents,
        n_gen: base.n_gen,
        fitness_reps: base.fitness_reps,
        creep: base.creep,
        trait_min: base.bounds.min,
        trait_max: base.bounds.max,
        t_max: base.t_max,
        ga_runs,
        derived_seeds,
    };
    write_file(&common.out, "manifest.json", &to_json(&manifest)?)?;

    let mean_fitness: f64 = runs.iter().map(|(b, _)| b.fitness).sum::<f64>() / ga_runs as f64;
    println!("evolve: {ga_runs} run(s), mean best-ever fitness {mean_fitness:.6}");
    Ok(())
}

/// A scalar applies to every trait; five values map to N, E, O, A, C.
fn bounds_from(values: &[f64], key: &str) -> CliResult<[f64; 5]> {
    match values.len() {
        1 => Ok([values[0]; 5]),
        5 => Ok([values[0], values[1], values[2], values[3], values[4]]),
        n => Err(CliError::Spec(format!(
            "{key} needs 1 or 5 values, got {n}"
        ))),
    }
}
