//! `teamsim simulate`: replicated runs of one team, trajectory CSV plus a
//! summary JSON.

use rayon::prelude::*;
use serde::Serialize;

use teamsim_core::engine::{run_simulation, SimConfig, SimResult};
use teamsim_core::export;
use teamsim_core::objective::NoiseModel;
use teamsim_core::personality::TraitVector;
use teamsim_core::seed::mix3;

use super::{cmd_tags, ensure_out_dir, load_config, resolve_seed, to_json, write_file};
use crate::config::{parse_f64_csv, KvConfig};
use crate::{CliError, CliResult, CommonArgs};

#[derive(Debug, Serialize)]
struct Manifest {
    command: &'static str,
    seed: u64,
    noise: f64,
    t_max: usize,
    team: Vec<[f64; 5]>,
    replicates: usize,
    derived_seeds: Vec<u64>,
}

#[derive(Debug, Serialize)]
struct Summary {
    group_best: f64,
    group_best_position: Vec<f64>,
    mean_over_replicates: f64,
    per_replicate_group_best: Vec<f64>,
}

pub fn run(common: &CommonArgs) -> CliResult<()> {
    let config = load_config(common)?;
    let seed = resolve_seed(common, &config)?;
    let noise = common
        .noise
        .or(config.parse_value::<f64>("noise")?)
        .unwrap_or(0.0);
    let replicates = common
        .replicates
        .or(config.parse_value::<usize>("replicates")?)
        .unwrap_or(1);
    if replicates == 0 {
        return Err(CliError::Spec("replicates must be at least 1".into()));
    }
    let team = resolve_team(&config)?;

    let mut base = SimConfig::new(team.clone(), NoiseModel::new(noise)?, seed);
    if let Some(t_max) = config.parse_value::<usize>("t_max")? {
        base.t_max = t_max;
    }
    base.validate()?;

    let derived_seeds: Vec<u64> = (0..replicates)
        .map(|r| mix3(seed, cmd_tags::SIMULATE, r as u64))
        .collect();

    let results: Vec<SimResult> = derived_seeds
        .par_iter()
        .map(|&run_seed| {
            let mut run_config = base.clone();
            run_config.seed = run_seed;
            run_simulation(&run_config)
        })
        .collect::<teamsim_core::Result<_>>()?;

    let per_replicate: Vec<f64> = results.iter().map(|r| r.group_best_value).collect();
    let best_idx = per_replicate
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.partial_cmp(b.1).unwrap())
        .map(|(i, _)| i)
        .expect("at least one replicate");
    let summary = Summary {
        group_best: per_replicate[best_idx],
        group_best_position: results[best_idx].group_best_position.clone(),
        mean_over_replicates: per_replicate.iter().sum::<f64>() / replicates as f64,
        per_replicate_group_best: per_replicate,
    };

    ensure_out_dir(&common.out)?;
    write_file(
        &common.out,
        "trajectories.csv",
        &export::trajectory_csv(&results)?,
    )?;
    write_file(&common.out, "summary.json", &to_json(&summary)?)?;
    let manifest = Manifest {
        command: "simulate",
        seed,
        noise,
        t_max: base.t_max,
        team: team.iter().map(|t| t.as_array()).collect(),
        replicates,
        derived_seeds,
    };
    write_file(&common.out, "manifest.json", &to_json(&manifest)?)?;
    println!(
        "simulate: {replicates} replicate(s), mean group best {:.6}",
        summary.mean_over_replicates
    );
    Ok(())
}

/// Team from the config: repeated `agent = n,e,o,a,c` rows win over
/// `team_size` + `traits` (one row applied to every member). Defaults to six
/// agents with every trait at 0.5.
fn resolve_team(config: &KvConfig) -> CliResult<Vec<TraitVector>> {
    let agent_rows = config.get_all("agent");
    if !agent_rows.is_empty() {
        return agent_rows
            .into_iter()
            .map(|row| {
                let values =
                    parse_f64_csv(row).map_err(|e| CliError::Spec(format!("agent: {e}")))?;
                trait_vector_from(&values)
            })
            .collect();
    }
    let team_size = config.parse_value::<usize>("team_size")?.unwrap_or(6);
    let traits = match config.parse_f64_list("traits")? {
        Some(values) => trait_vector_from(&values)?,
        None => TraitVector::uniform(0.5).expect("0.5 is in range"),
    };
    Ok(vec![traits; team_size])
}

fn trait_vector_from(values: &[f64]) -> CliResult<TraitVector> {
    if values.len() != 5 {
        return Err(CliError::Spec(format!(
            "expected 5 trait scores (N,E,O,A,C), got {}",
            values.len()
        )));
    }
    Ok(TraitVector::new(
        values[0], values[1], values[2], values[3], values[4],
    )?)
}
