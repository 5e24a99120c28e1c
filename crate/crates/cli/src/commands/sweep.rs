//! `teamsim sweep`: grid-sweep every trait at each noise level, write the
//! cell table and the trend report.

use serde::Serialize;

use teamsim_core::export;
use teamsim_core::personality::Trait;
use teamsim_core::seed::mix3;
use teamsim_core::sweep::{check_trends, default_grid, run_sweep, SweepConfig, SweepTable};

use super::{cmd_tags, ensure_out_dir, load_config, resolve_seed, to_json, write_file};
use crate::{CliError, CliResult, CommonArgs};

#[derive(Debug, Serialize)]
struct Manifest {
    command: &'static str,
    seed: u64,
    traits: Vec<String>,
    grid: Vec<f64>,
    runs_per_cell: usize,
    team_size: usize,
    noise_levels: Vec<f64>,
    t_max: usize,
    derived_seeds: Vec<u64>,
}

pub fn run(common: &CommonArgs) -> CliResult<()> {
    let config = load_config(common)?;
    let seed = resolve_seed(common, &config)?;

    let traits: Vec<Trait> = match config.get("sweep_traits") {
        None => Trait::ALL.to_vec(),
        Some(raw) => raw
            .split(',')
            .map(|part| {
                Trait::parse(part.trim()).ok_or_else(|| {
                    CliError::Spec(format!("sweep_traits: unknown trait {:?}", part.trim()))
                })
            })
            .collect::<CliResult<_>>()?,
    };

    let grid = config.parse_f64_list("grid")?.unwrap_or_else(default_grid);
    let runs_per_cell = common
        .replicates
        .or(config.parse_value::<usize>("runs_per_cell")?)
        .unwrap_or(100);
    let team_size = config.parse_value::<usize>("team_size")?.unwrap_or(6);
    // --noise eta means "zero baseline plus eta"; the full list comes from
    // the noise_levels config key.
    let noise_levels = match common.noise {
        Some(eta) => vec![0.0, eta],
        None => config
            .parse_f64_list("noise_levels")?
            .unwrap_or_else(|| vec![0.0, 0.10, 0.20]),
    };
    let t_max = config.parse_value::<usize>("t_max")?;

    let mut derived_seeds = Vec::with_capacity(traits.len());
    let mut tables: Vec<SweepTable> = Vec::with_capacity(traits.len());
    for (idx, &swept_trait) in traits.iter().enumerate() {
        let trait_seed = mix3(seed, cmd_tags::SWEEP, idx as u64);
        derived_seeds.push(trait_seed);
        let mut cfg = SweepConfig::standard(swept_trait, trait_seed);
        cfg.grid = grid.clone();
        cfg.runs_per_cell = runs_per_cell;
        cfg.team_size = team_size;
        cfg.noise_levels = noise_levels.clone();
        if let Some(t_max) = t_max {
            cfg.t_max = t_max;
        }
        tables.push(run_sweep(&cfg)?);
    }

    ensure_out_dir(&common.out)?;
    write_file(&common.out, "sweep.csv", &export::sweep_csv(&tables))?;
    let total_cells: usize = tables.iter().map(|t| t.cells.len()).sum();
    if traits.len() == Trait::ALL.len() {
        let report = check_trends(&tables)?;
        write_file(&common.out, "trends.json", &to_json(&report)?)?;
        let passed = report.trends.iter().filter(|t| t.pass).count();
        println!("sweep: {total_cells} cells, {passed}/7 trends pass");
    } else {
        println!("sweep: {total_cells} cells (trend checks need all five traits)");
    }

    let manifest = Manifest {
        command: "sweep",
        seed,
        traits: traits.iter().map(|t| t.name().to_string()).collect(),
        grid,
        runs_per_cell,
        team_size,
        noise_levels,
        t_max: t_max.unwrap_or(100),
        derived_seeds,
    };
    write_file(&common.out, "manifest.json", &to_json(&manifest)?)?;
    Ok(())
}
