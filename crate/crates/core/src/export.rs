//! CSV builders for simulation, sweep, GA and t-test artifacts.
//!
//! Every float is written with [`fmt_sig12`] (12 significant digits,
//! scientific notation) so files are byte-identical across re-runs and
//! thread counts.

use std::fmt::Write;

use crate::engine::SimResult;
use crate::error::{Error, Result};
use crate::ga::GenerationTrace;
use crate::stats::TraitComparison;
use crate::sweep::SweepTable;

/// Fixed-precision float formatting: 12 significant digits, scientific.
pub fn fmt_sig12(value: f64) -> String {
    format!("{value:.11e}")
}

/// Trajectory rows for a set of replicate runs (2-dimensional domains).
/// Columns: run_id, timestep, agent_id, x, y, perceived_fitness,
/// true_fitness.
pub fn trajectory_csv(results: &[SimResult]) -> Result<String> {
    let mut out = String::from("run_id,timestep,agent_id,x,y,perceived_fitness,true_fitness\n");
    for (run_id, result) in results.iter().enumerate() {
        for (agent_id, trajectory) in result.trajectories.iter().enumerate() {
            for (t, position) in trajectory.positions.iter().enumerate() {
                if position.len() != 2 {
                    return Err(Error::InvalidArgument(format!(
                        "trajectory export needs 2-dimensional positions, got {}",
                        position.len()
                    )));
                }
                writeln!(
                    out,
                    "{run_id},{t},{agent_id},{},{},{},{}",
                    fmt_sig12(position[0]),
                    fmt_sig12(position[1]),
                    fmt_sig12(trajectory.perceived_fitness[t]),
                    fmt_sig12(trajectory.true_fitness[t]),
                )
                .expect("writing to a String cannot fail");
            }
        }
    }
    Ok(out)
}

/// Sweep cells for any number of tables.
/// Columns: trait, grid_value, noise, mean_perf, sd_perf, n_runs.
pub fn sweep_csv(tables: &[SweepTable]) -> String {
    let mut out = String::from("trait,grid_value,noise,mean_perf,sd_perf,n_runs\n");
    for table in tables {
        for cell in &table.cells {
            writeln!(
                out,
                "{},{},{},{},{},{}",
                table.swept_trait.name(),
                fmt_sig12(cell.trait_value),
                fmt_sig12(cell.noise),
                fmt_sig12(cell.mean),
                fmt_sig12(cell.sd),
                cell.n_runs,
            )
            .expect("writing to a String cannot fail");
        }
    }
    out
}

/// Per-individual fitness rows of one GA run.
/// Columns: ga_run_id, generation, individual_id, fitness.
pub fn ga_trace_csv(run_id: usize, traces: &[GenerationTrace]) -> String {
    let mut out = String::from("ga_run_id,generation,individual_id,fitness\n");
    for trace in traces {
        for (individual_id, fitness) in trace.fitness.iter().enumerate() {
            writeln!(
                out,
                "{run_id},{},{individual_id},{}",
                trace.generation,
                fmt_sig12(*fitness),
            )
            .expect("writing to a String cannot fail");
        }
    }
    out
}

/// Per-generation aggregates of one GA run, including the mean traits of
/// the selected parents.
pub fn ga_generations_csv(run_id: usize, traces: &[GenerationTrace]) -> String {
    let mut out = String::from(
        "ga_run_id,generation,mean_fitness,best_ever_fitness,\
         parent_mean_neuroticism,parent_mean_extraversion,parent_mean_openness,\
         parent_mean_agreeableness,parent_mean_conscientiousness\n",
    );
    for trace in traces {
        let m = trace.parent_mean_traits;
        writeln!(
            out,
            "{run_id},{},{},{},{},{},{},{},{}",
            trace.generation,
            fmt_sig12(trace.mean_fitness),
            fmt_sig12(trace.best_ever_fitness),
            fmt_sig12(m.neuroticism),
            fmt_sig12(m.extraversion),
            fmt_sig12(m.openness),
            fmt_sig12(m.agreeableness),
            fmt_sig12(m.conscientiousness),
        )
        .expect("writing to a String cannot fail");
    }
    out
}

/// Dual-variant t-test table.
/// Columns: trait, variant, n1, mean1, sd1, n2, mean2, sd2, t, df, p.
pub fn ttest_csv(comparisons: &[TraitComparison]) -> String {
    let mut out = String::from("trait,variant,n1,mean1,sd1,n2,mean2,sd2,t,df,p\n");
    for comparison in comparisons {
        for result in [&comparison.pooled, &comparison.welch] {
            let variant = match result.variant {
                crate::stats::TTestVariant::Pooled => "pooled",
                crate::stats::TTestVariant::Welch => "welch",
            };
            writeln!(
                out,
                "{},{variant},{},{},{},{},{},{},{},{},{}",
                comparison.trait_dim.name(),
                result.group_a.n,
                fmt_sig12(result.group_a.mean),
                fmt_sig12(result.group_a.sd),
                result.group_b.n,
                fmt_sig12(result.group_b.mean),
                fmt_sig12(result.group_b.sd),
                fmt_sig12(result.statistic),
                fmt_sig12(result.df),
                fmt_sig12(result.p_two_tailed),
            )
            .expect("writing to a String cannot fail");
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{run_simulation, SimConfig};
    use crate::objective::NoiseModel;
    use crate::personality::TraitVector;
    use crate::stats::compare_evolved_traits;

    fn small_result() -> SimResult {
        let mut config = SimConfig::new(
            vec![TraitVector::uniform(0.5).unwrap(); 2],
            NoiseModel::new(0.1).unwrap(),
            7,
        );
        config.t_max = 3;
        run_simulation(&config).unwrap()
    }

    #[test]
    fn fmt_sig12_is_stable_and_precise() {
        assert_eq!(fmt_sig12(1.0), "1.00000000000e0");
        assert_eq!(fmt_sig12(0.5), "5.00000000000e-1");
        assert_eq!(fmt_sig12(0.0), "0.00000000000e0");
        let x = 0.29289321881345254;
        let parsed: f64 = fmt_sig12(x).parse().unwrap();
        assert!((parsed - x).abs() < 1e-12);
    }

    #[test]
    fn trajectory_rows_cover_all_timesteps() {
        let result = small_result();
        let csv = trajectory_csv(std::slice::from_ref(&result)).unwrap();
        let lines: Vec<&str> = csv.lines().collect();
        // header + agents * (t_max + 1)
        assert_eq!(lines.len(), 1 + 2 * 4);
        assert_eq!(
            lines[0],
            "run_id,timestep,agent_id,x,y,perceived_fitness,true_fitness"
        );
        assert!(lines[1].starts_with("0,0,0,"));
    }

    #[test]
    fn trajectory_export_is_byte_identical_across_runs() {
        let a = trajectory_csv(&[small_result()]).unwrap();
        let b = trajectory_csv(&[small_result()]).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn sweep_csv_has_header_and_rows() {
        use crate::sweep::{SweepCell, SweepTable};
        let table = SweepTable {
            swept_trait: crate::personality::Trait::Openness,
            cells: vec![SweepCell {
                trait_value: 0.5,
                noise: 0.2,
                mean: 0.9,
                sd: 0.05,
                n_runs: 10,
            }],
        };
        let csv = sweep_csv(&[table]);
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 2);
        assert!(lines[1].starts_with("openness,"));
        assert!(lines[1].ends_with(",10"));
    }

    #[test]
    fn ttest_csv_two_rows_per_trait() {
        let a: Vec<TraitVector> = (0..5)
            .map(|i| TraitVector::uniform(0.2 + i as f64 * 0.1).unwrap())
            .collect();
        let b: Vec<TraitVector> = (0..5)
            .map(|i| TraitVector::uniform(0.3 + i as f64 * 0.1).unwrap())
            .collect();
        let table = compare_evolved_traits(&a, &b).unwrap();
        let csv = ttest_csv(&table);
        assert_eq!(csv.lines().count(), 1 + 10);
        assert_eq!(csv.lines().filter(|l| l.contains(",pooled,")).count(), 5);
        assert_eq!(csv.lines().filter(|l| l.contains(",welch,")).count(), 5);
    }
}
