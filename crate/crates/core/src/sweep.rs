//! Trait grid sweeps and the published-trend checks.
//!
//! A sweep pins one trait at each grid value for every team member,
//! randomizes the remaining traits per run (one draw per trait, shared by
//! the whole team), and measures team performance over repeated runs at
//! each noise level. Within a trait and noise level, run `r` of every grid
//! cell shares the same derived seed: compositions and simulation draws are
//! paired across grid values, so cell-to-cell differences isolate the swept
//! trait (common random numbers). [`check_trends`] evaluates the seven
//! qualitative trends the model is expected to show against the five
//! per-trait tables.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::agent::ModelConstants;
use crate::engine::{run_simulation, SimConfig};
use crate::error::{Error, Result};
use crate::objective::{NoiseModel, ObjectiveSpec};
use crate::personality::{Trait, TraitVector};
use crate::seed::{mix, mix3, tags};

/// Specification of one trait's sweep.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepConfig {
    pub swept_trait: Trait,
    /// Trait values to pin, each in [0, 1].
    pub grid: Vec<f64>,
    pub runs_per_cell: usize,
    pub team_size: usize,
    pub noise_levels: Vec<f64>,
    pub seed: u64,
    pub objective: ObjectiveSpec,
    pub constants: ModelConstants,
    pub t_max: usize,
}

impl SweepConfig {
    /// Full-protocol sweep: grid 0.0..=1.0 step 0.1, 100 runs per cell,
    /// 6-agent teams, noise levels 0%, 10%, 20%.
    pub fn standard(swept_trait: Trait, seed: u64) -> Self {
        let constants = ModelConstants::default();
        SweepConfig {
            swept_trait,
            grid: default_grid(),
            runs_per_cell: 100,
            team_size: 6,
            noise_levels: vec![0.0, 0.10, 0.20],
            seed,
            objective: ObjectiveSpec::default(),
            t_max: constants.t_max,
            constants,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.objective.validate()?;
        self.constants.validate()?;
        if self.grid.is_empty() || self.grid.iter().any(|g| !(0.0..=1.0).contains(g)) {
            return Err(Error::InvalidArgument(
                "grid must be non-empty with values in [0, 1]".into(),
            ));
        }
        if self.runs_per_cell == 0 {
            return Err(Error::InvalidArgument("runs_per_cell must be >= 1".into()));
        }
        if self.team_size < 2 {
            return Err(Error::InvalidArgument("team_size must be >= 2".into()));
        }
        if self.noise_levels.is_empty() {
            return Err(Error::InvalidArgument(
                "at least one noise level is required".into(),
            ));
        }
        for eta in &self.noise_levels {
            NoiseModel::new(*eta)?;
        }
        Ok(())
    }
}

/// Grid 0.0, 0.1, ..., 1.0.
pub fn default_grid() -> Vec<f64> {
    (0..=10).map(|i| i as f64 / 10.0).collect()
}

/// Aggregated outcome of one (trait value, noise level) cell.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepCell {
    pub trait_value: f64,
    pub noise: f64,
    pub mean: f64,
    pub sd: f64,
    pub n_runs: usize,
}

/// All cells for one swept trait, ordered by (grid index, noise index).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepTable {
    pub swept_trait: Trait,
    pub cells: Vec<SweepCell>,
}

impl SweepTable {
    /// Noise levels present, in first-seen order.
    pub fn noise_levels(&self) -> Vec<f64> {
        let mut levels = Vec::new();
        for cell in &self.cells {
            if !levels.contains(&cell.noise) {
                levels.push(cell.noise);
            }
        }
        levels
    }

    /// (grid value, mean, sd) series at one noise level, in grid order.
    pub fn series_at(&self, noise: f64) -> Vec<(f64, f64, f64)> {
        self.cells
            .iter()
            .filter(|c| c.noise == noise)
            .map(|c| (c.trait_value, c.mean, c.sd))
            .collect()
    }

    /// Mean of cell means at one noise level.
    pub fn grand_mean_at(&self, noise: f64) -> f64 {
        let series = self.series_at(noise);
        series.iter().map(|(_, m, _)| m).sum::<f64>() / series.len() as f64
    }

    /// Mean of cell standard deviations at one noise level.
    pub fn mean_sd_at(&self, noise: f64) -> f64 {
        let series = self.series_at(noise);
        series.iter().map(|(_, _, s)| s).sum::<f64>() / series.len() as f64
    }
}

/// Run the sweep: for every (grid value, noise level) cell, pin the swept
/// trait for the whole team, randomize every other trait per run, and
/// aggregate `runs_per_cell` seeded simulations. Runs execute in parallel;
/// cell aggregation is index-ordered so results are independent of thread
/// count.
pub fn run_sweep(config: &SweepConfig) -> Result<SweepTable> {
    config.validate()?;
    let mut cells = Vec::with_capacity(config.grid.len() * config.noise_levels.len());
    for &trait_value in &config.grid {
        for (noise_idx, &eta) in config.noise_levels.iter().enumerate() {
            // The seed deliberately ignores the grid index: run r is paired
            // across grid values so the swept trait is the only difference.
            let level_seed = mix(config.seed, noise_idx as u64);
            let noise = NoiseModel::new(eta)?;
            let values: Vec<f64> = (0..config.runs_per_cell)
                .into_par_iter()
                .map(|run_idx| {
                    let run_seed = mix3(level_seed, tags::SWEEP_RUN, run_idx as u64);
                    let team = random_team(config, trait_value, run_seed);
                    let sim = SimConfig {
                        objective: config.objective.clone(),
                        noise,
                        team_traits: team,
                        t_max: config.t_max,
                        constants: config.constants.clone(),
                        seed: mix(run_seed, tags::SWEEP_SIM),
                    };
                    run_simulation(&sim).map(|r| r.group_best_value)
                })
                .collect::<Result<_>>()?;
            let (mean, sd) = mean_sd(&values);
            cells.push(SweepCell {
                trait_value,
                noise: eta,
                mean,
                sd,
                n_runs: config.runs_per_cell,
            });
        }
    }
    Ok(SweepTable {
        swept_trait: config.swept_trait,
        cells,
    })
}

/// One homogeneous team: the swept trait pinned at `swept_value`, every
/// other trait drawn once per run and shared by all members.
fn random_team(config: &SweepConfig, swept_value: f64, run_seed: u64) -> Vec<TraitVector> {
    let mut rng = ChaCha8Rng::seed_from_u64(mix(run_seed, tags::SWEEP_TRAITS));
    let mut traits = TraitVector {
        neuroticism: 0.0,
        extraversion: 0.0,
        openness: 0.0,
        agreeableness: 0.0,
        conscientiousness: 0.0,
    };
    for t in Trait::ALL {
        let value = if t == config.swept_trait {
            swept_value
        } else {
            rng.random_range(0.0..=1.0)
        };
        traits.set(t, value);
    }
    vec![traits; config.team_size]
}

fn mean_sd(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

/// Pearson correlation. Returns 0 when either side has zero variance.
pub fn pearson(xs: &[f64], ys: &[f64]) -> f64 {
    assert_eq!(xs.len(), ys.len());
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
        syy += (y - my) * (y - my);
    }
    if sxx == 0.0 || syy == 0.0 {
        return 0.0;
    }
    sxy / (sxx * syy).sqrt()
}

/// Outcome of one trend check.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrendResult {
    pub trend_id: u32,
    pub description: String,
    /// Named statistics the verdict was computed from.
    pub observed_statistic: BTreeMap<String, f64>,
    /// Human-readable pass criterion.
    pub threshold: String,
    pub pass: bool,
}

/// The seven trend checks over all five trait tables.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrendReport {
    pub trends: Vec<TrendResult>,
}

impl TrendReport {
    pub fn trend(&self, id: u32) -> Option<&TrendResult> {
        self.trends.iter().find(|t| t.trend_id == id)
    }

    pub fn all_pass(&self) -> bool {
        self.trends.iter().all(|t| t.pass)
    }
}

/// Pearson correlation below which a slope counts as flat.
pub const FLAT_SLOPE_MAX_ABS_R: f64 = 0.3;

/// Evaluate the seven expected trends against the five per-trait sweep
/// tables. The tables must cover all five traits with a shared grid and
/// noise levels that include 0 and at least one positive level. The report
/// is a pure function of the tables.
pub fn check_trends(tables: &[SweepTable]) -> Result<TrendReport> {
    let table_for = |t: Trait| -> Result<&SweepTable> {
        tables
            .iter()
            .find(|tab| tab.swept_trait == t)
            .ok_or_else(|| {
                Error::InvalidArgument(format!("missing sweep table for trait {}", t.name()))
            })
    };
    for t in Trait::ALL {
        let table = table_for(t)?;
        if table.cells.is_empty() {
            return Err(Error::InvalidArgument(format!(
                "sweep table for {} has no cells",
                t.name()
            )));
        }
    }

    let mut levels = table_for(Trait::Neuroticism)?.noise_levels();
    levels.sort_by(|a, b| a.partial_cmp(b).unwrap());
    if levels.len() < 2 || levels[0] != 0.0 {
        return Err(Error::InvalidArgument(
            "trend checks need noise level 0 plus at least one positive level".into(),
        ));
    }
    let hi = *levels.last().unwrap();
    let positive_levels: Vec<f64> = levels.iter().copied().filter(|&e| e > 0.0).collect();
    for t in Trait::ALL {
        let mut have = table_for(t)?.noise_levels();
        have.sort_by(|a, b| a.partial_cmp(b).unwrap());
        if have != levels {
            return Err(Error::InvalidArgument(format!(
                "sweep table for {} covers different noise levels",
                t.name()
            )));
        }
    }

    let slope_at = |t: Trait, eta: f64| -> f64 {
        let series = table_for(t).unwrap().series_at(eta);
        let xs: Vec<f64> = series.iter().map(|(g, _, _)| *g).collect();
        let ys: Vec<f64> = series.iter().map(|(_, m, _)| *m).collect();
        pearson(&xs, &ys)
    };
    let sd_slope_at = |t: Trait, eta: f64| -> f64 {
        let series = table_for(t).unwrap().series_at(eta);
        let xs: Vec<f64> = series.iter().map(|(g, _, _)| *g).collect();
        let ys: Vec<f64> = series.iter().map(|(_, _, s)| *s).collect();
        pearson(&xs, &ys)
    };
    let eta_key = |prefix: &str, eta: f64| format!("{prefix}_eta_{eta:.2}");

    let mut trends = Vec::with_capacity(7);

    // Trend 1: performance deteriorates as uncertainty increases.
    {
        let mut observed = BTreeMap::new();
        let mut pass = true;
        for t in Trait::ALL {
            let table = table_for(t)?;
            let delta = table.grand_mean_at(hi) - table.grand_mean_at(0.0);
            pass &= delta < 0.0;
            observed.insert(format!("delta_mean_{}", t.letter()), delta);
        }
        trends.push(TrendResult {
            trend_id: 1,
            description:
                "mean team performance decreases from zero to maximum noise for every trait sweep"
                    .into(),
            observed_statistic: observed,
            threshold: "delta < 0 for every trait".into(),
            pass,
        });
    }

    // Trend 2: variability increases as uncertainty increases.
    {
        let mut observed = BTreeMap::new();
        let mut pass = true;
        for t in Trait::ALL {
            let table = table_for(t)?;
            let delta = table.mean_sd_at(hi) - table.mean_sd_at(0.0);
            pass &= delta > 0.0;
            observed.insert(format!("delta_sd_{}", t.letter()), delta);
        }
        trends.push(TrendResult {
            trend_id: 2,
            description:
                "performance variability increases from zero to maximum noise for every trait sweep"
                    .into(),
            observed_statistic: observed,
            threshold: "delta > 0 for every trait".into(),
            pass,
        });
    }

    // Trend 3: extreme neuroticism is the worst cell of its zero-noise sweep.
    {
        let table = table_for(Trait::Neuroticism)?;
        let series = table.series_at(0.0);
        let (top_value, top_mean, _) = *series
            .iter()
            .max_by(|a, b| a.0.partial_cmp(&b.0).unwrap())
            .expect("non-empty series");
        let min_rest = series
            .iter()
            .filter(|(g, _, _)| *g != top_value)
            .map(|(_, m, _)| *m)
            .fold(f64::INFINITY, f64::min);
        let margin = min_rest - top_mean;
        let mut observed = BTreeMap::new();
        observed.insert("mean_at_top_grid".into(), top_mean);
        observed.insert("min_mean_elsewhere".into(), min_rest);
        observed.insert("margin".into(), margin);
        trends.push(TrendResult {
            trend_id: 3,
            description:
                "at zero noise, fully neurotic teams perform worst across the neuroticism sweep"
                    .into(),
            observed_statistic: observed,
            threshold: "margin > 0".into(),
            pass: margin > 0.0,
        });
    }

    // Trend 4: extraversion hurts simple tasks and helps noisy ones.
    {
        let r_lo = slope_at(Trait::Extraversion, 0.0);
        let r_hi = slope_at(Trait::Extraversion, hi);
        let mut observed = BTreeMap::new();
        observed.insert(eta_key("r", 0.0), r_lo);
        observed.insert(eta_key("r", hi), r_hi);
        trends.push(TrendResult {
            trend_id: 4,
            description:
                "extraversion slope is negative without noise and positive at maximum noise".into(),
            observed_statistic: observed,
            threshold: "r < 0 at eta 0, r > 0 at max eta".into(),
            pass: r_lo < 0.0 && r_hi > 0.0,
        });
    }

    // Trends 5 and 6: openness / agreeableness help only noisy tasks.
    for (id, t) in [(5u32, Trait::Openness), (6u32, Trait::Agreeableness)] {
        let r_lo = slope_at(t, 0.0);
        let mut observed = BTreeMap::new();
        observed.insert(eta_key("r", 0.0), r_lo);
        let mut pass = r_lo.abs() < FLAT_SLOPE_MAX_ABS_R;
        for &eta in &positive_levels {
            let r = slope_at(t, eta);
            observed.insert(eta_key("r", eta), r);
            pass &= r > 0.0;
        }
        trends.push(TrendResult {
            trend_id: id,
            description: format!(
                "{} slope is positive at every positive noise level and flat without noise",
                t.name()
            ),
            observed_statistic: observed,
            threshold: format!("r > 0 for eta > 0, |r| < {FLAT_SLOPE_MAX_ABS_R} at eta 0"),
            pass,
        });
    }

    // Trend 7: conscientiousness raises performance and lowers variability
    // everywhere.
    {
        let mut observed = BTreeMap::new();
        let mut pass = true;
        for &eta in &levels {
            let r_mean = slope_at(Trait::Conscientiousness, eta);
            let r_sd = sd_slope_at(Trait::Conscientiousness, eta);
            pass &= r_mean > 0.0 && r_sd < 0.0;
            observed.insert(eta_key("r_mean", eta), r_mean);
            observed.insert(eta_key("r_sd", eta), r_sd);
        }
        trends.push(TrendResult {
            trend_id: 7,
            description:
                "conscientiousness slope is positive and the sd slope negative at every noise level"
                    .into(),
            observed_statistic: observed,
            threshold: "r_mean > 0 and r_sd < 0 at every level".into(),
            pass,
        });
    }

    Ok(TrendReport { trends })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tiny_config(t: Trait) -> SweepConfig {
        let mut config = SweepConfig::standard(t, 11);
        config.grid = vec![0.0, 0.5, 1.0];
        config.runs_per_cell = 5;
        config.noise_levels = vec![0.0, 0.2];
        config.team_size = 3;
        config.t_max = 25;
        config
    }

    #[test]
    fn cell_count_is_grid_times_levels() {
        let table = run_sweep(&tiny_config(Trait::Openness)).unwrap();
        assert_eq!(table.cells.len(), 3 * 2);
        for cell in &table.cells {
            assert!((0.0..=1.0).contains(&cell.mean));
            assert!(cell.sd >= 0.0);
            assert_eq!(cell.n_runs, 5);
        }
    }

    #[test]
    fn sweep_is_deterministic() {
        let a = run_sweep(&tiny_config(Trait::Agreeableness)).unwrap();
        let b = run_sweep(&tiny_config(Trait::Agreeableness)).unwrap();
        assert_eq!(a.cells, b.cells);
    }

    #[test]
    fn swept_trait_is_pinned_and_others_randomized() {
        let config = tiny_config(Trait::Neuroticism);
        let team = random_team(&config, 0.7, 123);
        assert_eq!(team.len(), config.team_size);
        for agent in &team {
            assert_eq!(agent.neuroticism, 0.7);
            // One draw per trait per run, shared by the whole team.
            assert_eq!(agent, &team[0]);
        }
        // Non-swept traits vary across runs.
        let other = random_team(&config, 0.7, 124);
        assert!((other[0].openness - team[0].openness).abs() > 1e-12);
    }

    #[test]
    fn conscientiousness_helps_at_zero_noise() {
        let mut config = tiny_config(Trait::Conscientiousness);
        config.grid = vec![0.0, 1.0];
        config.runs_per_cell = 40;
        config.noise_levels = vec![0.0];
        config.team_size = 6;
        config.t_max = 100;
        let table = run_sweep(&config).unwrap();
        let series = table.series_at(0.0);
        let (_, mean_lo, sd_lo) = series[0];
        let (_, mean_hi, sd_hi) = series[1];
        assert!(
            mean_hi > mean_lo,
            "mean at C=1 ({mean_hi}) should beat C=0 ({mean_lo})"
        );
        assert!(
            sd_hi < sd_lo,
            "sd at C=1 ({sd_hi}) should be below C=0 ({sd_lo})"
        );
    }

    #[test]
    fn pearson_handles_flat_series() {
        assert_eq!(pearson(&[1.0, 2.0, 3.0], &[5.0, 5.0, 5.0]), 0.0);
        let r = pearson(&[1.0, 2.0, 3.0], &[2.0, 4.0, 6.0]);
        assert!((r - 1.0).abs() < 1e-12);
        let r = pearson(&[1.0, 2.0, 3.0], &[6.0, 4.0, 2.0]);
        assert!((r + 1.0).abs() < 1e-12);
    }

    fn synthetic_table(
        t: Trait,
        means: &dyn Fn(f64, f64) -> f64,
        sds: &dyn Fn(f64, f64) -> f64,
    ) -> SweepTable {
        let mut cells = Vec::new();
        for g in default_grid() {
            for eta in [0.0, 0.1, 0.2] {
                cells.push(SweepCell {
                    trait_value: g,
                    noise: eta,
                    mean: means(g, eta),
                    sd: sds(g, eta),
                    n_runs: 100,
                });
            }
        }
        SweepTable {
            swept_trait: t,
            cells,
        }
    }

    #[test]
    fn flat_means_fail_the_mean_trends() {
        // Means flat in both grid and noise; sd increases with noise so the
        // variability trend is isolated from the rest.
        let tables: Vec<SweepTable> = Trait::ALL
            .iter()
            .map(|&t| synthetic_table(t, &|_, _| 0.5, &|_, eta| 0.01 + eta))
            .collect();
        let report = check_trends(&tables).unwrap();
        assert_eq!(report.trends.len(), 7);
        for id in [1u32, 3, 4, 5, 6, 7] {
            assert!(!report.trend(id).unwrap().pass, "trend {id} should fail");
        }
        assert!(report.trend(2).unwrap().pass);
    }

    #[test]
    fn constructed_ideal_table_passes_all_trends() {
        let tables: Vec<SweepTable> = Trait::ALL
            .iter()
            .map(|&t| {
                synthetic_table(
                    t,
                    &move |g, eta| {
                        let base = 0.8 - eta;
                        let slope = match t {
                            Trait::Neuroticism => -0.3 * (1.0 + g * g),
                            Trait::Extraversion => {
                                if eta == 0.0 {
                                    -0.1
                                } else {
                                    0.1
                                }
                            }
                            Trait::Openness | Trait::Agreeableness => {
                                if eta == 0.0 {
                                    0.0
                                } else {
                                    0.2
                                }
                            }
                            Trait::Conscientiousness => 0.15,
                        };
                        base + slope * g
                    },
                    &move |g, eta| {
                        let base = 0.02 + eta * 0.2;
                        if t == Trait::Conscientiousness {
                            base * (1.5 - g)
                        } else {
                            base
                        }
                    },
                )
            })
            .collect();
        let report = check_trends(&tables).unwrap();
        for t in &report.trends {
            assert!(
                t.pass,
                "trend {} failed: {:?}",
                t.trend_id, t.observed_statistic
            );
        }
    }

    #[test]
    fn report_is_deterministic() {
        let tables: Vec<SweepTable> = Trait::ALL
            .iter()
            .map(|&t| synthetic_table(t, &|g, eta| 0.5 + 0.1 * g - eta, &|_, eta| 0.01 + eta))
            .collect();
        let a = check_trends(&tables).unwrap();
        let b = check_trends(&tables).unwrap();
        for (x, y) in a.trends.iter().zip(&b.trends) {
            assert_eq!(x.pass, y.pass);
            assert_eq!(x.observed_statistic, y.observed_statistic);
        }
    }

    #[test]
    fn missing_tables_are_rejected() {
        let tables = vec![synthetic_table(Trait::Openness, &|_, _| 0.5, &|_, _| 0.1)];
        assert!(check_trends(&tables).is_err());
    }

    #[test]
    fn missing_zero_noise_is_rejected() {
        let tables: Vec<SweepTable> = Trait::ALL
            .iter()
            .map(|&t| {
                let mut table = synthetic_table(t, &|_, _| 0.5, &|_, _| 0.1);
                table.cells.retain(|c| c.noise > 0.0);
                table
            })
            .collect();
        assert!(check_trends(&tables).is_err());
    }
}
