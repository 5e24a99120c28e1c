//! Team-level simulation: initialization, the synchronous timestep loop,
//! and repeated-run performance measurement.
//!
//! Determinism contract: every agent owns a ChaCha stream selected by its
//! index under the run seed, and all of an agent's draws (trait sampling,
//! branch coins, probe distances, perception noise) come from that stream.
//! Results are therefore bit-reproducible and independent of evaluation
//! order; repeated runs derive their seeds from the config seed and the run
//! index.

use std::collections::VecDeque;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::agent::{step_agent, AgentState, ModelConstants};
use crate::error::{Error, Result};
use crate::objective::{evaluate_objective, perceive_fitness, NoiseModel, ObjectiveSpec};
use crate::personality::{sample_traits, SampledTraits, TraitVector};
use crate::seed::{mix3, tags};

/// Full specification of one simulation run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SimConfig {
    pub objective: ObjectiveSpec,
    pub noise: NoiseModel,
    pub team_traits: Vec<TraitVector>,
    pub t_max: usize,
    pub constants: ModelConstants,
    pub seed: u64,
}

impl SimConfig {
    /// Standard configuration: default objective and constants, horizon from
    /// the constants.
    pub fn new(team_traits: Vec<TraitVector>, noise: NoiseModel, seed: u64) -> Self {
        let constants = ModelConstants::default();
        SimConfig {
            objective: ObjectiveSpec::default(),
            noise,
            team_traits,
            t_max: constants.t_max,
            constants,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.objective.validate()?;
        self.noise.validate()?;
        self.constants.validate()?;
        if self.t_max == 0 {
            return Err(Error::InvalidArgument("t_max must be >= 1".into()));
        }
        if self.team_traits.len() < 2 {
            return Err(Error::InvalidArgument(format!(
                "team needs at least 2 agents, got {}",
                self.team_traits.len()
            )));
        }
        for traits in &self.team_traits {
            traits.validate()?;
        }
        Ok(())
    }
}

/// Recorded path of a single agent, indices 0..=t_max.
#[derive(Debug, Clone, PartialEq)]
pub struct AgentTrajectory {
    pub positions: Vec<Vec<f64>>,
    pub perceived_fitness: Vec<f64>,
    pub true_fitness: Vec<f64>,
}

/// Outcome of one simulation run.
#[derive(Debug, Clone, PartialEq)]
pub struct SimResult {
    /// Noise-free objective value at the group-best position.
    pub group_best_value: f64,
    pub group_best_position: Vec<f64>,
    /// The bookkept (perceived) group best that drove the run.
    pub group_best_perceived: f64,
    /// Bookkept group best after each timestep, index 0 = initial state.
    /// Non-decreasing by construction.
    pub per_timestep_group_best: Vec<f64>,
    pub trajectories: Vec<AgentTrajectory>,
}

/// One independent ChaCha stream per agent under the given seed.
pub fn agent_rngs(seed: u64, team_size: usize) -> Vec<ChaCha8Rng> {
    (0..team_size)
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(i as u64);
            rng
        })
        .collect()
}

/// Initialize the team: uniform positions in the domain, small uniform
/// velocities, personal bests from the perceived fitness of the starting
/// position. Each agent draws only from its own stream.
pub fn init_team(config: &SimConfig, rngs: &mut [ChaCha8Rng]) -> Result<Vec<AgentState>> {
    config.validate()?;
    let bounds = &config.objective.bounds;
    let dim = bounds.dim();
    let v_init = config.constants.v_init;

    config
        .team_traits
        .iter()
        .zip(rngs.iter_mut())
        .map(|(traits, rng)| {
            let position: Vec<f64> = (0..dim)
                .map(|d| rng.random_range(bounds.min_corner[d]..=bounds.max_corner[d]))
                .collect();
            let velocity: Vec<f64> = (0..dim)
                .map(|_| rng.random_range(-v_init..=v_init))
                .collect();
            let true_fitness = evaluate_objective(&position, &config.objective)?;
            let perceived = perceive_fitness(true_fitness, &config.noise, rng);
            let mut history = VecDeque::with_capacity(config.constants.n_hist + 1);
            history.push_back(perceived);
            Ok(AgentState {
                traits: *traits,
                personal_best_value: perceived,
                personal_best_position: position.clone(),
                fitness_history: history,
                visited_positions: vec![position.clone()],
                visited_values: vec![perceived],
                velocity,
                position,
            })
        })
        .collect()
}

/// Run one simulation to completion.
///
/// Timestep order: sample every agent's traits first (so neighbor weighting
/// is well-defined), resolve every agent's movement from the previous
/// timestep's state, then apply all moves, clamp to bounds, perceive fitness
/// once per agent and update personal and group bests on perceived values.
/// The reported `group_best_value` is the noise-free objective at the
/// bookkept group-best position.
pub fn run_simulation(config: &SimConfig) -> Result<SimResult> {
    let mut rngs = agent_rngs(config.seed, config.team_traits.len());
    let mut team = init_team(config, &mut rngs)?;
    let n = team.len();
    let n_hist = config.constants.n_hist;

    let mut trajectories: Vec<AgentTrajectory> = team
        .iter()
        .map(|agent| {
            let true_fitness = evaluate_objective(&agent.position, &config.objective)
                .expect("initial position matches objective dimension");
            AgentTrajectory {
                positions: vec![agent.position.clone()],
                perceived_fitness: vec![agent.personal_best_value],
                true_fitness: vec![true_fitness],
            }
        })
        .collect();

    // Initial group best: the best perceived personal best, lowest index on
    // ties.
    let (mut best_idx, mut group_best_perceived) = (0, team[0].personal_best_value);
    for (i, agent) in team.iter().enumerate().skip(1) {
        if agent.personal_best_value > group_best_perceived {
            best_idx = i;
            group_best_perceived = agent.personal_best_value;
        }
    }
    let mut group_best_position = team[best_idx].personal_best_position.clone();
    let mut per_timestep_group_best = Vec::with_capacity(config.t_max + 1);
    per_timestep_group_best.push(group_best_perceived);

    for _t in 1..=config.t_max {
        // Phase 1: realize this timestep's traits for the whole team.
        let sampled: Vec<SampledTraits> = team
            .iter()
            .zip(rngs.iter_mut())
            .map(|(agent, rng)| sample_traits(&agent.traits, rng))
            .collect();

        // Phase 2: resolve all movements against the frozen t-1 state.
        let decisions: Vec<_> = (0..n)
            .map(|i| {
                step_agent(
                    i,
                    &team,
                    &sampled,
                    &config.constants,
                    &config.objective,
                    &config.noise,
                    &mut rngs[i],
                )
            })
            .collect::<Result<_>>()?;

        // Phase 3: apply moves, clamp, perceive, update bests.
        for (i, decision) in decisions.into_iter().enumerate() {
            let agent = &mut team[i];
            agent.velocity = decision.velocity;
            for (x, v) in agent.position.iter_mut().zip(&agent.velocity) {
                *x += v;
            }
            config.objective.bounds.clamp(&mut agent.position);
            agent.visited_positions.push(agent.position.clone());

            let true_fitness = evaluate_objective(&agent.position, &config.objective)?;
            let perceived = perceive_fitness(true_fitness, &config.noise, &mut rngs[i]);
            agent.visited_values.push(perceived);
            agent.push_history(perceived, n_hist);
            if perceived > agent.personal_best_value {
                agent.personal_best_value = perceived;
                agent.personal_best_position = agent.position.clone();
            }

            trajectories[i].positions.push(agent.position.clone());
            trajectories[i].perceived_fitness.push(perceived);
            trajectories[i].true_fitness.push(true_fitness);
        }

        for agent in &team {
            if agent.personal_best_value > group_best_perceived {
                group_best_perceived = agent.personal_best_value;
                group_best_position = agent.personal_best_position.clone();
            }
        }
        per_timestep_group_best.push(group_best_perceived);
    }

    let group_best_value = evaluate_objective(&group_best_position, &config.objective)?;
    Ok(SimResult {
        group_best_value,
        group_best_position,
        group_best_perceived,
        per_timestep_group_best,
        trajectories,
    })
}

/// Mean noise-free group best over `n_runs` independent runs. Run `r` uses
/// the seed `mix3(config.seed, SIM_REPLICATE, r)`; runs execute in parallel
/// but are aggregated in index order, so the result does not depend on
/// thread count.
pub fn team_performance(config: &SimConfig, n_runs: usize) -> Result<f64> {
    if n_runs == 0 {
        return Err(Error::InvalidArgument("n_runs must be >= 1".into()));
    }
    let values: Vec<f64> = (0..n_runs)
        .into_par_iter()
        .map(|r| {
            let mut run_config = config.clone();
            run_config.seed = mix3(config.seed, tags::SIM_REPLICATE, r as u64);
            run_simulation(&run_config).map(|res| res.group_best_value)
        })
        .collect::<Result<_>>()?;
    Ok(values.iter().sum::<f64>() / n_runs as f64)
}
