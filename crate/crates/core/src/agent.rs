//! Per-agent state and the personality-gated movement rules.
//!
//! Each timestep an agent first realizes its five traits as booleans
//! ([`crate::personality::sample_traits`]), then [`step_agent`] resolves the
//! branch structure:
//!
//! 1. Active neuroticism with a stalled fitness history either freezes the
//!    agent (probability `p_neu`) or fires an impulsive random jump.
//! 2. Otherwise, inactive conscientiousness procrastinates (freezes) with
//!    probability `p_con`.
//! 3. Otherwise the agent accumulates acceleration terms: a curiosity term
//!    toward the best of its visited positions and nearby probe points
//!    (exploration radius gated by openness), either a social pull toward
//!    nearby teammates (extraverted) or a pull toward its own best position
//!    (introverted), an anticipatory pull toward where neighbors are heading
//!    (agreeable), and a small random error term (unconscientious). The mean
//!    of the accumulated terms becomes the acceleration; the new velocity is
//!    capped at `v_max`.
//!
//! Impulsive jumps from rule 1 bypass the velocity cap: their whole point is
//! a movement larger than ordinary reasoning allows. Position clamping in the
//! engine still applies.

use std::collections::VecDeque;

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::objective::{evaluate_objective, perceive_fitness, NoiseModel, ObjectiveSpec};
use crate::personality::{SampledTraits, TraitVector};

/// Model constants. Defaults are the standard parameterization used by every
/// experiment in this crate.
///
/// `v_init`, `a_large` and `a_small` are componentwise magnitude bounds: the
/// corresponding random vectors are drawn uniformly from `[-b, b]` per
/// coordinate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelConstants {
    /// Default number of timesteps for one run.
    pub t_max: usize,
    /// Length of the perceived-fitness window used by the neuroticism rule.
    pub n_hist: usize,
    /// Probability that a triggered neurotic agent withdraws rather than
    /// jumps.
    pub p_neu: f64,
    /// Probability that an unconscientious agent procrastinates.
    pub p_con: f64,
    /// Euclidean cap on velocity in the deliberate branch.
    pub v_max: f64,
    /// Componentwise bound of the initial velocity draw.
    pub v_init: f64,
    /// Probe-distance distribution when openness is active.
    pub mu_large: f64,
    pub sigma_large: f64,
    /// Probe-distance distribution when openness is inactive.
    pub mu_small: f64,
    pub sigma_small: f64,
    /// Weights of the top three candidates in the curiosity term. Must sum
    /// to 1 and be non-increasing.
    pub r_top: [f64; 3],
    /// Componentwise bound of the impulsive-jump acceleration.
    pub a_large: f64,
    /// Componentwise bound of the unconscientious error term.
    pub a_small: f64,
    /// Neighbor count while extraverted.
    pub n_neigh_large: usize,
    /// Neighbor count while introverted.
    pub n_neigh_small: usize,
}

impl Default for ModelConstants {
    fn default() -> Self {
        ModelConstants {
            t_max: 100,
            n_hist: 6,
            p_neu: 0.5,
            p_con: 0.5,
            v_max: 5.0,
            v_init: 1.0,
            mu_large: 12.0,
            sigma_large: 5.0,
            mu_small: 1.0,
            sigma_small: 0.01,
            r_top: [0.5, 0.3, 0.2],
            a_large: 20.0,
            a_small: 5.0,
            n_neigh_large: 5,
            n_neigh_small: 2,
        }
    }
}

impl ModelConstants {
    pub fn validate(&self) -> Result<()> {
        if self.t_max == 0 || self.n_hist < 2 {
            return Err(Error::InvalidArgument(
                "t_max must be >= 1 and n_hist >= 2".into(),
            ));
        }
        for (name, p) in [("p_neu", self.p_neu), ("p_con", self.p_con)] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::InvalidArgument(format!(
                    "{name} = {p} outside [0, 1]"
                )));
            }
        }
        let [r1, r2, r3] = self.r_top;
        if ((r1 + r2 + r3) - 1.0).abs() > 1e-12 || r1 < r2 || r2 < r3 {
            return Err(Error::InvalidArgument(
                "r_top weights must be non-increasing and sum to 1".into(),
            ));
        }
        if self.v_max <= 0.0 || self.sigma_large <= 0.0 || self.sigma_small <= 0.0 {
            return Err(Error::InvalidArgument(
                "v_max and probe sigmas must be positive".into(),
            ));
        }
        if self.n_neigh_small == 0 || self.n_neigh_large < self.n_neigh_small {
            return Err(Error::InvalidArgument(
                "neighbor counts must satisfy n_neigh_large >= n_neigh_small >= 1".into(),
            ));
        }
        Ok(())
    }
}

/// Full state of one agent between timesteps.
///
/// A position is perceived exactly once, when the agent arrives on it; the
/// value recorded in `visited_values` is what the agent remembers about that
/// position from then on. Under noise this makes lucky perceptions
/// persistent, which is what turns the noisy task into a genuinely harder
/// one.
#[derive(Debug, Clone)]
pub struct AgentState {
    pub traits: TraitVector,
    pub position: Vec<f64>,
    pub velocity: Vec<f64>,
    /// Best perceived fitness recorded so far.
    pub personal_best_value: f64,
    pub personal_best_position: Vec<f64>,
    /// The most recent perceived fitness values, capped at `n_hist`.
    pub fitness_history: VecDeque<f64>,
    /// Every position held so far, oldest first.
    pub visited_positions: Vec<Vec<f64>>,
    /// The perceived fitness recorded at each visited position.
    pub visited_values: Vec<f64>,
}

impl AgentState {
    /// Record a new perceived fitness, keeping the window at `n_hist`.
    pub fn push_history(&mut self, perceived: f64, n_hist: usize) {
        self.fitness_history.push_back(perceived);
        while self.fitness_history.len() > n_hist {
            self.fitness_history.pop_front();
        }
    }
}

/// The neuroticism stall detector: true iff the history window is full and
/// at least half of its consecutive transitions show no improvement
/// (`next <= prev`). Never fires on a partial window.
pub fn neuroticism_triggered(history: &VecDeque<f64>, n_hist: usize) -> bool {
    if history.len() < n_hist {
        return false;
    }
    let no_improvement = history
        .iter()
        .zip(history.iter().skip(1))
        .filter(|(prev, next)| next <= prev)
        .count();
    2 * no_improvement >= n_hist
}

/// Candidate set for the curiosity term: every visited position followed by
/// probe points at `+-delta` along each axis from the latest position.
/// Construction order is the tie-break order used when ranking.
pub fn candidate_points(visited: &[Vec<f64>], delta: f64) -> Vec<Vec<f64>> {
    let latest = visited
        .last()
        .expect("candidate construction needs at least one visited position");
    let dim = latest.len();
    let mut candidates = Vec::with_capacity(visited.len() + 2 * dim);
    candidates.extend(visited.iter().cloned());
    for d in 0..dim {
        for sign in [1.0, -1.0] {
            let mut p = latest.clone();
            p[d] += sign * delta;
            candidates.push(p);
        }
    }
    candidates
}

/// Draw the probe distance and build the candidate set. The distance comes
/// from `Normal(mu_large, sigma_large)` when openness is active and
/// `Normal(mu_small, sigma_small)` otherwise; one draw covers the whole set
/// (the probe pattern is symmetric, so the sign of delta is immaterial).
pub fn openness_candidates<R: Rng + ?Sized>(
    agent: &AgentState,
    o_active: bool,
    constants: &ModelConstants,
    rng: &mut R,
) -> Vec<Vec<f64>> {
    let (mu, sigma) = if o_active {
        (constants.mu_large, constants.sigma_large)
    } else {
        (constants.mu_small, constants.sigma_small)
    };
    let delta = Normal::new(mu, sigma)
        .expect("sigma is validated positive")
        .sample(rng);
    candidate_points(&agent.visited_positions, delta)
}

/// Curiosity acceleration: perceive every candidate (the closure receives
/// the candidate's construction index and position), rank by perceived
/// fitness (ties to the earliest-constructed candidate), and take the
/// weighted sum of displacements toward the top three.
pub fn openness_accel(
    candidates: &[Vec<f64>],
    position: &[f64],
    r_top: &[f64; 3],
    perceive: &mut dyn FnMut(usize, &[f64]) -> f64,
) -> Result<Vec<f64>> {
    if candidates.len() < 3 {
        return Err(Error::Internal(format!(
            "curiosity ranking needs at least 3 candidates, got {}",
            candidates.len()
        )));
    }
    let mut ranked: Vec<(f64, usize)> = candidates
        .iter()
        .enumerate()
        .map(|(i, c)| (perceive(i, c), i))
        .collect();
    ranked.sort_by(|a, b| {
        b.0.partial_cmp(&a.0)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.1.cmp(&b.1))
    });
    let mut accel = vec![0.0; position.len()];
    for (weight, &(_, idx)) in r_top.iter().zip(ranked.iter().take(3)) {
        for (a, (c, x)) in accel.iter_mut().zip(candidates[idx].iter().zip(position)) {
            *a += weight * (c - x);
        }
    }
    Ok(accel)
}

/// Allocation-free equivalent of [`openness_candidates`] +
/// [`openness_accel`] used by the simulation loop: identical draws in
/// identical order, without cloning the visited history every step.
fn curiosity_accel<R: Rng + ?Sized>(
    agent: &AgentState,
    o_active: bool,
    constants: &ModelConstants,
    objective: &ObjectiveSpec,
    noise: &NoiseModel,
    rng: &mut R,
) -> Vec<f64> {
    let (mu, sigma) = if o_active {
        (constants.mu_large, constants.sigma_large)
    } else {
        (constants.mu_small, constants.sigma_small)
    };
    let delta = Normal::new(mu, sigma)
        .expect("sigma is validated positive")
        .sample(rng);
    let latest = agent
        .visited_positions
        .last()
        .expect("at least one visited position");
    let dim = latest.len();
    let visited_count = agent.visited_positions.len();

    // Probe points clamped into the domain and perceived fresh, in
    // construction order; visited candidates keep their remembered values.
    let mut probes: Vec<Vec<f64>> = Vec::with_capacity(2 * dim);
    let mut probe_values: Vec<f64> = Vec::with_capacity(2 * dim);
    for d in 0..dim {
        for sign in [1.0, -1.0] {
            let mut p = latest.clone();
            p[d] += sign * delta;
            objective.bounds.clamp(&mut p);
            let true_fitness =
                evaluate_objective(&p, objective).expect("probe dimension matches objective");
            probe_values.push(perceive_fitness(true_fitness, noise, rng));
            probes.push(p);
        }
    }

    // Stable top-3 by perceived value (earliest construction index wins
    // ties; scanning in index order keeps that without an explicit check).
    let mut top: [(f64, usize); 3] = [(f64::NEG_INFINITY, usize::MAX); 3];
    let consider = |value: f64, idx: usize, top: &mut [(f64, usize); 3]| {
        for slot in 0..3 {
            if value > top[slot].0 {
                for k in (slot + 1..3).rev() {
                    top[k] = top[k - 1];
                }
                top[slot] = (value, idx);
                return;
            }
        }
    };
    for (idx, value) in agent.visited_values.iter().enumerate() {
        consider(*value, idx, &mut top);
    }
    for (j, value) in probe_values.iter().enumerate() {
        consider(*value, visited_count + j, &mut top);
    }

    let mut accel = vec![0.0; dim];
    for (weight, &(_, idx)) in constants.r_top.iter().zip(top.iter()) {
        let candidate: &[f64] = if idx < visited_count {
            &agent.visited_positions[idx]
        } else {
            &probes[idx - visited_count]
        };
        for (a, (c, x)) in accel.iter_mut().zip(candidate.iter().zip(&agent.position)) {
            *a += weight * (c - x);
        }
    }
    accel
}

/// Which teammate positions the social pull aims at.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SocialMode {
    /// Neighbors' previous-timestep positions.
    Current,
    /// Neighbors' positions extrapolated two timesteps ahead
    /// (`position + 2 * velocity`).
    Projected,
}

/// Social acceleration: the displacement from the agent to the weighted
/// centroid of its `k` nearest teammates (Euclidean distance on
/// previous-timestep positions, ties to the lower agent index, `k` capped at
/// team size minus one). A neighbor whose extraversion is active this
/// timestep counts twice.
pub fn social_accel(
    agent_idx: usize,
    team: &[AgentState],
    sampled: &[SampledTraits],
    k: usize,
    mode: SocialMode,
) -> Result<Vec<f64>> {
    if team.len() < 2 {
        return Err(Error::InvalidArgument(
            "social pull needs at least one teammate".into(),
        ));
    }
    let agent = &team[agent_idx];
    let mut others: Vec<(f64, usize)> = team
        .iter()
        .enumerate()
        .filter(|(j, _)| *j != agent_idx)
        .map(|(j, other)| (distance(&other.position, &agent.position), j))
        .collect();
    others.sort_by(|a, b| {
        a.0.partial_cmp(&b.0)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.1.cmp(&b.1))
    });
    let k = k.min(others.len());

    let dim = agent.position.len();
    let mut centroid = vec![0.0; dim];
    let mut total_weight = 0.0;
    for &(_, j) in others.iter().take(k) {
        let neighbor = &team[j];
        let weight = if sampled[j].e_active { 2.0 } else { 1.0 };
        total_weight += weight;
        match mode {
            SocialMode::Current => {
                for (c, x) in centroid.iter_mut().zip(&neighbor.position) {
                    *c += weight * x;
                }
            }
            SocialMode::Projected => {
                for (c, (x, v)) in centroid
                    .iter_mut()
                    .zip(neighbor.position.iter().zip(&neighbor.velocity))
                {
                    *c += weight * (x + 2.0 * v);
                }
            }
        }
    }
    Ok(centroid
        .iter()
        .zip(&agent.position)
        .map(|(c, x)| c / total_weight - x)
        .collect())
}

/// Reclusive acceleration: toward the agent's own best position.
pub fn personal_best_accel(agent: &AgentState) -> Vec<f64> {
    agent
        .personal_best_position
        .iter()
        .zip(&agent.position)
        .map(|(b, x)| b - x)
        .collect()
}

/// Average the accumulated acceleration terms, integrate the velocity and
/// apply the Euclidean cap. Returns `(velocity, acceleration)`.
pub fn combine_accelerations(
    accelerations: &[Vec<f64>],
    v_prev: &[f64],
    v_max: f64,
) -> (Vec<f64>, Vec<f64>) {
    let dim = v_prev.len();
    let count = accelerations.len() as f64;
    let mut accel = vec![0.0; dim];
    for term in accelerations {
        for (a, t) in accel.iter_mut().zip(term) {
            *a += t / count;
        }
    }
    let mut velocity: Vec<f64> = v_prev.iter().zip(&accel).map(|(v, a)| v + a).collect();
    let speed = crate::objective::norm2(&velocity);
    if speed > v_max {
        let scale = v_max / speed;
        for v in &mut velocity {
            *v *= scale;
        }
    }
    (velocity, accel)
}

/// One agent's movement decision for the current timestep.
#[derive(Debug, Clone, PartialEq)]
pub struct StepDecision {
    pub velocity: Vec<f64>,
    pub acceleration: Vec<f64>,
}

/// Resolve the behavior branches for agent `agent_idx` given the whole
/// team's previous-timestep state and this timestep's sampled traits.
/// Consumes draws only from the agent's own rng stream.
pub fn step_agent<R: Rng + ?Sized>(
    agent_idx: usize,
    team: &[AgentState],
    sampled_all: &[SampledTraits],
    constants: &ModelConstants,
    objective: &ObjectiveSpec,
    noise: &NoiseModel,
    rng: &mut R,
) -> Result<StepDecision> {
    let agent = &team[agent_idx];
    let sampled = sampled_all[agent_idx];
    let dim = agent.position.len();

    // Rule 1: neurotic reaction to a stalled history.
    if sampled.n_active && neuroticism_triggered(&agent.fitness_history, constants.n_hist) {
        if rng.random_bool(constants.p_neu) {
            // Withdraw: stop moving.
            return Ok(StepDecision {
                velocity: vec![0.0; dim],
                acceleration: vec![0.0; dim],
            });
        }
        // Impulsive jump: velocity resets, then the random acceleration is
        // applied whole. Not subject to the velocity cap.
        let accel = uniform_vec(dim, constants.a_large, rng);
        return Ok(StepDecision {
            velocity: accel.clone(),
            acceleration: accel,
        });
    }

    // Rule 2: procrastination.
    if !sampled.c_active && rng.random_bool(constants.p_con) {
        return Ok(StepDecision {
            velocity: vec![0.0; dim],
            acceleration: vec![0.0; dim],
        });
    }

    // Rule 3: deliberate movement.
    let mut accelerations: Vec<Vec<f64>> = Vec::with_capacity(4);
    accelerations.push(curiosity_accel(
        agent,
        sampled.o_active,
        constants,
        objective,
        noise,
        rng,
    ));

    let k = if sampled.e_active {
        accelerations.push(social_accel(
            agent_idx,
            team,
            sampled_all,
            constants.n_neigh_large,
            SocialMode::Current,
        )?);
        constants.n_neigh_large
    } else {
        accelerations.push(personal_best_accel(agent));
        constants.n_neigh_small
    };

    if sampled.a_active {
        accelerations.push(social_accel(
            agent_idx,
            team,
            sampled_all,
            k,
            SocialMode::Projected,
        )?);
    }

    if !sampled.c_active {
        accelerations.push(uniform_vec(dim, constants.a_small, rng));
    }

    let (velocity, acceleration) =
        combine_accelerations(&accelerations, &agent.velocity, constants.v_max);
    Ok(StepDecision {
        velocity,
        acceleration,
    })
}

fn uniform_vec<R: Rng + ?Sized>(dim: usize, bound: f64, rng: &mut R) -> Vec<f64> {
    (0..dim).map(|_| rng.random_range(-bound..=bound)).collect()
}

fn distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}
