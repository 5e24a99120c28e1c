//! A real-coded genetic algorithm over team compositions.
//!
//! A genotype is 20 reals: four agents' trait scores in agent-major blocks
//! of five (N, E, O, A, C). Fitness is the mean simulated team performance
//! over repeated runs. Truncation selection picks the `n_parents` best
//! (mode `Best`) or worst (mode `Worst`) individuals; children come from
//! single-point crossover of uniformly drawn parent pairs followed by a
//! creep mutation of one gene, clamped to per-trait bounds. Replacement is
//! generational; the best-ever individual (in the mode's direction) is
//! tracked separately.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::agent::ModelConstants;
use crate::engine::{team_performance, SimConfig};
use crate::error::{Error, Result};
use crate::objective::{NoiseModel, ObjectiveSpec};
use crate::personality::{Trait, TraitVector};
use crate::seed::{mix, mix3, tags};

/// Genes per genotype: four agents times five traits.
pub const GENOME_LEN: usize = 20;
/// Team size encoded by a genotype.
pub const GA_TEAM_SIZE: usize = 4;

/// Search direction: evolve the best- or worst-performing compositions.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GaMode {
    Best,
    Worst,
}

/// Per-trait bounds on gene values, indexed in canonical trait order.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraitBounds {
    pub min: [f64; 5],
    pub max: [f64; 5],
}

impl TraitBounds {
    /// General-population bounds: every trait in [0.1, 0.9].
    pub fn general_population() -> Self {
        TraitBounds {
            min: [0.1; 5],
            max: [0.9; 5],
        }
    }

    /// Sample-population bounds: per-trait ranges matching a cohort that is
    /// more conscientious and less variable than the general population.
    pub fn sample_population() -> Self {
        TraitBounds {
            min: [0.25, 0.42, 0.38, 0.25, 0.50],
            max: [0.68, 0.83, 0.79, 0.67, 1.00],
        }
    }

    pub fn validate(&self) -> Result<()> {
        for t in Trait::ALL {
            let (lo, hi) = (self.min[t.index()], self.max[t.index()]);
            if !(0.0..=1.0).contains(&lo) || !(0.0..=1.0).contains(&hi) || lo > hi {
                return Err(Error::InvalidArgument(format!(
                    "trait bounds for {} invalid: [{lo}, {hi}]",
                    t.name()
                )));
            }
        }
        Ok(())
    }

    fn for_gene(&self, gene_idx: usize) -> (f64, f64) {
        let t = gene_idx % 5;
        (self.min[t], self.max[t])
    }
}

/// A 20-gene team encoding.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Genotype {
    pub genes: Vec<f64>,
}

impl Genotype {
    pub fn new(genes: Vec<f64>) -> Result<Self> {
        if genes.len() != GENOME_LEN {
            return Err(Error::InvalidArgument(format!(
                "genotype needs {GENOME_LEN} genes, got {}",
                genes.len()
            )));
        }
        Ok(Genotype { genes })
    }

    /// Encode four trait vectors into the agent-major gene layout.
    pub fn encode(team: &[TraitVector]) -> Result<Self> {
        if team.len() != GA_TEAM_SIZE {
            return Err(Error::InvalidArgument(format!(
                "genotype encodes {GA_TEAM_SIZE} agents, got {}",
                team.len()
            )));
        }
        let genes = team.iter().flat_map(|t| t.as_array()).collect();
        Ok(Genotype { genes })
    }
}

/// Decode a genotype: genes `[5k, 5k+5)` become agent k's (N, E, O, A, C).
pub fn decode(genotype: &Genotype) -> Result<Vec<TraitVector>> {
    if genotype.genes.len() != GENOME_LEN {
        return Err(Error::InvalidArgument(format!(
            "genotype needs {GENOME_LEN} genes, got {}",
            genotype.genes.len()
        )));
    }
    genotype
        .genes
        .chunks_exact(5)
        .map(|block| TraitVector::new(block[0], block[1], block[2], block[3], block[4]))
        .collect()
}

/// Full GA configuration.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GaConfig {
    pub mode: GaMode,
    pub n_pop: usize,
    pub n_parents: usize,
    pub n_gen: usize,
    /// Simulation runs averaged per fitness evaluation.
    pub fitness_reps: usize,
    pub bounds: TraitBounds,
    pub noise: NoiseModel,
    /// Creep mutation step.
    pub creep: f64,
    pub seed: u64,
    pub objective: ObjectiveSpec,
    pub constants: ModelConstants,
    pub t_max: usize,
}

impl GaConfig {
    /// General-population preset: pop 30, 5 parents, 100 generations, 100
    /// runs per evaluation, trait bounds [0.1, 0.9].
    pub fn general_population(mode: GaMode, noise: NoiseModel, seed: u64) -> Self {
        let constants = ModelConstants::default();
        GaConfig {
            mode,
            n_pop: 30,
            n_parents: 5,
            n_gen: 100,
            fitness_reps: 100,
            bounds: TraitBounds::general_population(),
            noise,
            creep: 0.05,
            seed,
            objective: ObjectiveSpec::default(),
            t_max: constants.t_max,
            constants,
        }
    }

    /// Sample-population preset: pop 50, 20 parents, 100 generations,
    /// per-trait cohort bounds.
    pub fn sample_population(mode: GaMode, noise: NoiseModel, seed: u64) -> Self {
        GaConfig {
            n_pop: 50,
            n_parents: 20,
            bounds: TraitBounds::sample_population(),
            ..Self::general_population(mode, noise, seed)
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.bounds.validate()?;
        self.noise.validate()?;
        self.objective.validate()?;
        self.constants.validate()?;
        if self.n_parents == 0 || self.n_parents > self.n_pop {
            return Err(Error::InvalidArgument(format!(
                "n_parents = {} must be in 1..={}",
                self.n_parents, self.n_pop
            )));
        }
        if self.n_gen == 0 || self.fitness_reps == 0 || self.t_max == 0 {
            return Err(Error::InvalidArgument(
                "n_gen, fitness_reps and t_max must be >= 1".into(),
            ));
        }
        if self.creep.partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater) {
            return Err(Error::InvalidArgument("creep must be positive".into()));
        }
        Ok(())
    }
}

/// Per-generation record.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GenerationTrace {
    pub generation: usize,
    /// Fitness of every individual, in population order.
    pub fitness: Vec<f64>,
    pub mean_fitness: f64,
    /// Best-ever fitness (in the mode's direction) up to this generation.
    pub best_ever_fitness: f64,
    /// Mean trait vector over the selected parents' agents.
    pub parent_mean_traits: TraitVector,
    /// Smallest and largest gene value in the population this generation.
    pub gene_min: f64,
    pub gene_max: f64,
}

/// The best individual found across a whole run, in the mode's direction.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BestEver {
    pub genotype: Genotype,
    pub fitness: f64,
}

/// Evaluate a genotype: decode the team, run `fitness_reps` simulations at
/// the config's noise level, return the mean group best. Deterministic in
/// (genotype, config): replicate seeds derive from `cfg.seed` alone.
pub fn evaluate_fitness(genotype: &Genotype, cfg: &GaConfig) -> Result<f64> {
    evaluate_fitness_seeded(genotype, cfg, mix(cfg.seed, tags::GA_EVAL))
}

fn evaluate_fitness_seeded(genotype: &Genotype, cfg: &GaConfig, eval_seed: u64) -> Result<f64> {
    let team = decode(genotype)?;
    let sim = SimConfig {
        objective: cfg.objective.clone(),
        noise: cfg.noise,
        team_traits: team,
        t_max: cfg.t_max,
        constants: cfg.constants.clone(),
        seed: eval_seed,
    };
    team_performance(&sim, cfg.fitness_reps)
}

/// Truncation selection: the `n_parents` best (or worst, per mode)
/// individuals, ties broken by population index.
pub fn select_parents(population: &[Genotype], fitness: &[f64], cfg: &GaConfig) -> Vec<Genotype> {
    let mut order: Vec<usize> = (0..population.len()).collect();
    order.sort_by(|&a, &b| {
        let cmp = fitness[a]
            .partial_cmp(&fitness[b])
            .unwrap_or(std::cmp::Ordering::Equal);
        match cfg.mode {
            GaMode::Best => cmp.reverse().then(a.cmp(&b)),
            GaMode::Worst => cmp.then(a.cmp(&b)),
        }
    });
    order
        .into_iter()
        .take(cfg.n_parents)
        .map(|i| population[i].clone())
        .collect()
}

/// Single-point crossover at a uniformly drawn cut in 1..GENOME_LEN.
pub fn crossover<R: Rng + ?Sized>(p1: &Genotype, p2: &Genotype, rng: &mut R) -> Genotype {
    let cut = rng.random_range(1..GENOME_LEN);
    crossover_at(p1, p2, cut)
}

/// Deterministic crossover: child = p1[..cut] ++ p2[cut..].
pub fn crossover_at(p1: &Genotype, p2: &Genotype, cut: usize) -> Genotype {
    let mut genes = Vec::with_capacity(GENOME_LEN);
    genes.extend_from_slice(&p1.genes[..cut]);
    genes.extend_from_slice(&p2.genes[cut..]);
    Genotype { genes }
}

/// Creep mutation: one uniformly chosen gene moves by `+-creep` (sign
/// uniform), clamped to its trait's bounds. All other genes are unchanged.
pub fn mutate<R: Rng + ?Sized>(genotype: &Genotype, cfg: &GaConfig, rng: &mut R) -> Genotype {
    let mut genes = genotype.genes.clone();
    let idx = rng.random_range(0..genes.len());
    let step = if rng.random_bool(0.5) {
        cfg.creep
    } else {
        -cfg.creep
    };
    let (lo, hi) = cfg.bounds.for_gene(idx);
    genes[idx] = (genes[idx] + step).clamp(lo, hi);
    Genotype { genes }
}

fn random_genotype<R: Rng + ?Sized>(bounds: &TraitBounds, rng: &mut R) -> Genotype {
    let genes = (0..GENOME_LEN)
        .map(|i| {
            let (lo, hi) = bounds.for_gene(i);
            rng.random_range(lo..=hi)
        })
        .collect();
    Genotype { genes }
}

fn better(a: f64, b: f64, mode: GaMode) -> bool {
    match mode {
        GaMode::Best => a > b,
        GaMode::Worst => a < b,
    }
}

/// Run the generational loop. Fitness evaluations within a generation run
/// in parallel and share one generation-derived evaluation seed, so results
/// are identical regardless of thread count or evaluation order.
pub fn evolve(cfg: &GaConfig) -> Result<(BestEver, Vec<GenerationTrace>)> {
    cfg.validate()?;
    let mut init_rng = ChaCha8Rng::seed_from_u64(mix(cfg.seed, tags::GA_INIT));
    let mut var_rng = ChaCha8Rng::seed_from_u64(mix(cfg.seed, tags::GA_VAR));

    let mut population: Vec<Genotype> = (0..cfg.n_pop)
        .map(|_| random_genotype(&cfg.bounds, &mut init_rng))
        .collect();

    let mut best_ever: Option<BestEver> = None;
    let mut traces = Vec::with_capacity(cfg.n_gen);

    for generation in 0..cfg.n_gen {
        // One evaluation seed per generation, shared by every individual:
        // the population is compared on identical task instances, so
        // selection resolves composition differences instead of instance
        // luck. Instances are re-drawn each generation.
        let eval_seed = mix3(cfg.seed, tags::GA_EVAL, generation as u64);
        let fitness: Vec<f64> = population
            .par_iter()
            .map(|genotype| evaluate_fitness_seeded(genotype, cfg, eval_seed))
            .collect::<Result<_>>()?;

        for (idx, &f) in fitness.iter().enumerate() {
            let improves = best_ever
                .as_ref()
                .is_none_or(|b| better(f, b.fitness, cfg.mode));
            if improves {
                best_ever = Some(BestEver {
                    genotype: population[idx].clone(),
                    fitness: f,
                });
            }
        }
        let best_ever_fitness = best_ever.as_ref().expect("population evaluated").fitness;

        let parents = select_parents(&population, &fitness, cfg);
        let parent_agents: Vec<TraitVector> = parents
            .iter()
            .map(decode)
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .flatten()
            .collect();
        let parent_mean_traits = TraitVector::mean_of(&parent_agents).expect("at least one parent");
        let all_genes = population.iter().flat_map(|g| g.genes.iter().copied());
        let gene_min = all_genes.clone().fold(f64::INFINITY, f64::min);
        let gene_max = all_genes.fold(f64::NEG_INFINITY, f64::max);

        traces.push(GenerationTrace {
            generation,
            mean_fitness: fitness.iter().sum::<f64>() / fitness.len() as f64,
            fitness,
            best_ever_fitness,
            parent_mean_traits,
            gene_min,
            gene_max,
        });

        population = (0..cfg.n_pop)
            .map(|_| {
                let (i, j) = draw_parent_pair(parents.len(), &mut var_rng);
                let child = crossover(&parents[i], &parents[j], &mut var_rng);
                mutate(&child, cfg, &mut var_rng)
            })
            .collect();
    }

    Ok((best_ever.expect("n_gen >= 1"), traces))
}

/// Two distinct parent indices drawn uniformly; with a single parent both
/// slots point at it (crossover then reproduces the parent).
fn draw_parent_pair<R: Rng + ?Sized>(n_parents: usize, rng: &mut R) -> (usize, usize) {
    if n_parents == 1 {
        return (0, 0);
    }
    let first = rng.random_range(0..n_parents);
    let mut second = rng.random_range(0..n_parents - 1);
    if second >= first {
        second += 1;
    }
    (first, second)
}
