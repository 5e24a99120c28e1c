//! Big-Five trait scores and their per-timestep realizations.
//!
//! A trait score is the probability that the corresponding behavior is
//! active at a given timestep: an agent with extraversion 0.8 acts
//! extraverted on 80% of timesteps. [`sample_traits`] draws the five
//! independent Bernoulli variables that gate an agent's behavior for one
//! timestep.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// The five personality dimensions, in canonical order N, E, O, A, C.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Trait {
    Neuroticism,
    Extraversion,
    Openness,
    Agreeableness,
    Conscientiousness,
}

impl Trait {
    pub const ALL: [Trait; 5] = [
        Trait::Neuroticism,
        Trait::Extraversion,
        Trait::Openness,
        Trait::Agreeableness,
        Trait::Conscientiousness,
    ];

    /// Position in the canonical N, E, O, A, C order.
    pub fn index(self) -> usize {
        match self {
            Trait::Neuroticism => 0,
            Trait::Extraversion => 1,
            Trait::Openness => 2,
            Trait::Agreeableness => 3,
            Trait::Conscientiousness => 4,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Trait::Neuroticism => "neuroticism",
            Trait::Extraversion => "extraversion",
            Trait::Openness => "openness",
            Trait::Agreeableness => "agreeableness",
            Trait::Conscientiousness => "conscientiousness",
        }
    }

    pub fn letter(self) -> char {
        match self {
            Trait::Neuroticism => 'N',
            Trait::Extraversion => 'E',
            Trait::Openness => 'O',
            Trait::Agreeableness => 'A',
            Trait::Conscientiousness => 'C',
        }
    }

    /// Parse either the one-letter code or the full lowercase name.
    pub fn parse(s: &str) -> Option<Trait> {
        match s {
            "N" | "n" | "neuroticism" => Some(Trait::Neuroticism),
            "E" | "e" | "extraversion" => Some(Trait::Extraversion),
            "O" | "o" | "openness" => Some(Trait::Openness),
            "A" | "a" | "agreeableness" => Some(Trait::Agreeableness),
            "C" | "c" | "conscientiousness" => Some(Trait::Conscientiousness),
            _ => None,
        }
    }
}

/// One agent's five trait scores, each in [0, 1].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TraitVector {
    pub neuroticism: f64,
    pub extraversion: f64,
    pub openness: f64,
    pub agreeableness: f64,
    pub conscientiousness: f64,
}

impl TraitVector {
    pub fn new(n: f64, e: f64, o: f64, a: f64, c: f64) -> Result<Self> {
        let v = TraitVector {
            neuroticism: n,
            extraversion: e,
            openness: o,
            agreeableness: a,
            conscientiousness: c,
        };
        v.validate()?;
        Ok(v)
    }

    /// All five scores set to the same value.
    pub fn uniform(value: f64) -> Result<Self> {
        Self::new(value, value, value, value, value)
    }

    pub fn from_array(a: [f64; 5]) -> Result<Self> {
        Self::new(a[0], a[1], a[2], a[3], a[4])
    }

    pub fn as_array(&self) -> [f64; 5] {
        [
            self.neuroticism,
            self.extraversion,
            self.openness,
            self.agreeableness,
            self.conscientiousness,
        ]
    }

    pub fn get(&self, t: Trait) -> f64 {
        self.as_array()[t.index()]
    }

    pub fn set(&mut self, t: Trait, value: f64) {
        match t {
            Trait::Neuroticism => self.neuroticism = value,
            Trait::Extraversion => self.extraversion = value,
            Trait::Openness => self.openness = value,
            Trait::Agreeableness => self.agreeableness = value,
            Trait::Conscientiousness => self.conscientiousness = value,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for t in Trait::ALL {
            let v = self.get(t);
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::InvalidArgument(format!(
                    "trait score {} = {v} outside [0, 1]",
                    t.name()
                )));
            }
        }
        Ok(())
    }

    /// Componentwise mean over a set of trait vectors. `None` when empty.
    pub fn mean_of(vectors: &[TraitVector]) -> Option<TraitVector> {
        if vectors.is_empty() {
            return None;
        }
        let n = vectors.len() as f64;
        let mut acc = [0.0; 5];
        for v in vectors {
            for (slot, x) in acc.iter_mut().zip(v.as_array()) {
                *slot += x;
            }
        }
        Some(TraitVector {
            neuroticism: acc[0] / n,
            extraversion: acc[1] / n,
            openness: acc[2] / n,
            agreeableness: acc[3] / n,
            conscientiousness: acc[4] / n,
        })
    }
}

/// The boolean realization of a [`TraitVector`] at one timestep.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SampledTraits {
    pub n_active: bool,
    pub e_active: bool,
    pub o_active: bool,
    pub a_active: bool,
    pub c_active: bool,
}

/// Draw each trait's activation as an independent Bernoulli with the trait
/// score as success probability. Always consumes five draws in N, E, O, A, C
/// order so rng streams stay aligned.
pub fn sample_traits<R: Rng + ?Sized>(traits: &TraitVector, rng: &mut R) -> SampledTraits {
    SampledTraits {
        n_active: rng.random_bool(traits.neuroticism),
        e_active: rng.random_bool(traits.extraversion),
        o_active: rng.random_bool(traits.openness),
        a_active: rng.random_bool(traits.agreeableness),
        c_active: rng.random_bool(traits.conscientiousness),
    }
}
