//! The team task: a normalized objective over a bounded solution space,
//! plus the noise layer through which agents perceive it.
//!
//! The task is a radially symmetric basin: raw quality is the negated
//! distance from the origin, min-max normalized over the domain so that the
//! origin scores 1 and the corners score 0. Task uncertainty is additive
//! uniform noise on the normalized fitness, drawn fresh per perception
//! event.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Axis-aligned solution-space bounds. `min_corner < max_corner`
/// componentwise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Bounds {
    pub min_corner: Vec<f64>,
    pub max_corner: Vec<f64>,
}

impl Bounds {
    pub fn new(min_corner: Vec<f64>, max_corner: Vec<f64>) -> Result<Self> {
        let b = Bounds {
            min_corner,
            max_corner,
        };
        b.validate()?;
        Ok(b)
    }

    /// The square `[-half_width, half_width]^2`.
    pub fn symmetric_square(half_width: f64) -> Self {
        Bounds {
            min_corner: vec![-half_width, -half_width],
            max_corner: vec![half_width, half_width],
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.min_corner.is_empty() || self.min_corner.len() != self.max_corner.len() {
            return Err(Error::InvalidArgument(format!(
                "bounds corners must be non-empty and equal length (got {} and {})",
                self.min_corner.len(),
                self.max_corner.len()
            )));
        }
        for (d, (lo, hi)) in self.min_corner.iter().zip(&self.max_corner).enumerate() {
            // NaN-safe: anything but a strict ordering is rejected.
            if lo.partial_cmp(hi) != Some(std::cmp::Ordering::Less) {
                return Err(Error::InvalidArgument(format!(
                    "bounds dimension {d}: min {lo} not below max {hi}"
                )));
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.min_corner.len()
    }

    pub fn contains(&self, pos: &[f64]) -> bool {
        pos.len() == self.dim()
            && pos
                .iter()
                .zip(self.min_corner.iter().zip(&self.max_corner))
                .all(|(x, (lo, hi))| lo <= x && x <= hi)
    }

    /// Clamp a position into the bounds, componentwise.
    pub fn clamp(&self, pos: &mut [f64]) {
        for (x, (lo, hi)) in pos
            .iter_mut()
            .zip(self.min_corner.iter().zip(&self.max_corner))
        {
            *x = x.clamp(*lo, *hi);
        }
    }
}

/// Objective function family. Only the normalized distance basin exists
/// today; the enum leaves room for other task shapes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ObjectiveKind {
    Parabola,
}

/// An objective function over a bounded domain.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ObjectiveSpec {
    pub kind: ObjectiveKind,
    pub bounds: Bounds,
}

impl ObjectiveSpec {
    pub fn parabola(bounds: Bounds) -> Self {
        ObjectiveSpec {
            kind: ObjectiveKind::Parabola,
            bounds,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.bounds.validate()
    }
}

impl Default for ObjectiveSpec {
    /// The standard task: distance basin on `[-100, 100]^2`.
    fn default() -> Self {
        ObjectiveSpec::parabola(Bounds::symmetric_square(100.0))
    }
}

/// Normalized objective value at `pos`: `1 - ||pos|| / R` with
/// `R = ||max_corner||`, so the origin scores exactly 1 and the domain
/// corners exactly 0. The formula is total in `pos`; points outside the
/// domain (candidate probes may step outside) continue the gradient below 0.
pub fn evaluate_objective(pos: &[f64], spec: &ObjectiveSpec) -> Result<f64> {
    if pos.len() != spec.bounds.dim() {
        return Err(Error::InvalidArgument(format!(
            "position has {} dimensions, bounds have {}",
            pos.len(),
            spec.bounds.dim()
        )));
    }
    match spec.kind {
        ObjectiveKind::Parabola => {
            let norm = norm2(pos);
            let radius = norm2(&spec.bounds.max_corner);
            Ok(1.0 - norm / radius)
        }
    }
}

pub(crate) fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

/// Maximum relative perception error. 0 means perfect perception.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    pub eta: f64,
}

impl NoiseModel {
    pub fn new(eta: f64) -> Result<Self> {
        let m = NoiseModel { eta };
        m.validate()?;
        Ok(m)
    }

    pub fn noiseless() -> Self {
        NoiseModel { eta: 0.0 }
    }

    pub fn validate(&self) -> Result<()> {
        if !(0.0..1.0).contains(&self.eta) {
            return Err(Error::InvalidArgument(format!(
                "noise level eta = {} outside [0, 1)",
                self.eta
            )));
        }
        Ok(())
    }
}

/// One noisy perception of a fitness value: `f + u` with `u ~ U(-eta, eta)`
/// drawn fresh per call, so the perceived value lies in
/// `[f - eta, f + eta]` and is unbiased. With `eta = 0` the input is
/// returned bit-identically and the rng is left untouched.
pub fn perceive_fitness<R: Rng + ?Sized>(
    true_fitness: f64,
    noise: &NoiseModel,
    rng: &mut R,
) -> f64 {
    if noise.eta == 0.0 {
        return true_fitness;
    }
    let u = rng.random_range(-noise.eta..=noise.eta);
    true_fitness + u
}
