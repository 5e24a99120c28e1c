//! Core library for simulating how personality composition shapes team search
//! performance on noisy tasks.
//!
//! The pieces fit together like this:
//!
//! - [`personality`] — Big-Five trait scores and their per-timestep boolean
//!   realizations.
//! - [`objective`] — the normalized search task, solution-space bounds, and
//!   the noisy perception layer.
//! - [`agent`] — per-agent state and the personality-gated movement rules.
//! - [`engine`] — team initialization, the synchronous timestep loop, and
//!   multi-run performance measurement.
//! - [`ga`] — a real-coded genetic algorithm that evolves best- and
//!   worst-performing team compositions.
//! - [`sweep`] — trait grid sweeps and the published-trend checks.
//! - [`stats`] — two-sample t-tests (pooled and Welch) with a self-contained
//!   Student-t distribution.
//! - [`export`] — CSV builders with byte-stable numeric formatting.
//!
//! Everything is deterministic given a master seed: every random stream is
//! derived through [`seed::mix`], so results are reproducible bit-for-bit
//! regardless of thread count.

pub mod agent;
pub mod engine;
pub mod error;
pub mod export;
pub mod ga;
pub mod objective;
pub mod personality;
pub mod seed;
pub mod stats;
pub mod sweep;

pub use error::{Error, Result};
pub use personality::{SampledTraits, Trait, TraitVector};
