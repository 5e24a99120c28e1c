//! Deterministic 64-bit seed derivation.
//!
//! All randomness in the crate flows from one master seed. Sub-streams
//! (replicates, agents, GA evaluations, sweep cells) use seeds derived with
//! [`mix`], a splitmix64-based combiner: `mix(seed, tag)` feeds the tag
//! through the splitmix64 finalizer, xors it into the seed, and finalizes
//! again. Changing the master seed therefore changes every derived stream,
//! while distinct tags under the same seed give independent streams.
//!
//! Tags for the fixed derivation points live in [`tags`] so the layout is
//! documented in one place.

/// splitmix64 finalizer (Steele, Lea & Flood's generator without the
/// sequence increment). Bijective on u64.
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derive a child seed from `seed` and a tag.
pub fn mix(seed: u64, tag: u64) -> u64 {
    splitmix64(seed ^ splitmix64(tag))
}

/// Derive a child seed from `seed` and two tags, left to right.
pub fn mix3(seed: u64, a: u64, b: u64) -> u64 {
    mix(mix(seed, a), b)
}

/// Derive a child seed from `seed` and three tags, left to right.
pub fn mix4(seed: u64, a: u64, b: u64, c: u64) -> u64 {
    mix(mix3(seed, a, b), c)
}

/// Fixed tags naming each derivation point.
pub mod tags {
    /// One simulation replicate inside `team_performance`.
    pub const SIM_REPLICATE: u64 = 0x5349_4D52;
    /// GA population initialization stream.
    pub const GA_INIT: u64 = 0x4741_494E;
    /// GA fitness evaluation, further mixed with (generation, individual).
    pub const GA_EVAL: u64 = 0x4741_4556;
    /// GA selection/variation stream.
    pub const GA_VAR: u64 = 0x4741_5641;
    /// One sweep run, further mixed with the run index.
    pub const SWEEP_RUN: u64 = 0x5357_5052;
    /// Random non-swept traits within one sweep run.
    pub const SWEEP_TRAITS: u64 = 0x5357_5452;
    /// Simulation seed within one sweep run.
    pub const SWEEP_SIM: u64 = 0x5357_5349;
}
