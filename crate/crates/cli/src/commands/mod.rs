//! Command implementations and shared output plumbing.

pub mod compare;
pub mod evolve;
pub mod simulate;
pub mod sweep;

use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::config::KvConfig;
use crate::{CliError, CliResult, CommonArgs};

/// Seed-derivation tags, one per command.
pub mod cmd_tags {
    pub const SIMULATE: u64 = 0x434C_4953;
    pub const SWEEP: u64 = 0x434C_5357;
    pub const EVOLVE: u64 = 0x434C_4556;
}

/// Load the config file if given, otherwise an empty config.
pub fn load_config(common: &CommonArgs) -> CliResult<KvConfig> {
    match &common.config {
        Some(path) => KvConfig::load(path),
        None => Ok(KvConfig::default()),
    }
}

/// The master seed: flag wins over file; one of them must provide it
/// (wall-clock seeding is not supported, runs must be reproducible).
pub fn resolve_seed(common: &CommonArgs, config: &KvConfig) -> CliResult<u64> {
    if let Some(seed) = common.seed {
        return Ok(seed);
    }
    config.parse_value::<u64>("seed")?.ok_or_else(|| {
        CliError::Spec("a master seed is required (--seed or seed= in the config)".into())
    })
}

pub fn ensure_out_dir(path: &Path) -> CliResult<()> {
    std::fs::create_dir_all(path)
        .map_err(|e| CliError::Io(format!("cannot create {}: {e}", path.display())))
}

pub fn write_file(dir: &Path, name: &str, contents: &str) -> CliResult<PathBuf> {
    let path = dir.join(name);
    std::fs::write(&path, contents)
        .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))?;
    Ok(path)
}

/// Serialize a manifest (or any artifact) as pretty JSON with a trailing
/// newline. Field order comes from the struct, so bytes are stable.
pub fn to_json<T: Serialize>(value: &T) -> CliResult<String> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| CliError::Spec(format!("cannot serialize artifact: {e}")))?;
    text.push('\n');
    Ok(text)
}
