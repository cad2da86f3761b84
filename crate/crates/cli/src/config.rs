//! Config file loading and flag overrides.
//!
//! The config file is TOML mirroring [`RunConfig`]; every field is optional
//! and defaults to the published experiment. See the repository README for
//! the full schema.

use std::path::Path;

use anyhow::{bail, Context, Result};
use ppbench_core::{HoldoutKind, RunConfig};

/// Load `RunConfig` from a TOML file, or the defaults when no path is given.
pub fn load_config(path: Option<&Path>) -> Result<RunConfig> {
    let Some(path) = path else {
        return Ok(RunConfig::default());
    };
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading config file {}", path.display()))?;
    let config: RunConfig =
        toml::from_str(&text).with_context(|| format!("parsing config file {}", path.display()))?;
    Ok(config)
}

/// Command-line overrides applied on top of the loaded config.
#[derive(Debug, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub reps: Option<usize>,
    pub workers: Option<usize>,
    pub holdout: Option<String>,
}

pub fn apply_overrides(config: &mut RunConfig, overrides: &Overrides) -> Result<()> {
    if let Some(seed) = overrides.seed {
        config.seed = seed;
    }
    if let Some(reps) = overrides.reps {
        config.replications = reps;
    }
    if let Some(workers) = overrides.workers {
        config.workers = workers;
    }
    if let Some(holdout) = &overrides.holdout {
        config.holdout = parse_holdout_list(holdout)?;
    }
    Ok(())
}

/// Parse a comma-separated holdout list, e.g. `end` or `end,interior`.
pub fn parse_holdout_list(text: &str) -> Result<Vec<HoldoutKind>> {
    let mut kinds = Vec::new();
    for part in text.split(',') {
        match part.trim() {
            "end" => kinds.push(HoldoutKind::End),
            "interior" => kinds.push(HoldoutKind::Interior),
            other => bail!("unknown holdout scheme '{other}' (expected 'end' or 'interior')"),
        }
    }
    Ok(kinds)
}
