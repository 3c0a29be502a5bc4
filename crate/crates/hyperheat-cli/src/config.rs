//! `key=value` config files holding default Monte Carlo settings, plus the
//! seed resolution chain: flag, then config file, then `HYPERHEAT_SEED`,
//! then a fixed constant.

use std::path::Path;

use crate::CliError;

pub const DEFAULT_PATHS: u64 = 100_000;
pub const DEFAULT_SEED: u64 = 1;

#[derive(Clone, Copy, Debug, Default)]
pub struct ConfigDefaults {
    pub paths: Option<u64>,
    pub steps: Option<usize>,
    pub seed: Option<u64>,
}

pub fn load_config(path: &Path) -> Result<ConfigDefaults, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("cannot read config {}: {e}", path.display())))?;
    let mut out = ConfigDefaults::default();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            CliError::Usage(format!(
                "config {}:{}: expected key=value, got '{raw}'",
                path.display(),
                lineno + 1
            ))
        })?;
        let (key, value) = (key.trim(), value.trim());
        let parse_err = |e| {
            CliError::Usage(format!(
                "config {}:{}: bad value for {key}: {e}",
                path.display(),
                lineno + 1
            ))
        };
        match key {
            "paths" => out.paths = Some(value.parse().map_err(|e| parse_err(format!("{e}")))?),
            "steps" => out.steps = Some(value.parse().map_err(|e| parse_err(format!("{e}")))?),
            "seed" => out.seed = Some(value.parse().map_err(|e| parse_err(format!("{e}")))?),
            other => {
                return Err(CliError::Usage(format!(
                    "config {}:{}: unknown key '{other}'",
                    path.display(),
                    lineno + 1
                )))
            }
        }
    }
    Ok(out)
}

pub fn resolve_seed(flag: Option<u64>, config: &ConfigDefaults) -> u64 {
    if let Some(s) = flag {
        return s;
    }
    if let Some(s) = config.seed {
        return s;
    }
    if let Ok(env) = std::env::var("HYPERHEAT_SEED") {
        if let Ok(s) = env.parse() {
            return s;
        }
    }
    DEFAULT_SEED
}
