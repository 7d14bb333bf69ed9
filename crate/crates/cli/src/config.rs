//! Plain key=value experiment config files.
//!
//! Every key mirrors a `run` flag; values on the command line override file
//! values. Lines starting with `#` and blank lines are ignored.

use anyhow::{bail, Context, Result};
use std::collections::BTreeMap;

#[derive(Debug, Default)]
pub struct FileConfig {
    pub sizes: Option<Vec<usize>>,
    pub trials: Option<usize>,
    pub schemes: Option<String>,
    pub area: Option<String>,
    pub range: Option<f64>,
    pub safety: Option<f64>,
    pub dim: Option<usize>,
    pub seed: Option<u64>,
    pub attempts: Option<usize>,
    pub out: Option<String>,
}

pub fn parse_file_config(text: &str) -> Result<FileConfig> {
    let mut entries: BTreeMap<&str, &str> = BTreeMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .with_context(|| format!("config line {}: expected key=value", idx + 1))?;
        entries.insert(key.trim(), value.trim());
    }

    let mut config = FileConfig::default();
    for (key, value) in entries {
        match key {
            "sizes" => config.sizes = Some(parse_size_list(value)?),
            "trials" => config.trials = Some(value.parse().context("invalid trials")?),
            "schemes" => config.schemes = Some(value.to_string()),
            "area" => config.area = Some(value.to_string()),
            "range" => config.range = Some(value.parse().context("invalid range")?),
            "safety" => config.safety = Some(value.parse().context("invalid safety")?),
            "dim" => config.dim = Some(value.parse().context("invalid dim")?),
            "seed" => config.seed = Some(value.parse().context("invalid seed")?),
            "attempts" => config.attempts = Some(value.parse().context("invalid attempts")?),
            "out" => config.out = Some(value.to_string()),
            other => bail!("unknown config key `{}`", other),
        }
    }
    Ok(config)
}

pub fn parse_size_list(value: &str) -> Result<Vec<usize>> {
    value
        .split(',')
        .map(|s| {
            s.trim()
                .parse::<usize>()
                .with_context(|| format!("invalid size `{}`", s.trim()))
        })
        .collect()
}

/// `1000` for a square or `1000x800` for width x height, meters.
pub fn parse_area(value: &str) -> Result<(f64, f64)> {
    let parse_side = |s: &str| -> Result<f64> {
        let side: f64 = s.trim().parse().with_context(|| format!("invalid area `{}`", s))?;
        if !side.is_finite() || side <= 0.0 {
            bail!("area dimensions must be positive");
        }
        Ok(side)
    };
    match value.split_once(['x', 'X']) {
        Some((w, h)) => Ok((parse_side(w)?, parse_side(h)?)),
        None => {
            let side = parse_side(value)?;
            Ok((side, side))
        }
    }
}
