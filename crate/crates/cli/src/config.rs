//! Key=value config files mirroring the CLI flags. Flags win on conflict.

use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use anyhow::{bail, Context, Result};

#[derive(Debug, Default)]
pub struct ConfigFile {
    values: BTreeMap<String, String>,
}

impl ConfigFile {
    pub fn load(path: Option<&Path>) -> Result<Self> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("cannot read config file {}", path.display()))?;
        let mut values = BTreeMap::new();
        for (line_no, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                bail!(
                    "config file {} line {}: expected key = value, got {raw:?}",
                    path.display(),
                    line_no + 1
                );
            };
            values.insert(key.trim().to_owned(), value.trim().to_owned());
        }
        Ok(ConfigFile { values })
    }

    /// Resolve one setting: explicit flag, then config file, then default.
    pub fn resolve<T: FromStr + Clone>(&self, key: &str, flag: Option<T>, default: T) -> Result<T>
    where
        T::Err: std::fmt::Display,
    {
        if let Some(v) = flag {
            return Ok(v);
        }
        match self.values.get(key) {
            Some(raw) => raw
                .parse()
                .map_err(|e| anyhow::anyhow!("config key {key}: cannot parse {raw:?}: {e}")),
            None => Ok(default),
        }
    }

    /// Boolean settings: true if the flag was given or the config says so.
    pub fn resolve_bool(&self, key: &str, flag: bool) -> Result<bool> {
        if flag {
            return Ok(true);
        }
        match self.values.get(key) {
            Some(raw) => raw
                .parse()
                .map_err(|e| anyhow::anyhow!("config key {key}: cannot parse {raw:?}: {e}")),
            None => Ok(false),
        }
    }
}
