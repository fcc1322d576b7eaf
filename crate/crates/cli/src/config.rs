//! Run settings resolved from flags, a `key = value` config file and the
//! environment, in that order of precedence.

use std::collections::BTreeMap;
use std::fmt::Display;
use std::path::Path;
use std::str::FromStr;

use crate::UsageError;

pub const SCORER_URL_ENV: &str = "ARGMINE_SCORER_URL";

pub const KEYS: &[&str] = &[
    "seed",
    "strategy",
    "verbs",
    "balance",
    "fraction",
    "scorer",
    "endpoint",
    "threshold",
    "strict_gt",
    "workers",
    "timeout_secs",
    "max_batch",
    "max_in_flight",
];

#[derive(Debug, Default)]
pub struct ConfigFile {
    values: BTreeMap<String, String>,
    origin: String,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self, UsageError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| UsageError(format!("cannot read config {}: {e}", path.display())))?;
        Self::parse(&text, &path.display().to_string())
    }

    /// Blank lines and `#` comments are skipped; values may be quoted.
    pub fn parse(text: &str, origin: &str) -> Result<Self, UsageError> {
        let mut values = BTreeMap::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| UsageError(format!("{origin}:{}: expected `key = value`", i + 1)))?;
            let key = key.trim();
            if !KEYS.contains(&key) {
                return Err(UsageError(format!("{origin}:{}: unknown key `{key}`", i + 1)));
            }
            let value = value.trim();
            let value = value
                .strip_prefix('"')
                .and_then(|v| v.strip_suffix('"'))
                .unwrap_or(value);
            values.insert(key.to_string(), value.to_string());
        }
        Ok(ConfigFile {
            values,
            origin: origin.to_string(),
        })
    }

    pub fn get<T>(&self, key: &str) -> Result<Option<T>, UsageError>
    where
        T: FromStr,
        T::Err: Display,
    {
        self.values
            .get(key)
            .map(|v| {
                v.parse()
                    .map_err(|e| UsageError(format!("{}: invalid value for `{key}`: {e}", self.origin)))
            })
            .transpose()
    }

    /// Flag if given, else config value, else `default`.
    pub fn resolve<T>(&self, flag: Option<T>, key: &str, default: T) -> Result<T, UsageError>
    where
        T: FromStr,
        T::Err: Display,
    {
        match flag {
            Some(v) => Ok(v),
            None => Ok(self.get(key)?.unwrap_or(default)),
        }
    }

    /// A boolean switch: set by the flag, otherwise by the config file.
    pub fn switch(&self, flag: bool, key: &str) -> Result<bool, UsageError> {
        Ok(flag || self.get(key)?.unwrap_or(false))
    }

    /// Remote endpoint: flag, config, then the environment.
    pub fn endpoint(&self, flag: Option<String>) -> Result<Option<String>, UsageError> {
        if flag.is_some() {
            return Ok(flag);
        }
        if let Some(v) = self.get::<String>("endpoint")? {
            return Ok(Some(v));
        }
        Ok(std::env::var(SCORER_URL_ENV).ok().filter(|v| !v.is_empty()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_comments_and_quotes() {
        let c = ConfigFile::parse("# run\nseed = 7\nscorer = \"heuristic\"\n\n", "t").unwrap();
        assert_eq!(c.get::<u64>("seed").unwrap(), Some(7));
        assert_eq!(c.get::<String>("scorer").unwrap().as_deref(), Some("heuristic"));
        assert_eq!(c.get::<u64>("workers").unwrap(), None);
    }

    #[test]
    fn flag_beats_config_beats_default() {
        let c = ConfigFile::parse("seed = 7", "t").unwrap();
        assert_eq!(c.resolve(Some(1u64), "seed", 42).unwrap(), 1);
        assert_eq!(c.resolve(None, "seed", 42).unwrap(), 7);
        assert_eq!(ConfigFile::default().resolve(None, "seed", 42u64).unwrap(), 42);
    }

    #[test]
    fn rejects_unknown_keys_and_bad_values() {
        assert!(ConfigFile::parse("sed = 7", "t").is_err());
        assert!(ConfigFile::parse("seed 7", "t").is_err());
        let c = ConfigFile::parse("seed = x", "t").unwrap();
        assert!(c.get::<u64>("seed").is_err());
    }
}
