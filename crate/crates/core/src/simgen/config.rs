use std::collections::BTreeMap;
use std::path::Path;
use std::str::FromStr;

use super::{Alternative, SimSpec, ZModel};
use crate::error::{Error, Result};

/// `key = value` settings, one per line; `#` starts a comment.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct KeyValues {
    entries: BTreeMap<String, String>,
}

pub fn parse_key_values(text: &str) -> Result<KeyValues> {
    let mut entries = BTreeMap::new();
    for (n, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(Error::InvalidParameter(format!("line {}: expected 'key = value'", n + 1)));
        };
        let key = key.trim().to_ascii_lowercase();
        if key.is_empty() {
            return Err(Error::InvalidParameter(format!("line {}: empty key", n + 1)));
        }
        if entries.insert(key.clone(), value.trim().to_string()).is_some() {
            return Err(Error::InvalidParameter(format!("line {}: duplicate key '{key}'", n + 1)));
        }
    }
    Ok(KeyValues { entries })
}

impl KeyValues {
    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        parse_key_values(&text)
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.entries.get(key).map(String::as_str)
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.entries.keys().map(String::as_str)
    }

    pub fn parsed<T: FromStr>(&self, key: &str) -> Result<Option<T>> {
        self.get(key)
            .map(|v| {
                v.parse()
                    .map_err(|_| Error::InvalidParameter(format!("cannot parse '{v}' for '{key}'")))
            })
            .transpose()
    }

    /// Comma-separated list value.
    pub fn list<T: FromStr>(&self, key: &str) -> Result<Option<Vec<T>>> {
        self.get(key)
            .map(|v| {
                v.split(',')
                    .map(|item| {
                        item.trim()
                            .parse()
                            .map_err(|_| Error::InvalidParameter(format!("cannot parse '{item}' in '{key}'")))
                    })
                    .collect()
            })
            .transpose()
    }
}

const SPEC_KEYS: [&str; 9] = ["model", "k", "s", "rho", "sigma2", "alternative", "replications", "seed", "alpha"];

impl SimSpec {
    /// Builds a spec from defaults overridden by `kv`. Unknown keys are errors.
    pub fn from_key_values(kv: &KeyValues) -> Result<Self> {
        if let Some(bad) = kv.keys().find(|k| !SPEC_KEYS.contains(k)) {
            return Err(Error::InvalidParameter(format!("unknown key '{bad}'")));
        }
        let mut spec = SimSpec::default();
        if let Some(m) = kv.get("model") {
            spec.model = ZModel::parse(m)?;
        }
        if let Some(a) = kv.get("alternative") {
            spec.alternative = Alternative::parse(a)?;
        }
        spec.k = kv.parsed("k")?.unwrap_or(spec.k);
        spec.s = kv.parsed("s")?.unwrap_or(spec.s);
        spec.rho = kv.parsed("rho")?.unwrap_or(spec.rho);
        spec.sigma2 = kv.parsed("sigma2")?.unwrap_or(spec.sigma2);
        spec.replications = kv.parsed("replications")?.unwrap_or(spec.replications);
        spec.seed = kv.parsed("seed")?.unwrap_or(spec.seed);
        spec.alpha = kv.parsed("alpha")?.unwrap_or(spec.alpha);
        spec.validate()?;
        Ok(spec)
    }
}
