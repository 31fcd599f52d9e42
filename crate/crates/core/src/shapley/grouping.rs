use std::collections::HashMap;
use std::path::Path;

use crate::error::{Error, Result};

/// Partition of the feature indices `[0, n_features)` into named groups.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureGrouping {
    names: Vec<String>,
    members: Vec<Vec<usize>>,
    group_of: Vec<usize>,
}

impl FeatureGrouping {
    pub fn new(groups: Vec<(String, Vec<usize>)>, n_features: usize) -> Result<Self> {
        if groups.is_empty() {
            return Err(Error::InvalidGrouping("at least one group is required".into()));
        }
        let mut group_of = vec![usize::MAX; n_features];
        let mut names = Vec::with_capacity(groups.len());
        let mut members = Vec::with_capacity(groups.len());
        for (g, (name, feats)) in groups.into_iter().enumerate() {
            if feats.is_empty() {
                return Err(Error::InvalidGrouping(format!("group '{name}' is empty")));
            }
            if names.contains(&name) {
                return Err(Error::InvalidGrouping(format!("group name '{name}' is repeated")));
            }
            for &f in &feats {
                if f >= n_features {
                    return Err(Error::InvalidGrouping(format!(
                        "group '{name}' names feature {f} outside [0, {n_features})"
                    )));
                }
                if group_of[f] != usize::MAX {
                    return Err(Error::InvalidGrouping(format!(
                        "feature {f} appears in both '{}' and '{name}'",
                        names[group_of[f]]
                    )));
                }
                group_of[f] = g;
            }
            names.push(name);
            members.push(feats);
        }
        if let Some(f) = group_of.iter().position(|&g| g == usize::MAX) {
            return Err(Error::InvalidGrouping(format!("feature {f} belongs to no group")));
        }
        Ok(FeatureGrouping {
            names,
            members,
            group_of,
        })
    }

    /// One group per feature, named after the feature.
    pub fn singletons(feature_names: &[String]) -> Self {
        FeatureGrouping {
            names: feature_names.to_vec(),
            members: (0..feature_names.len()).map(|f| vec![f]).collect(),
            group_of: (0..feature_names.len()).collect(),
        }
    }

    /// Parses `name: feature, feature, ...` lines, resolving feature names
    /// against `columns`. Blank lines and `#` comments are ignored.
    pub fn parse(text: &str, columns: &[String]) -> Result<Self> {
        let index: HashMap<&str, usize> = columns.iter().enumerate().map(|(i, c)| (c.as_str(), i)).collect();
        let mut groups = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (name, rest) = line.split_once(':').ok_or_else(|| {
                Error::InvalidGrouping(format!("line {}: expected 'name: feature, ...'", lineno + 1))
            })?;
            let feats = rest
                .split(',')
                .map(str::trim)
                .filter(|s| !s.is_empty())
                .map(|f| {
                    index.get(f).copied().ok_or_else(|| {
                        Error::InvalidGrouping(format!("line {}: unknown feature '{f}'", lineno + 1))
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            groups.push((name.trim().to_owned(), feats));
        }
        Self::new(groups, columns.len())
    }

    pub fn from_file(path: impl AsRef<Path>, columns: &[String]) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text, columns)
    }

    pub fn to_text(&self, columns: &[String]) -> String {
        self.names
            .iter()
            .zip(&self.members)
            .map(|(n, m)| {
                let feats: Vec<&str> = m.iter().map(|&f| columns[f].as_str()).collect();
                format!("{n}: {}\n", feats.join(", "))
            })
            .collect()
    }

    pub fn n_groups(&self) -> usize {
        self.names.len()
    }

    pub fn n_features(&self) -> usize {
        self.group_of.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn members(&self) -> &[Vec<usize>] {
        &self.members
    }

    pub fn group_of(&self, feature: usize) -> usize {
        self.group_of[feature]
    }
}
