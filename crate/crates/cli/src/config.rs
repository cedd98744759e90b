//! Declarative experiment files: `key = value` lines, `#` comments.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ConfigFile {
    values: BTreeMap<String, String>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        text.parse()
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.values.get(key).map(String::as_str)
    }

    pub fn parsed<T: FromStr>(&self, key: &str) -> Result<Option<T>>
    where
        T::Err: std::fmt::Display,
    {
        self.get(key)
            .map(|v| v.parse::<T>().map_err(|e| anyhow!("config key `{key}`: {e}")))
            .transpose()
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.values.keys().map(String::as_str)
    }
}

impl FromStr for ConfigFile {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        let mut values = BTreeMap::new();
        for (i, raw) in s.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line
                .split_once('=')
                .ok_or_else(|| anyhow!("line {}: expected `key = value`", i + 1))?;
            let k = k.trim().to_ascii_lowercase();
            if values.insert(k.clone(), v.trim().to_string()).is_some() {
                bail!("line {}: `{k}` set twice", i + 1);
            }
        }
        Ok(Self { values })
    }
}

/// `8,12,16` or an inclusive range `8..32` with optional `:step` (default 4).
pub fn parse_sizes(s: &str) -> Result<Vec<usize>> {
    if let Some((a, b)) = s.split_once("..") {
        let (b, step) = match b.split_once(':') {
            Some((b, st)) => (b, st.trim().parse()?),
            None => (b, 4),
        };
        let (a, b): (usize, usize) = (a.trim().parse()?, b.trim().parse()?);
        if step == 0 || a > b {
            bail!("bad range `{s}`");
        }
        return Ok((a..=b).step_by(step).collect());
    }
    s.split(',')
        .map(|w| w.trim().parse().map_err(|e| anyhow!("bad size `{w}`: {e}")))
        .collect()
}

/// Comma-separated list parsed element by element.
pub fn parse_list<T: FromStr>(s: &str) -> Result<Vec<T>>
where
    T::Err: std::fmt::Display,
{
    s.split(',')
        .map(|w| w.trim().parse::<T>().map_err(|e| anyhow!("bad list entry `{w}`: {e}")))
        .collect()
}

/// Accepts decimals or a fraction such as `8/7`.
pub fn parse_ratio(s: &str) -> Result<f64> {
    match s.split_once('/') {
        Some((a, b)) => {
            let (a, b): (f64, f64) = (a.trim().parse()?, b.trim().parse()?);
            Ok(a / b)
        }
        None => Ok(s.trim().parse()?),
    }
}
