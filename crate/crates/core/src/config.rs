//! Experiment configuration.
//!
//! The text format is one `key = value` pair per line. `#` starts a comment,
//! blank lines are ignored and keys are case-sensitive:
//!
//! ```text
//! # MFPL against fair coins
//! algorithm = mfpl
//! adversary = iid_bernoulli
//! T = 10000
//! n = 10
//! epsilon = 0.01
//! replications = 1000
//! seed = 7
//! ```
//!
//! `algorithm`, `adversary`, `T` and `n` are required; `replications`
//! defaults to 1 and `seed` to 0. `S`, `c` and `delta` are typed here; every
//! other key is kept as a raw algorithm or adversary parameter and checked by
//! the registry.

use std::collections::BTreeMap;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GameConfig {
    pub algorithm: String,
    pub adversary: String,
    #[serde(rename = "T")]
    pub horizon: usize,
    #[serde(rename = "n")]
    pub actions: usize,
    #[serde(rename = "S")]
    pub budget: Option<usize>,
    pub c: Option<f64>,
    pub delta: Option<f64>,
    pub replications: usize,
    pub seed: u64,
    pub params: BTreeMap<String, String>,
}

fn parse_value<T: FromStr>(key: &str, value: &str) -> Result<T> {
    value
        .parse()
        .map_err(|_| Error::config(key, format!("cannot parse `{value}`")))
}

impl GameConfig {
    pub fn new(algorithm: &str, adversary: &str, horizon: usize, actions: usize) -> Self {
        GameConfig {
            algorithm: algorithm.to_string(),
            adversary: adversary.to_string(),
            horizon,
            actions,
            budget: None,
            c: None,
            delta: None,
            replications: 1,
            seed: 0,
            params: BTreeMap::new(),
        }
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut pairs: BTreeMap<String, String> = BTreeMap::new();
        for (k, raw) in text.lines().enumerate() {
            let line = match raw.find('#') {
                Some(i) => &raw[..i],
                None => raw,
            }
            .trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("line {}: expected `key = value`", k + 1)))?;
            let (key, value) = (key.trim(), value.trim());
            if key.is_empty() {
                return Err(Error::Parse(format!("line {}: empty key", k + 1)));
            }
            if value.is_empty() {
                return Err(Error::config(key, "empty value"));
            }
            if pairs.insert(key.to_string(), value.to_string()).is_some() {
                return Err(Error::config(key, "given more than once"));
            }
        }
        Self::from_pairs(pairs)
    }

    pub fn from_pairs(mut pairs: BTreeMap<String, String>) -> Result<Self> {
        let mut take = |key: &str| {
            pairs
                .remove(key)
                .ok_or_else(|| Error::config(key, "missing required key"))
        };
        let algorithm = take("algorithm")?;
        let adversary = take("adversary")?;
        let horizon = parse_value("T", &take("T")?)?;
        let actions = parse_value("n", &take("n")?)?;
        let mut cfg = GameConfig::new(&algorithm, &adversary, horizon, actions);
        for (key, value) in pairs {
            cfg.set(&key, &value)?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    /// Sets one key from its text form; used for overrides and sweeps.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        match key {
            "algorithm" => self.algorithm = value.to_string(),
            "adversary" => self.adversary = value.to_string(),
            "T" => self.horizon = parse_value(key, value)?,
            "n" => self.actions = parse_value(key, value)?,
            "S" => self.budget = Some(parse_value(key, value)?),
            "c" => self.c = Some(parse_value(key, value)?),
            "delta" => self.delta = Some(parse_value(key, value)?),
            "replications" => self.replications = parse_value(key, value)?,
            "seed" => self.seed = parse_value(key, value)?,
            _ => {
                self.params.insert(key.to_string(), value.to_string());
            }
        }
        Ok(())
    }

    /// Checks the constraints that do not depend on the chosen algorithm.
    pub fn validate(&self) -> Result<()> {
        if self.horizon == 0 {
            return Err(Error::config("T", "must be >= 1"));
        }
        if self.actions == 0 {
            return Err(Error::config("n", "must be >= 1"));
        }
        if self.replications == 0 {
            return Err(Error::config("replications", "must be >= 1"));
        }
        if let Some(s) = self.budget {
            if s > self.horizon {
                return Err(Error::config("S", format!("{s} exceeds T = {}", self.horizon)));
            }
        }
        if let Some(c) = self.c {
            if !(c >= 1.0) {
                return Err(Error::config("c", format!("switching cost must be >= 1, got {c}")));
            }
        }
        if let Some(d) = self.delta {
            if !(d > 0.0 && d < 0.5) {
                return Err(Error::config("delta", format!("must lie in (0, 1/2), got {d}")));
            }
        }
        Ok(())
    }

    /// Optional extra parameter.
    pub fn param<T: FromStr>(&self, key: &str) -> Result<Option<T>> {
        self.params
            .get(key)
            .map(|v| parse_value(key, v))
            .transpose()
    }

    /// Required extra parameter.
    pub fn require<T: FromStr>(&self, key: &str) -> Result<T> {
        self.param(key)?
            .ok_or_else(|| Error::config(key, "missing required key"))
    }

    pub fn require_budget(&self) -> Result<usize> {
        self.budget.ok_or_else(|| Error::config("S", "missing required key"))
    }

    pub fn require_cost(&self) -> Result<f64> {
        self.c.ok_or_else(|| Error::config("c", "missing required key"))
    }

    pub fn require_delta(&self) -> Result<f64> {
        self.delta.ok_or_else(|| Error::config("delta", "missing required key"))
    }

    /// Comma-separated list parameter.
    pub fn list(&self, key: &str) -> Result<Vec<f64>> {
        match self.params.get(key) {
            None => Ok(Vec::new()),
            Some(v) => v.split(',').map(|x| parse_value(key, x.trim())).collect(),
        }
    }

    /// Every key present, typed or not.
    pub fn keys(&self) -> Vec<String> {
        let mut keys: Vec<String> = ["algorithm", "adversary", "T", "n", "replications", "seed"]
            .iter()
            .map(|s| s.to_string())
            .collect();
        if self.budget.is_some() {
            keys.push("S".into());
        }
        if self.c.is_some() {
            keys.push("c".into());
        }
        if self.delta.is_some() {
            keys.push("delta".into());
        }
        keys.extend(self.params.keys().cloned());
        keys
    }

    /// Canonical text form; parses back to an equal config.
    pub fn to_text(&self) -> String {
        let mut out = format!(
            "algorithm = {}\nadversary = {}\nT = {}\nn = {}\n",
            self.algorithm, self.adversary, self.horizon, self.actions
        );
        if let Some(s) = self.budget {
            out.push_str(&format!("S = {s}\n"));
        }
        if let Some(c) = self.c {
            out.push_str(&format!("c = {c}\n"));
        }
        if let Some(d) = self.delta {
            out.push_str(&format!("delta = {d}\n"));
        }
        out.push_str(&format!("replications = {}\nseed = {}\n", self.replications, self.seed));
        for (k, v) in &self.params {
            out.push_str(&format!("{k} = {v}\n"));
        }
        out
    }
}
