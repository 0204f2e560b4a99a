//! `key=value` experiment configs.
//!
//! Keys: scenario, a, b, a_y, b_y, alpha, beta, n_x, n_y, m_x, m_y, kind_x,
//! kind_y, replications, level, seed, interval, bayes, integral_draws. Lines
//! starting with `#` are comments. `a_y`, `b_y` default to `a`, `b`; `n_y`
//! defaults to `n_x`; `m_y` to `m_x`; the kinds to type2.

use std::collections::BTreeMap;
use std::str::FromStr;

use glfr_stress::censored::SchemeKind;
use glfr_stress::known::DEFAULT_SCALE;
use glfr_stress::sim::{CensoringDesign, EstimatorSet, ExperimentConfig, Scenario};
use glfr_stress::{Error, GlfrParams};

const KEYS: [&str; 19] = [
    "scenario",
    "a",
    "b",
    "a_y",
    "b_y",
    "alpha",
    "beta",
    "n_x",
    "n_y",
    "m_x",
    "m_y",
    "kind_x",
    "kind_y",
    "replications",
    "level",
    "seed",
    "interval",
    "bayes",
    "integral_draws",
];

fn invalid(field: &str, message: impl Into<String>) -> Error {
    Error::InvalidConfig {
        field: field.into(),
        message: message.into(),
    }
}

/// Raw key/value pairs; later entries win.
#[derive(Debug, Default, Clone)]
pub struct RawConfig {
    values: BTreeMap<String, String>,
}

impl RawConfig {
    pub fn parse(text: &str) -> Result<Self, Error> {
        let mut raw = Self::default();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            raw.set(line).map_err(|e| match e {
                Error::InvalidConfig { field, message } => invalid(&field, format!("line {}: {message}", i + 1)),
                other => other,
            })?;
        }
        Ok(raw)
    }

    pub fn set(&mut self, entry: &str) -> Result<(), Error> {
        let (k, v) = entry
            .split_once('=')
            .ok_or_else(|| invalid(entry.trim(), "expected key=value"))?;
        let key = k.trim().to_ascii_lowercase();
        if !KEYS.contains(&key.as_str()) {
            return Err(invalid(
                &key,
                format!("unknown key; expected one of {}", KEYS.join(", ")),
            ));
        }
        self.values.insert(key, v.trim().to_string());
        Ok(())
    }

    pub fn contains(&self, key: &str) -> bool {
        self.values.contains_key(key)
    }

    fn get<T: FromStr>(&self, key: &str) -> Result<Option<T>, Error>
    where
        T::Err: std::fmt::Display,
    {
        self.values
            .get(key)
            .map(|v| v.parse::<T>().map_err(|e| invalid(key, format!("`{v}`: {e}"))))
            .transpose()
    }

    fn need<T: FromStr>(&self, key: &str) -> Result<T, Error>
    where
        T::Err: std::fmt::Display,
    {
        self.get(key)?.ok_or_else(|| invalid(key, "missing"))
    }

    /// Builds and validates the experiment; `seed` applies unless the config
    /// sets one.
    pub fn build(&self, seed: u64) -> Result<ExperimentConfig, Error> {
        let scenario: Scenario = self.need("scenario")?;
        let a = self.get("a")?.unwrap_or(DEFAULT_SCALE.0);
        let b = self.get("b")?.unwrap_or(DEFAULT_SCALE.1);
        let a_y = self.get("a_y")?.unwrap_or(a);
        let b_y = self.get("b_y")?.unwrap_or(b);
        let alpha: f64 = self.need("alpha")?;
        let beta: f64 = self.need("beta")?;
        let x = GlfrParams::new(a, b, alpha).map_err(|e| invalid("alpha", e.to_string()))?;
        let y = GlfrParams::new(a_y, b_y, beta).map_err(|e| invalid("beta", e.to_string()))?;
        let n_x: usize = self.need("n_x")?;
        let n_y = self.get("n_y")?.unwrap_or(n_x);
        let mut cfg = ExperimentConfig::new(scenario, x, y, n_x, n_y, self.get("seed")?.unwrap_or(seed));
        if let Some(m_x) = self.get::<usize>("m_x")? {
            cfg.censoring = Some(CensoringDesign {
                m_x,
                m_y: self.get("m_y")?.unwrap_or(m_x),
                kind_x: self.get("kind_x")?.unwrap_or(SchemeKind::Type2),
                kind_y: self.get("kind_y")?.unwrap_or(SchemeKind::Type2),
            });
        } else if let Some(k) = ["m_y", "kind_x", "kind_y"].into_iter().find(|k| self.contains(k)) {
            return Err(invalid(k, "needs m_x"));
        }
        if let Some(r) = self.get("replications")? {
            cfg.replications = r;
        }
        if let Some(l) = self.get("level")? {
            cfg.level = l;
        }
        let d = EstimatorSet::default();
        cfg.estimators = EstimatorSet {
            interval: self.get("interval")?.unwrap_or(d.interval),
            bayes: self.get("bayes")?.unwrap_or(d.bayes),
            integral_draws: self.get("integral_draws")?.unwrap_or(d.integral_draws),
        };
        cfg.validate()?;
        Ok(cfg)
    }
}
