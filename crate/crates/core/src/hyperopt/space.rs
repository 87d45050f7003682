use std::collections::BTreeMap;

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use crate::error::{validation, Result};
use crate::learners::{LearnerConfig, ParamValue};
use crate::rng::Rng;

/// One assignment of hyperparameter values.
pub type Config = BTreeMap<String, ParamValue>;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Domain {
    IntUniform { lo: i64, hi: i64 },
    FloatLoguniform { lo: f64, hi: f64 },
    Categorical { levels: Vec<ParamValue> },
    /// `domain` is active only when `parent` takes `level`.
    Conditional { parent: String, level: ParamValue, domain: Box<Domain> },
}

impl Domain {
    /// The sampling domain with any conditional wrapper removed.
    pub fn base(&self) -> &Domain {
        match self {
            Domain::Conditional { domain, .. } => domain.base(),
            d => d,
        }
    }

    fn validate(&self, name: &str) -> Result<()> {
        match self {
            Domain::IntUniform { lo, hi } if lo >= hi => Err(validation!("{name}: empty integer range [{lo}, {hi}]")),
            Domain::FloatLoguniform { lo, hi } if !(*lo > 0.0 && lo < hi && hi.is_finite()) => {
                Err(validation!("{name}: log-uniform range needs 0 < lo < hi, got [{lo}, {hi}]"))
            }
            Domain::Categorical { levels } if levels.is_empty() => Err(validation!("{name}: no categorical levels")),
            Domain::Conditional { domain, .. } if matches!(**domain, Domain::Conditional { .. }) => {
                Err(validation!("{name}: nested conditionals are not supported"))
            }
            Domain::Conditional { domain, .. } => domain.validate(name),
            _ => Ok(()),
        }
    }

    /// Draws one value; integers are drawn continuously and rounded.
    pub fn sample(&self, r: &mut Rng) -> ParamValue {
        match self.base() {
            Domain::IntUniform { lo, hi } => {
                let u: f64 = r.random_range(*lo as f64 - 0.5..*hi as f64 + 0.5);
                ParamValue::Int((u.round() as i64).clamp(*lo, *hi))
            }
            Domain::FloatLoguniform { lo, hi } => {
                let u: f64 = r.random_range(lo.ln()..hi.ln());
                ParamValue::Float(u.exp().clamp(*lo, *hi))
            }
            Domain::Categorical { levels } => levels[r.random_range(0..levels.len())].clone(),
            Domain::Conditional { .. } => unreachable!("base strips conditionals"),
        }
    }

    pub fn contains(&self, v: &ParamValue) -> bool {
        match (self.base(), v) {
            (Domain::IntUniform { lo, hi }, ParamValue::Int(i)) => lo <= i && i <= hi,
            (Domain::FloatLoguniform { lo, hi }, ParamValue::Float(f)) => lo <= f && f <= hi,
            (Domain::Categorical { levels }, v) => levels.contains(v),
            _ => false,
        }
    }

    /// Grid points: all integers or `resolution` evenly spaced ones, geometric
    /// spacing for log domains, every categorical level.
    pub fn grid(&self, resolution: usize) -> Vec<ParamValue> {
        match self.base() {
            Domain::IntUniform { lo, hi } => {
                let span = (hi - lo) as usize + 1;
                if span <= resolution {
                    (*lo..=*hi).map(ParamValue::Int).collect()
                } else if resolution == 1 {
                    vec![ParamValue::Int(lo + (hi - lo) / 2)]
                } else {
                    let mut out: Vec<i64> = (0..resolution)
                        .map(|i| lo + ((hi - lo) as f64 * i as f64 / (resolution - 1) as f64).round() as i64)
                        .collect();
                    out.dedup();
                    out.into_iter().map(ParamValue::Int).collect()
                }
            }
            Domain::FloatLoguniform { lo, hi } => {
                if resolution == 1 {
                    return vec![ParamValue::Float((lo * hi).sqrt())];
                }
                (0..resolution)
                    .map(|i| {
                        let t = i as f64 / (resolution - 1) as f64;
                        ParamValue::Float((lo.ln() + t * (hi.ln() - lo.ln())).exp().clamp(*lo, *hi))
                    })
                    .collect()
            }
            Domain::Categorical { levels } => levels.clone(),
            Domain::Conditional { .. } => unreachable!("base strips conditionals"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct SearchSpace {
    pub params: BTreeMap<String, Domain>,
}

impl SearchSpace {
    pub fn new(params: impl IntoIterator<Item = (String, Domain)>) -> Result<Self> {
        let s = SearchSpace { params: params.into_iter().collect() };
        s.validate()?;
        Ok(s)
    }

    pub fn validate(&self) -> Result<()> {
        for (name, d) in &self.params {
            d.validate(name)?;
            if let Domain::Conditional { parent, level, .. } = d {
                match self.params.get(parent) {
                    None => return Err(validation!("{name}: conditional parent '{parent}' is not in the space")),
                    Some(Domain::Conditional { .. }) => {
                        return Err(validation!("{name}: conditional parent '{parent}' is itself conditional"))
                    }
                    Some(p) if !p.contains(level) => {
                        return Err(validation!("{name}: parent '{parent}' never takes level {level}"))
                    }
                    Some(_) => {}
                }
            }
        }
        Ok(())
    }

    /// Unconditional parameters first, then conditionals, each in name order.
    pub fn order(&self) -> Vec<&str> {
        let (mut plain, mut cond): (Vec<&str>, Vec<&str>) = (Vec::new(), Vec::new());
        for (name, d) in &self.params {
            if matches!(d, Domain::Conditional { .. }) {
                cond.push(name);
            } else {
                plain.push(name);
            }
        }
        plain.extend(cond);
        plain
    }

    /// Whether `name` is active given the values already chosen in `partial`.
    pub fn is_active(&self, name: &str, partial: &Config) -> bool {
        match self.params.get(name) {
            Some(Domain::Conditional { parent, level, .. }) => partial.get(parent) == Some(level),
            Some(_) => true,
            None => false,
        }
    }

    pub fn sample(&self, r: &mut Rng) -> Config {
        let mut c = Config::new();
        for name in self.order() {
            if self.is_active(name, &c) {
                let v = self.params[name].sample(r);
                c.insert(name.to_string(), v);
            }
        }
        c
    }

    /// Whether `c` assigns exactly the active parameters, each inside its domain.
    pub fn admits(&self, c: &Config) -> bool {
        c.keys().all(|k| self.params.contains_key(k))
            && self.params.iter().all(|(name, d)| match c.get(name) {
                Some(v) => self.is_active(name, c) && d.contains(v),
                None => !self.is_active(name, c),
            })
    }
}

/// Applies a search-space assignment on top of `base`.
pub fn apply(base: &LearnerConfig, c: &Config) -> Result<LearnerConfig> {
    let mut cfg = base.clone();
    // kernel must be set before degree, which only exists on the poly kernel
    let mut keys: Vec<&String> = c.keys().collect();
    keys.sort_by_key(|k| (k.as_str() == "degree", k.as_str()));
    for k in keys {
        cfg.set(k, &c[k])?;
    }
    cfg.validate()?;
    Ok(cfg)
}
