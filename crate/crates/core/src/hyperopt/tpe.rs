use rand::Rng as _;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::history::TrialHistory;
use super::search::random_config;
use super::space::{Config, Domain, SearchSpace};
use crate::error::{validation, Result};
use crate::learners::ParamValue;
use crate::rng::{self, Rng};

const TPE_STREAM: u64 = 0x71;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TpeOptions {
    /// fraction of completed trials treated as good
    pub gamma: f64,
    pub n_candidates: usize,
    pub n_startup: usize,
}

impl Default for TpeOptions {
    fn default() -> Self {
        TpeOptions { gamma: 0.25, n_candidates: 24, n_startup: 10 }
    }
}

/// Parzen estimator over one dimension.
#[derive(Debug, Clone)]
enum Parzen {
    /// Gaussian kernels plus a uniform prior on `[a, b]`, in sampling coordinates.
    Continuous { obs: Vec<f64>, bandwidth: f64, a: f64, b: f64 },
    /// Add-one smoothed level frequencies.
    Categorical { weights: Vec<f64> },
}

/// Sampling coordinates: log for log-uniform, the integer itself otherwise.
fn to_coord(d: &Domain, v: &ParamValue) -> f64 {
    match d.base() {
        Domain::FloatLoguniform { .. } => v.as_f64().unwrap_or(f64::NAN).ln(),
        _ => v.as_f64().unwrap_or(f64::NAN),
    }
}

fn bounds(d: &Domain) -> (f64, f64) {
    match d.base() {
        Domain::IntUniform { lo, hi } => (*lo as f64 - 0.5, *hi as f64 + 0.5),
        Domain::FloatLoguniform { lo, hi } => (lo.ln(), hi.ln()),
        _ => unreachable!("categorical domains have no bounds"),
    }
}

impl Parzen {
    fn fit(d: &Domain, values: &[&ParamValue]) -> Parzen {
        if let Domain::Categorical { levels } = d.base() {
            let n = values.len() as f64;
            let k = levels.len() as f64;
            let weights = levels
                .iter()
                .map(|l| (values.iter().filter(|v| **v == l).count() as f64 + 1.0) / (n + k))
                .collect();
            return Parzen::Categorical { weights };
        }
        let (a, b) = bounds(d);
        let obs: Vec<f64> = values.iter().map(|v| to_coord(d, v)).collect();
        let n = obs.len().max(1) as f64;
        let mean = obs.iter().sum::<f64>() / n;
        let sigma = (obs.iter().map(|o| (o - mean).powi(2)).sum::<f64>() / n).sqrt();
        let bandwidth = (sigma * n.powf(-0.2)).max(0.01 * (b - a));
        Parzen::Continuous { obs, bandwidth, a, b }
    }

    fn log_pdf(&self, x: f64) -> f64 {
        match self {
            Parzen::Continuous { obs, bandwidth, a, b } => {
                let norm = 1.0 / (bandwidth * (2.0 * std::f64::consts::PI).sqrt());
                let kernels: f64 =
                    obs.iter().map(|o| norm * (-0.5 * ((x - o) / bandwidth).powi(2)).exp()).sum();
                ((1.0 / (b - a) + kernels) / (obs.len() as f64 + 1.0)).ln()
            }
            Parzen::Categorical { weights } => weights[x as usize].ln(),
        }
    }

    /// Draws a coordinate (a level index for categoricals).
    fn sample(&self, r: &mut Rng) -> f64 {
        match self {
            Parzen::Continuous { obs, bandwidth, a, b } => {
                let k = r.random_range(0..=obs.len());
                if k == obs.len() {
                    return r.random_range(*a..*b);
                }
                let normal = Normal::new(obs[k], *bandwidth).expect("bandwidth is positive");
                for _ in 0..64 {
                    let x = normal.sample(r);
                    if x >= *a && x < *b {
                        return x;
                    }
                }
                obs[k].clamp(*a, *b)
            }
            Parzen::Categorical { weights } => {
                let u: f64 = r.random();
                let mut acc = 0.0;
                for (i, w) in weights.iter().enumerate() {
                    acc += w;
                    if u < acc {
                        return i as f64;
                    }
                }
                (weights.len() - 1) as f64
            }
        }
    }
}

fn from_coord(d: &Domain, x: f64) -> ParamValue {
    match d.base() {
        Domain::IntUniform { lo, hi } => ParamValue::Int((x.round() as i64).clamp(*lo, *hi)),
        Domain::FloatLoguniform { lo, hi } => ParamValue::Float(x.exp().clamp(*lo, *hi)),
        Domain::Categorical { levels } => levels[x as usize].clone(),
        Domain::Conditional { .. } => unreachable!("base strips conditionals"),
    }
}

fn coord_of(d: &Domain, v: &ParamValue) -> f64 {
    match d.base() {
        Domain::Categorical { levels } => levels.iter().position(|l| l == v).unwrap_or(0) as f64,
        _ => to_coord(d, v),
    }
}

fn values_of<'a>(set: &[(&'a Config, f64)], name: &str, d: &Domain) -> Vec<&'a ParamValue> {
    set.iter().filter_map(|(c, _)| c.get(name)).filter(|v| d.contains(v)).collect()
}

/// Good/bad estimators per parameter, from the completed trials.
fn fit_models(space: &SearchSpace, history: &TrialHistory, gamma: f64) -> Vec<(String, Parzen, Parzen)> {
    let mut done: Vec<(&Config, f64)> = history.completed().collect();
    // stable: equal objectives keep trial order
    done.sort_by(|a, b| b.1.total_cmp(&a.1));
    let n_good = ((gamma * done.len() as f64).ceil() as usize).clamp(1, done.len().max(1));
    let (good, bad) = done.split_at(n_good.min(done.len()));
    space
        .order()
        .into_iter()
        .map(|name| {
            let d = &space.params[name];
            let g = values_of(good, name, d);
            let b = values_of(bad, name, d);
            (name.to_string(), Parzen::fit(d, &g), Parzen::fit(d, &b))
        })
        .collect()
}

/// Draws candidates from the good density and keeps the one maximizing l(x)/g(x).
fn propose(space: &SearchSpace, history: &TrialHistory, opts: &TpeOptions, r: &mut Rng) -> Config {
    let models = fit_models(space, history, opts.gamma);
    let mut best: Option<(f64, Config)> = None;
    for _ in 0..opts.n_candidates.max(1) {
        let mut c = Config::new();
        let mut score = 0.0;
        for (name, l, g) in &models {
            if !space.is_active(name, &c) {
                continue;
            }
            let d = &space.params[name];
            let v = from_coord(d, l.sample(r));
            let x = coord_of(d, &v);
            score += l.log_pdf(x) - g.log_pdf(x);
            c.insert(name.clone(), v);
        }
        if best.as_ref().is_none_or(|(s, _)| score > *s) {
            best = Some((score, c));
        }
    }
    best.expect("at least one candidate").1
}

/// Sequential TPE: `n_startup` random trials, then model-guided proposals.
/// Failed trials are kept in the history but excluded from the densities.
pub fn tpe_search<F>(space: &SearchSpace, mut objective: F, n_trials: usize, seed: u64, opts: TpeOptions) -> Result<TrialHistory>
where
    F: FnMut(&Config) -> Result<f64>,
{
    space.validate()?;
    if space.params.is_empty() {
        return Err(validation!("the search space is empty"));
    }
    if n_trials <= opts.n_startup {
        return Err(validation!("TPE needs more trials ({n_trials}) than startup trials ({})", opts.n_startup));
    }
    if !(opts.gamma > 0.0 && opts.gamma < 1.0) {
        return Err(validation!("gamma must lie in (0, 1), got {}", opts.gamma));
    }
    let mut h = TrialHistory::new();
    for i in 0..n_trials {
        let c = if i < opts.n_startup || h.completed().next().is_none() {
            random_config(space, seed, i)
        } else {
            propose(space, &h, &opts, &mut rng::stream(seed, rng::stream_id(&[TPE_STREAM, i as u64])))
        };
        debug_assert!(space.admits(&c));
        let outcome = objective(&c);
        h.push(c, outcome);
    }
    Ok(h)
}
