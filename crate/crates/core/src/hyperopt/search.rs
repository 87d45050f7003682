use rayon::prelude::*;

use super::history::TrialHistory;
use super::space::{Config, SearchSpace};
use crate::error::{validation, Result};
use crate::rng;

pub(crate) const SAMPLE_STREAM: u64 = 0x70;

/// Every grid combination in deterministic order: unconditional parameters in
/// name order (last varies fastest), then any active conditionals.
pub fn grid_points(space: &SearchSpace, resolution: usize) -> Result<Vec<Config>> {
    space.validate()?;
    if resolution == 0 || space.params.is_empty() {
        return Err(validation!("the search grid is empty"));
    }
    let mut points = vec![Config::new()];
    for name in space.order() {
        let values = space.params[name].grid(resolution);
        let mut next = Vec::with_capacity(points.len() * values.len());
        for p in points {
            if space.is_active(name, &p) {
                for v in &values {
                    let mut q = p.clone();
                    q.insert(name.to_string(), v.clone());
                    next.push(q);
                }
            } else {
                next.push(p);
            }
        }
        points = next;
    }
    Ok(points)
}

/// Evaluates predetermined configs in parallel and appends them in order.
fn evaluate_all<F>(configs: Vec<Config>, objective: &F) -> TrialHistory
where
    F: Fn(&Config) -> Result<f64> + Sync,
{
    let outcomes: Vec<Result<f64>> = configs.par_iter().map(objective).collect();
    let mut h = TrialHistory::new();
    for (c, o) in configs.into_iter().zip(outcomes) {
        h.push(c, o);
    }
    h
}

pub fn grid_search<F>(space: &SearchSpace, objective: F, resolution: usize) -> Result<TrialHistory>
where
    F: Fn(&Config) -> Result<f64> + Sync,
{
    Ok(evaluate_all(grid_points(space, resolution)?, &objective))
}

/// The `i`-th random configuration for `seed`; independent of every other draw.
pub(crate) fn random_config(space: &SearchSpace, seed: u64, i: usize) -> Config {
    space.sample(&mut rng::stream(seed, rng::stream_id(&[SAMPLE_STREAM, i as u64])))
}

pub fn random_search<F>(space: &SearchSpace, objective: F, n_trials: usize, seed: u64) -> Result<TrialHistory>
where
    F: Fn(&Config) -> Result<f64> + Sync,
{
    space.validate()?;
    if n_trials == 0 {
        return Err(validation!("random search needs at least one trial"));
    }
    let configs = (0..n_trials).map(|i| random_config(space, seed, i)).collect();
    Ok(evaluate_all(configs, &objective))
}
