use serde::{Deserialize, Serialize};

use super::space::Config;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", content = "message", rename_all = "snake_case")]
pub enum TrialStatus {
    Ok,
    Failed(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Trial {
    pub index: usize,
    pub config: Config,
    pub objective: Option<f64>,
    pub status: TrialStatus,
}

/// Append-only record of trials; `best` is the earliest trial attaining the maximum.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct TrialHistory {
    trials: Vec<Trial>,
    best: Option<usize>,
}

impl TrialHistory {
    pub fn new() -> Self {
        Self::default()
    }

    /// Records an outcome; non-finite objectives count as failures.
    pub fn push(&mut self, config: Config, outcome: crate::Result<f64>) {
        let index = self.trials.len();
        let (objective, status) = match outcome {
            Ok(v) if v.is_finite() => (Some(v), TrialStatus::Ok),
            Ok(v) => (None, TrialStatus::Failed(format!("objective is {v}"))),
            Err(e) => (None, TrialStatus::Failed(e.to_string())),
        };
        if let Some(v) = objective {
            if self.best().and_then(|b| b.objective).is_none_or(|b| v > b) {
                self.best = Some(index);
            }
        }
        self.trials.push(Trial { index, config, objective, status });
    }

    pub fn trials(&self) -> &[Trial] {
        &self.trials
    }

    pub fn len(&self) -> usize {
        self.trials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.trials.is_empty()
    }

    pub fn best(&self) -> Option<&Trial> {
        self.best.map(|i| &self.trials[i])
    }

    pub fn completed(&self) -> impl Iterator<Item = (&Config, f64)> {
        self.trials.iter().filter_map(|t| t.objective.map(|v| (&t.config, v)))
    }
}
