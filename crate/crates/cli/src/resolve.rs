//! Turns string-valued settings into typed library inputs, writing the defaults
//! back so reports carry the resolved values.

use std::path::Path;

use mamprop::data::{LabelKind, NumericField};
use mamprop::features::{FeaturizationPlan, Scheme};
use mamprop::hyperopt::{apply, Config};
use mamprop::learners::{LearnerConfig, ModelFamily, ParamValue};
use serde::{Deserialize, Serialize};

use crate::fail::{CliError, CliResult};
use crate::session::FORMAT_VERSION;
use crate::settings::ModelOpts;

pub const DEFAULT_K: usize = 5;

pub fn label(s: &str) -> CliResult<LabelKind> {
    LabelKind::parse(s).ok_or_else(|| {
        let known: Vec<&str> = LabelKind::ALL.iter().map(|l| l.as_str()).collect();
        CliError::validation(format!("unknown task '{s}'; expected one of {}", known.join(", ")))
    })
}

pub fn family(s: &str) -> CliResult<ModelFamily> {
    ModelFamily::parse(s).ok_or_else(|| {
        let known: Vec<&str> = ModelFamily::ALL.iter().map(|f| f.as_str()).collect();
        CliError::validation(format!("unknown model '{s}'; expected one of {}", known.join(", ")))
    })
}

pub fn numeric_field(s: &str) -> CliResult<NumericField> {
    let key = s.trim().to_ascii_lowercase();
    NumericField::ALL
        .into_iter()
        .find(|f| f.name() == key)
        .ok_or_else(|| CliError::validation(format!("unknown process column '{s}'")))
}

/// `name=value`; integers and floats are recognised, anything else is categorical.
pub fn param_assignment(s: &str) -> CliResult<(String, ParamValue)> {
    let (name, value) = s
        .split_once('=')
        .ok_or_else(|| CliError::validation(format!("hyperparameter override '{s}' is not NAME=VALUE")))?;
    let value = value.trim();
    let v = if let Ok(i) = value.parse::<i64>() {
        ParamValue::Int(i)
    } else if let Ok(f) = value.parse::<f64>() {
        ParamValue::Float(f)
    } else {
        ParamValue::Cat(value.to_string())
    };
    Ok((name.trim().to_string(), v))
}

/// Best configuration found by `tune`, reusable by `cv` and `train`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ParamsFile {
    pub format_version: u64,
    pub task: LabelKind,
    pub model: ModelFamily,
    pub config: Config,
    pub objective: f64,
}

pub fn read_params(path: &Path) -> CliResult<ParamsFile> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let value: serde_json::Value = serde_json::from_str(&text)
        .map_err(|e| CliError::schema(format!("{}: not valid JSON: {e}", path.display())))?;
    let version = value.get("format_version").and_then(serde_json::Value::as_u64).unwrap_or(0);
    if version == 0 || version > FORMAT_VERSION {
        return Err(CliError::schema(format!(
            "{}: format_version {version} is not supported (this build reads up to {FORMAT_VERSION})",
            path.display()
        )));
    }
    serde_json::from_value(value).map_err(|e| CliError::schema(format!("{}: {e}", path.display())))
}

/// Typed form of [`ModelOpts`].
#[derive(Debug, Clone)]
pub struct ModelChoice {
    pub task: LabelKind,
    pub family: ModelFamily,
    pub config: LearnerConfig,
    pub plan: FeaturizationPlan,
    pub k: usize,
}

impl ModelChoice {
    /// Resolves `opts` in place; the learner seed follows the run seed.
    pub fn resolve(opts: &mut ModelOpts, seed: u64) -> CliResult<Self> {
        let task = label(opts.task.as_deref().ok_or_else(|| CliError::validation("--task is required"))?)?;
        opts.task = Some(task.as_str().to_string());
        let family = family(opts.model.get_or_insert_with(|| "rf".into()))?;
        opts.model = Some(family.as_str().to_string());
        let scheme_name = opts.featurization.get_or_insert_with(|| Scheme::Baseline.as_str().into());
        let scheme = Scheme::parse(scheme_name)
            .ok_or_else(|| CliError::validation(format!("unknown featurization '{scheme_name}'")))?;
        opts.featurization = Some(scheme.as_str().to_string());
        let mut plan = FeaturizationPlan::new(scheme);
        for name in opts.extra.get_or_insert_with(Vec::new).iter() {
            plan = plan.with_extra(numeric_field(name)?);
        }
        plan.standardize_onehot = *opts.standardize_onehot.get_or_insert(false);

        let mut config = family.default_config().with_seed(seed);
        if let Some(path) = &opts.params {
            let p = read_params(path)?;
            if p.model != family {
                return Err(CliError::validation(format!(
                    "{} holds {} hyperparameters but the model is {family}",
                    path.display(),
                    p.model
                )));
            }
            config = apply(&config, &p.config)?;
        }
        let mut overrides = Config::new();
        for s in opts.set.get_or_insert_with(Vec::new).iter() {
            let (name, v) = param_assignment(s)?;
            overrides.insert(name, v);
        }
        if !overrides.is_empty() {
            config = apply(&config, &overrides)?;
        }
        config.validate()?;

        let k = *opts.k.get_or_insert(DEFAULT_K);
        if k < 2 {
            return Err(CliError::validation(format!("k must be at least 2, got {k}")));
        }
        Ok(ModelChoice { task, family, config, plan, k })
    }

    pub fn stem(&self, prefix: &str) -> String {
        format!("{prefix}_{}_{}", self.task.as_str(), self.family.as_str())
    }
}

/// Display name used in aggregated tables.
pub fn family_title(f: ModelFamily) -> &'static str {
    match f {
        ModelFamily::Mean => "Mean predictor",
        ModelFamily::Ridge => "Ridge linear regression",
        ModelFamily::Lasso => "Lasso linear regression",
        ModelFamily::Tree => "Decision tree",
        ModelFamily::RandomForest => "Random forests",
        ModelFamily::GradientBoosting => "Gradient Boosting",
        ModelFamily::Xgboost => "XGBoost",
        ModelFamily::Gpr => "Gaussian process regression",
        ModelFamily::Mlp => "Neural network",
        ModelFamily::Svr => "Support vector regression",
    }
}
