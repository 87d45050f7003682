use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::config::{KernelSpec, LearnerConfig};
use super::ensemble::{fit_boosting, fit_forest, BoostParams, Boosted, Forest, ForestParams};
use super::gpr::{fit_gpr, Gpr};
use super::linear::{fit_lasso, fit_ridge, Linear};
use super::mlp::{fit_mlp, Mlp, MlpParams};
use super::svr::{fit_svr, ResolvedKernel, Svr};
use super::tree::{grow, GrowParams, Tree};
use crate::error::{schema, validation, Error, Result};
use crate::features::FeatureMatrix;
use crate::linalg::Mat;
use crate::scalar::Real;

pub const MODEL_FORMAT_VERSION: u64 = 1;

/// Learned parameters, one variant per family.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real", tag = "kind", content = "value", rename_all = "snake_case")]
pub enum Params<T> {
    Mean(T),
    Linear(Linear<T>),
    Tree(Tree<T>),
    Forest(Forest<T>),
    Boosted(Boosted<T>),
    Gpr(Gpr<T>),
    Mlp(Mlp<T>),
    Svr(Svr<T>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct TrainedModel<T> {
    pub config: LearnerConfig,
    pub schema_fingerprint: String,
    pub n_features: usize,
    /// false when an iterative solver stopped at its iteration cap
    pub converged: bool,
    pub iterations: Option<usize>,
    pub parameters: Params<T>,
}

/// How a tree ensemble combines its trees.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Aggregation {
    Mean,
    Sum,
}

/// Borrowed view of a tree-based model: `offset + agg(trees)`.
#[derive(Debug, Clone, Copy)]
pub struct TreeEnsemble<'a, T> {
    pub trees: &'a [Tree<T>],
    pub offset: T,
    pub aggregation: Aggregation,
}

impl<T: Real> TreeEnsemble<'_, T> {
    pub fn weight(&self) -> T {
        match self.aggregation {
            Aggregation::Mean => T::one() / T::from_usize_lossy(self.trees.len().max(1)),
            Aggregation::Sum => T::one(),
        }
    }
}

fn resolve_kernel<T: Real>(spec: &KernelSpec, x: &Mat<T>) -> ResolvedKernel {
    let auto = || {
        let n = x.data.len().max(1) as f64;
        let mean = x.data.iter().map(|v| v.as_f64()).sum::<f64>() / n;
        let var = x.data.iter().map(|v| (v.as_f64() - mean).powi(2)).sum::<f64>() / n;
        if var > 0.0 {
            1.0 / (x.cols as f64 * var)
        } else {
            1.0
        }
    };
    match *spec {
        KernelSpec::Linear => ResolvedKernel::Linear,
        KernelSpec::Poly { degree, gamma, coef0 } => ResolvedKernel::Poly { degree, gamma: gamma.unwrap_or_else(auto), coef0 },
        KernelSpec::Rbf { gamma } => ResolvedKernel::Rbf { gamma: gamma.unwrap_or_else(auto) },
        KernelSpec::Sigmoid { gamma, coef0 } => ResolvedKernel::Sigmoid { gamma: gamma.unwrap_or_else(auto), coef0 },
    }
}

/// Fits `config` on `x`, `y`. Deterministic for a fixed config regardless of thread count.
pub fn fit<T: Real>(config: &LearnerConfig, x: &FeatureMatrix<T>, y: &[T]) -> Result<TrainedModel<T>> {
    config.validate()?;
    if x.rows() < 2 {
        return Err(validation!("need at least 2 training rows, got {}", x.rows()));
    }
    if y.len() != x.rows() {
        return Err(validation!("{} labels for {} feature rows", y.len(), x.rows()));
    }
    if let Some(i) = y.iter().position(|v| !v.is_finite()) {
        return Err(validation!("non-finite label at row {i}"));
    }
    let m = x.values();
    let mut converged = true;
    let mut iterations = None;
    let parameters = match config {
        LearnerConfig::Mean => Params::Mean(y.iter().copied().sum::<T>() / T::from_usize_lossy(y.len())),
        LearnerConfig::Ridge { lambda } => Params::Linear(fit_ridge(m, y, T::lit(*lambda))?),
        LearnerConfig::Lasso { lambda, max_iter, tol } => {
            let f = fit_lasso(m, y, T::lit(*lambda), *max_iter, T::lit(*tol));
            converged = f.converged;
            iterations = Some(f.iterations);
            Params::Linear(f.model)
        }
        LearnerConfig::Tree { max_depth, min_samples_leaf } => {
            Params::Tree(grow(m, y, (0..m.rows).collect(), &GrowParams::cart(*max_depth, *min_samples_leaf), None))
        }
        LearnerConfig::RandomForest { n_estimators, max_depth, min_samples_leaf, max_features, seed } => {
            Params::Forest(fit_forest(
                m,
                y,
                &ForestParams {
                    n_estimators: *n_estimators,
                    max_depth: *max_depth,
                    min_samples_leaf: *min_samples_leaf,
                    max_features: *max_features,
                    seed: *seed,
                },
            ))
        }
        LearnerConfig::GradientBoosting {
            n_estimators,
            learning_rate,
            max_depth,
            min_samples_leaf,
            l1_leaf,
            l2_leaf,
            subsample,
            seed,
        } => Params::Boosted(fit_boosting(
            m,
            y,
            &BoostParams {
                n_estimators: *n_estimators,
                learning_rate: T::lit(*learning_rate),
                max_depth: *max_depth,
                min_samples_leaf: *min_samples_leaf,
                l1: T::lit(*l1_leaf),
                l2: T::lit(*l2_leaf),
                subsample: T::lit(*subsample),
                seed: *seed,
            },
        )),
        LearnerConfig::Gpr { length_scale, signal_var, noise_var } => {
            Params::Gpr(fit_gpr(m, y, T::lit(*length_scale), T::lit(*signal_var), T::lit(*noise_var))?)
        }
        LearnerConfig::Mlp { layer_sizes, alpha, learning_rate, epochs, batch_size, seed, .. } => Params::Mlp(fit_mlp(
            m,
            y,
            &MlpParams {
                layer_sizes: layer_sizes.clone(),
                alpha: T::lit(*alpha),
                learning_rate: T::lit(*learning_rate),
                epochs: *epochs,
                batch_size: *batch_size,
                seed: *seed,
            },
        )),
        LearnerConfig::Svr { c, epsilon, kernel, max_iter, tol } => {
            let f = fit_svr(m, y, T::lit(*c), T::lit(*epsilon), resolve_kernel(kernel, m), *max_iter, T::lit(*tol));
            converged = f.converged;
            iterations = Some(f.iterations);
            Params::Svr(f.model)
        }
    };
    Ok(TrainedModel {
        config: config.clone(),
        schema_fingerprint: x.fingerprint(),
        n_features: x.cols(),
        converged,
        iterations,
        parameters,
    })
}

impl<T: Real> TrainedModel<T> {
    /// Raw prediction for one row; no schema check.
    pub fn predict_row(&self, x: &[T]) -> T {
        match &self.parameters {
            Params::Mean(v) => *v,
            Params::Linear(m) => m.predict_row(x),
            Params::Tree(t) => t.predict_row(x),
            Params::Forest(f) => f.predict_row(x),
            Params::Boosted(b) => b.predict_row(x),
            Params::Gpr(g) => g.predict_row(x),
            Params::Mlp(n) => n.predict_row(x),
            Params::Svr(s) => s.predict_row(x),
        }
    }

    pub fn check_schema(&self, x: &FeatureMatrix<T>) -> Result<()> {
        if x.fingerprint() != self.schema_fingerprint {
            return Err(validation!(
                "feature schema fingerprint {} does not match the model's {}",
                &x.fingerprint()[..12],
                &self.schema_fingerprint[..self.schema_fingerprint.len().min(12)]
            ));
        }
        Ok(())
    }

    pub fn predict(&self, x: &FeatureMatrix<T>) -> Result<Vec<T>> {
        self.check_schema(x)?;
        Ok((0..x.rows()).into_par_iter().map(|i| self.predict_row(x.row(i))).collect())
    }

    /// Tree view for tree-based models.
    pub fn tree_ensemble(&self) -> Option<TreeEnsemble<'_, T>> {
        match &self.parameters {
            Params::Tree(t) => Some(TreeEnsemble {
                trees: std::slice::from_ref(t),
                offset: T::zero(),
                aggregation: Aggregation::Mean,
            }),
            Params::Forest(f) => Some(TreeEnsemble { trees: &f.trees, offset: T::zero(), aggregation: Aggregation::Mean }),
            Params::Boosted(b) => Some(TreeEnsemble { trees: &b.trees, offset: b.base, aggregation: Aggregation::Sum }),
            _ => None,
        }
    }

    pub fn to_json(&self) -> String {
        let body = serde_json::to_value(self).expect("model serializes");
        let mut out = serde_json::Map::new();
        out.insert("format_version".into(), MODEL_FORMAT_VERSION.into());
        out.insert("scalar".into(), std::any::type_name::<T>().into());
        if let serde_json::Value::Object(fields) = body {
            out.extend(fields);
        }
        serde_json::to_string(&serde_json::Value::Object(out)).expect("model serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let value: serde_json::Value =
            serde_json::from_str(s).map_err(|e| schema!("model file is not valid JSON: {e}"))?;
        let version = value
            .get("format_version")
            .and_then(serde_json::Value::as_u64)
            .ok_or_else(|| schema!("model file has no format_version"))?;
        if version > MODEL_FORMAT_VERSION {
            return Err(Error::Version { found: version, supported: MODEL_FORMAT_VERSION });
        }
        let scalar = value.get("scalar").and_then(serde_json::Value::as_str).unwrap_or("");
        if scalar != std::any::type_name::<T>() {
            return Err(schema!("model stores {scalar} parameters, expected {}", std::any::type_name::<T>()));
        }
        serde_json::from_value(value).map_err(|e| schema!("model file is malformed: {e}"))
    }
}

/// Writes the model container next to `path` and renames it into place.
pub fn save_model<T: Real>(m: &TrainedModel<T>, path: impl AsRef<Path>) -> Result<()> {
    write_atomic(path.as_ref(), m.to_json().as_bytes())
}

pub fn load_model<T: Real>(path: impl AsRef<Path>) -> Result<TrainedModel<T>> {
    let path = path.as_ref();
    let s = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    TrainedModel::from_json(&s).map_err(|e| match e {
        Error::Schema(m) => schema!("{}: {m}", path.display()),
        other => other,
    })
}

/// Writes `bytes` to a sibling `.partial` file, then renames it over `path`.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<()> {
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".partial");
    let tmp = std::path::PathBuf::from(tmp);
    std::fs::write(&tmp, bytes).map_err(|e| Error::io(&tmp, e))?;
    std::fs::rename(&tmp, path).map_err(|e| Error::io(path, e))
}
