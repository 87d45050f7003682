use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{validation, Result};

/// A hyperparameter value as produced by a search space.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ParamValue {
    Int(i64),
    Float(f64),
    Cat(String),
}

impl ParamValue {
    pub fn as_f64(&self) -> Option<f64> {
        match self {
            ParamValue::Int(i) => Some(*i as f64),
            ParamValue::Float(f) => Some(*f),
            ParamValue::Cat(_) => None,
        }
    }

    pub fn as_count(&self) -> Option<usize> {
        match self {
            ParamValue::Int(i) if *i >= 0 => Some(*i as usize),
            ParamValue::Float(f) if *f >= 0.0 && f.fract() == 0.0 => Some(*f as usize),
            _ => None,
        }
    }

    pub fn as_str(&self) -> Option<&str> {
        match self {
            ParamValue::Cat(s) => Some(s),
            _ => None,
        }
    }
}

impl fmt::Display for ParamValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParamValue::Int(i) => write!(f, "{i}"),
            ParamValue::Float(v) => write!(f, "{v}"),
            ParamValue::Cat(s) => f.write_str(s),
        }
    }
}

/// SVR kernel; unset gammas resolve to `1 / (n_features · var(X))` at fit time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum KernelSpec {
    Linear,
    Poly {
        degree: u32,
        #[serde(default)]
        gamma: Option<f64>,
        #[serde(default)]
        coef0: f64,
    },
    Rbf {
        #[serde(default)]
        gamma: Option<f64>,
    },
    Sigmoid {
        #[serde(default)]
        gamma: Option<f64>,
        #[serde(default)]
        coef0: f64,
    },
}

impl KernelSpec {
    pub fn name(&self) -> &'static str {
        match self {
            KernelSpec::Linear => "linear",
            KernelSpec::Poly { .. } => "poly",
            KernelSpec::Rbf { .. } => "rbf",
            KernelSpec::Sigmoid { .. } => "sigmoid",
        }
    }

    fn gamma(&self) -> Option<f64> {
        match self {
            KernelSpec::Linear => None,
            KernelSpec::Poly { gamma, .. } | KernelSpec::Rbf { gamma } | KernelSpec::Sigmoid { gamma, .. } => *gamma,
        }
    }

    fn coef0(&self) -> f64 {
        match self {
            KernelSpec::Poly { coef0, .. } | KernelSpec::Sigmoid { coef0, .. } => *coef0,
            _ => 0.0,
        }
    }

    /// Switches kernel type, carrying gamma and coef0 over where they apply.
    pub fn with_name(&self, name: &str) -> Option<KernelSpec> {
        let (gamma, coef0) = (self.gamma(), self.coef0());
        let degree = match self {
            KernelSpec::Poly { degree, .. } => *degree,
            _ => 3,
        };
        Some(match name.to_ascii_lowercase().as_str() {
            "linear" => KernelSpec::Linear,
            "poly" | "polynomial" => KernelSpec::Poly { degree, gamma, coef0 },
            "rbf" | "gaussian" => KernelSpec::Rbf { gamma },
            "sigmoid" => KernelSpec::Sigmoid { gamma, coef0 },
            _ => return None,
        })
    }
}

/// Hidden-layer nonlinearity of the network.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Activation {
    #[default]
    Softplus,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum LearnerConfig {
    /// Predicts the training mean.
    Mean,
    Ridge {
        lambda: f64,
    },
    Lasso {
        lambda: f64,
        max_iter: usize,
        tol: f64,
    },
    Tree {
        max_depth: Option<usize>,
        min_samples_leaf: usize,
    },
    RandomForest {
        n_estimators: usize,
        max_depth: Option<usize>,
        min_samples_leaf: usize,
        /// features examined per split; all when unset
        max_features: Option<usize>,
        seed: u64,
    },
    GradientBoosting {
        n_estimators: usize,
        learning_rate: f64,
        max_depth: usize,
        #[serde(default = "one")]
        min_samples_leaf: usize,
        l1_leaf: f64,
        l2_leaf: f64,
        #[serde(default = "unit")]
        subsample: f64,
        seed: u64,
    },
    Gpr {
        length_scale: f64,
        signal_var: f64,
        noise_var: f64,
    },
    Mlp {
        layer_sizes: Vec<usize>,
        alpha: f64,
        learning_rate: f64,
        epochs: usize,
        batch_size: usize,
        seed: u64,
        #[serde(default)]
        activation: Activation,
    },
    Svr {
        c: f64,
        epsilon: f64,
        kernel: KernelSpec,
        max_iter: usize,
        tol: f64,
    },
}

fn one() -> usize {
    1
}

fn unit() -> f64 {
    1.0
}

/// Model families addressable from the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelFamily {
    Mean,
    Ridge,
    Lasso,
    Tree,
    RandomForest,
    GradientBoosting,
    Xgboost,
    Gpr,
    Mlp,
    Svr,
}

impl ModelFamily {
    pub const ALL: [ModelFamily; 10] = [
        ModelFamily::Mean,
        ModelFamily::Ridge,
        ModelFamily::Lasso,
        ModelFamily::Tree,
        ModelFamily::RandomForest,
        ModelFamily::GradientBoosting,
        ModelFamily::Xgboost,
        ModelFamily::Gpr,
        ModelFamily::Mlp,
        ModelFamily::Svr,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ModelFamily::Mean => "mean",
            ModelFamily::Ridge => "ridge",
            ModelFamily::Lasso => "lasso",
            ModelFamily::Tree => "tree",
            ModelFamily::RandomForest => "rf",
            ModelFamily::GradientBoosting => "gb",
            ModelFamily::Xgboost => "xgb",
            ModelFamily::Gpr => "gpr",
            ModelFamily::Mlp => "nn",
            ModelFamily::Svr => "svr",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        Some(match s.trim().to_ascii_lowercase().replace(['-', '_', ' '], "").as_str() {
            "mean" | "null" => ModelFamily::Mean,
            "ridge" => ModelFamily::Ridge,
            "lasso" => ModelFamily::Lasso,
            "tree" | "cart" => ModelFamily::Tree,
            "rf" | "randomforest" => ModelFamily::RandomForest,
            "gb" | "gbr" | "gradientboosting" => ModelFamily::GradientBoosting,
            "xgb" | "xgboost" => ModelFamily::Xgboost,
            "gpr" | "gp" | "gaussianprocess" => ModelFamily::Gpr,
            "nn" | "mlp" => ModelFamily::Mlp,
            "svr" | "svm" => ModelFamily::Svr,
            _ => return None,
        })
    }

    pub fn default_config(self) -> LearnerConfig {
        match self {
            ModelFamily::Mean => LearnerConfig::Mean,
            ModelFamily::Ridge => LearnerConfig::Ridge { lambda: 1.0 },
            ModelFamily::Lasso => LearnerConfig::Lasso { lambda: 1.0, max_iter: 10_000, tol: 1e-6 },
            ModelFamily::Tree => LearnerConfig::Tree { max_depth: None, min_samples_leaf: 1 },
            ModelFamily::RandomForest => LearnerConfig::RandomForest {
                n_estimators: 100,
                max_depth: None,
                min_samples_leaf: 1,
                max_features: None,
                seed: 0,
            },
            ModelFamily::GradientBoosting => LearnerConfig::GradientBoosting {
                n_estimators: 100,
                learning_rate: 0.1,
                max_depth: 3,
                min_samples_leaf: 1,
                l1_leaf: 0.0,
                l2_leaf: 0.0,
                subsample: 1.0,
                seed: 0,
            },
            ModelFamily::Xgboost => LearnerConfig::GradientBoosting {
                n_estimators: 100,
                learning_rate: 0.3,
                max_depth: 6,
                min_samples_leaf: 1,
                l1_leaf: 0.0,
                l2_leaf: 1.0,
                subsample: 1.0,
                seed: 0,
            },
            ModelFamily::Gpr => LearnerConfig::Gpr { length_scale: 10.0, signal_var: 1.0, noise_var: 0.01 },
            ModelFamily::Mlp => LearnerConfig::Mlp {
                layer_sizes: vec![64, 32],
                alpha: 1e-4,
                learning_rate: 1e-3,
                epochs: 200,
                batch_size: 32,
                seed: 0,
                activation: Activation::Softplus,
            },
            ModelFamily::Svr => LearnerConfig::Svr {
                c: 100.0,
                epsilon: 0.1,
                kernel: KernelSpec::Rbf { gamma: None },
                max_iter: 200_000,
                tol: 1e-3,
            },
        }
    }
}

impl fmt::Display for ModelFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl LearnerConfig {
    pub fn family(&self) -> ModelFamily {
        match self {
            LearnerConfig::Mean => ModelFamily::Mean,
            LearnerConfig::Ridge { .. } => ModelFamily::Ridge,
            LearnerConfig::Lasso { .. } => ModelFamily::Lasso,
            LearnerConfig::Tree { .. } => ModelFamily::Tree,
            LearnerConfig::RandomForest { .. } => ModelFamily::RandomForest,
            LearnerConfig::GradientBoosting { l1_leaf, l2_leaf, .. } => {
                if *l1_leaf == 0.0 && *l2_leaf == 0.0 {
                    ModelFamily::GradientBoosting
                } else {
                    ModelFamily::Xgboost
                }
            }
            LearnerConfig::Gpr { .. } => ModelFamily::Gpr,
            LearnerConfig::Mlp { .. } => ModelFamily::Mlp,
            LearnerConfig::Svr { .. } => ModelFamily::Svr,
        }
    }

    pub fn seed(&self) -> Option<u64> {
        match self {
            LearnerConfig::RandomForest { seed, .. }
            | LearnerConfig::GradientBoosting { seed, .. }
            | LearnerConfig::Mlp { seed, .. } => Some(*seed),
            _ => None,
        }
    }

    pub fn with_seed(mut self, new: u64) -> Self {
        match &mut self {
            LearnerConfig::RandomForest { seed, .. }
            | LearnerConfig::GradientBoosting { seed, .. }
            | LearnerConfig::Mlp { seed, .. } => *seed = new,
            _ => {}
        }
        self
    }

    pub fn validate(&self) -> Result<()> {
        let pos = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(validation!("{name} must be positive and finite, got {v}"))
            }
        };
        let nonneg = |name: &str, v: f64| {
            if v >= 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(validation!("{name} must be non-negative and finite, got {v}"))
            }
        };
        let count = |name: &str, v: usize| {
            if v >= 1 {
                Ok(())
            } else {
                Err(validation!("{name} must be at least 1"))
            }
        };
        match self {
            LearnerConfig::Mean => Ok(()),
            LearnerConfig::Ridge { lambda } => nonneg("lambda", *lambda),
            LearnerConfig::Lasso { lambda, max_iter, tol } => {
                nonneg("lambda", *lambda)?;
                count("max_iter", *max_iter)?;
                pos("tol", *tol)
            }
            LearnerConfig::Tree { max_depth, min_samples_leaf } => {
                if let Some(d) = max_depth {
                    count("max_depth", *d)?;
                }
                count("min_samples_leaf", *min_samples_leaf)
            }
            LearnerConfig::RandomForest { n_estimators, max_depth, min_samples_leaf, max_features, .. } => {
                count("n_estimators", *n_estimators)?;
                if let Some(d) = max_depth {
                    count("max_depth", *d)?;
                }
                if let Some(m) = max_features {
                    count("max_features", *m)?;
                }
                count("min_samples_leaf", *min_samples_leaf)
            }
            LearnerConfig::GradientBoosting {
                n_estimators,
                learning_rate,
                max_depth,
                min_samples_leaf,
                l1_leaf,
                l2_leaf,
                subsample,
                ..
            } => {
                count("n_estimators", *n_estimators)?;
                pos("learning_rate", *learning_rate)?;
                count("max_depth", *max_depth)?;
                count("min_samples_leaf", *min_samples_leaf)?;
                nonneg("l1_leaf", *l1_leaf)?;
                nonneg("l2_leaf", *l2_leaf)?;
                if !(*subsample > 0.0 && *subsample <= 1.0) {
                    return Err(validation!("subsample must lie in (0, 1], got {subsample}"));
                }
                Ok(())
            }
            LearnerConfig::Gpr { length_scale, signal_var, noise_var } => {
                pos("length_scale", *length_scale)?;
                pos("signal_var", *signal_var)?;
                pos("noise_var", *noise_var)
            }
            LearnerConfig::Mlp { layer_sizes, alpha, learning_rate, epochs, batch_size, .. } => {
                if layer_sizes.is_empty() {
                    return Err(validation!("layer_sizes must name at least one hidden layer"));
                }
                for &w in layer_sizes {
                    count("layer width", w)?;
                }
                nonneg("alpha", *alpha)?;
                pos("learning_rate", *learning_rate)?;
                count("epochs", *epochs)?;
                count("batch_size", *batch_size)
            }
            LearnerConfig::Svr { c, epsilon, kernel, max_iter, tol } => {
                pos("C", *c)?;
                nonneg("epsilon", *epsilon)?;
                count("max_iter", *max_iter)?;
                pos("tol", *tol)?;
                if let KernelSpec::Poly { degree, .. } = kernel {
                    count("degree", *degree as usize)?;
                }
                if let Some(g) = kernel.gamma() {
                    pos("gamma", g)?;
                }
                Ok(())
            }
        }
    }

    /// Sets one hyperparameter by its search-space name.
    pub fn set(&mut self, name: &str, value: &ParamValue) -> Result<()> {
        let family = self.family();
        let bad = || validation!("hyperparameter '{name}' cannot take value '{value}' for {family} models");
        let as_f = || value.as_f64().ok_or_else(bad);
        let as_n = || value.as_count().ok_or_else(bad);
        match (self, name) {
            (
                LearnerConfig::RandomForest { n_estimators, .. } | LearnerConfig::GradientBoosting { n_estimators, .. },
                "n_estimators",
            ) => *n_estimators = as_n()?,
            (LearnerConfig::RandomForest { max_depth, .. } | LearnerConfig::Tree { max_depth, .. }, "max_depth") => {
                *max_depth = Some(as_n()?)
            }
            (LearnerConfig::GradientBoosting { max_depth, .. }, "max_depth") => *max_depth = as_n()?,
            (
                LearnerConfig::RandomForest { min_samples_leaf, .. }
                | LearnerConfig::Tree { min_samples_leaf, .. }
                | LearnerConfig::GradientBoosting { min_samples_leaf, .. },
                "min_samples_leaf",
            ) => *min_samples_leaf = as_n()?,
            (LearnerConfig::RandomForest { max_features, .. }, "max_features") => *max_features = Some(as_n()?),
            (
                LearnerConfig::GradientBoosting { learning_rate, .. } | LearnerConfig::Mlp { learning_rate, .. },
                "learning_rate",
            ) => *learning_rate = as_f()?,
            (LearnerConfig::GradientBoosting { l1_leaf, .. }, "l1_leaf") => *l1_leaf = as_f()?,
            (LearnerConfig::GradientBoosting { l2_leaf, .. }, "l2_leaf") => *l2_leaf = as_f()?,
            (LearnerConfig::GradientBoosting { subsample, .. }, "subsample") => *subsample = as_f()?,
            (LearnerConfig::Ridge { lambda } | LearnerConfig::Lasso { lambda, .. }, "lambda" | "alpha") => {
                *lambda = as_f()?
            }
            (LearnerConfig::Mlp { alpha, .. }, "alpha") => *alpha = as_f()?,
            (LearnerConfig::Mlp { epochs, .. }, "epochs") => *epochs = as_n()?,
            (LearnerConfig::Mlp { batch_size, .. }, "batch_size") => *batch_size = as_n()?,
            (LearnerConfig::Mlp { layer_sizes, .. }, n) if n.starts_with("neurons_") => {
                let k: usize = n["neurons_".len()..].parse().map_err(|_| bad())?;
                if k == 0 {
                    return Err(bad());
                }
                let width = as_n()?;
                if layer_sizes.len() < k {
                    layer_sizes.resize(k, width);
                }
                layer_sizes[k - 1] = width;
            }
            (LearnerConfig::Svr { c, .. }, "C" | "c") => *c = as_f()?,
            (LearnerConfig::Svr { epsilon, .. }, "epsilon") => *epsilon = as_f()?,
            (LearnerConfig::Svr { kernel, .. }, "kernel") => {
                *kernel = value.as_str().and_then(|s| kernel.with_name(s)).ok_or_else(bad)?
            }
            (LearnerConfig::Svr { kernel: KernelSpec::Poly { degree, .. }, .. }, "degree") => {
                *degree = u32::try_from(as_n()?).map_err(|_| bad())?
            }
            (LearnerConfig::Svr { kernel, .. }, "gamma") => {
                let g = Some(as_f()?);
                match kernel {
                    KernelSpec::Poly { gamma, .. } | KernelSpec::Rbf { gamma } | KernelSpec::Sigmoid { gamma, .. } => {
                        *gamma = g
                    }
                    KernelSpec::Linear => return Err(bad()),
                }
            }
            (LearnerConfig::Svr { kernel, .. }, "coef0") => match kernel {
                KernelSpec::Poly { coef0, .. } | KernelSpec::Sigmoid { coef0, .. } => *coef0 = as_f()?,
                _ => return Err(bad()),
            },
            (LearnerConfig::Gpr { length_scale, .. }, "length_scale") => *length_scale = as_f()?,
            (LearnerConfig::Gpr { signal_var, .. }, "signal_var") => *signal_var = as_f()?,
            (LearnerConfig::Gpr { noise_var, .. }, "noise_var") => *noise_var = as_f()?,
            _ => return Err(bad()),
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn set_follows_search_space_names() {
        let mut svr = ModelFamily::Svr.default_config();
        svr.set("C", &ParamValue::Int(698)).unwrap();
        svr.set("kernel", &ParamValue::Cat("poly".into())).unwrap();
        svr.set("degree", &ParamValue::Int(2)).unwrap();
        assert_eq!(
            svr,
            LearnerConfig::Svr {
                c: 698.0,
                epsilon: 0.1,
                kernel: KernelSpec::Poly { degree: 2, gamma: None, coef0: 0.0 },
                max_iter: 200_000,
                tol: 1e-3
            }
        );
        let mut nn = ModelFamily::Mlp.default_config();
        for (k, w) in [(1, 128), (2, 256), (3, 32)] {
            nn.set(&format!("neurons_{k}"), &ParamValue::Int(w)).unwrap();
        }
        assert!(matches!(&nn, LearnerConfig::Mlp { layer_sizes, .. } if layer_sizes == &vec![128, 256, 32]));
        assert!(nn.set("C", &ParamValue::Int(1)).is_err());
    }

    #[test]
    fn invalid_configs_are_rejected() {
        assert!(LearnerConfig::RandomForest { n_estimators: 0, max_depth: None, min_samples_leaf: 1, max_features: None, seed: 0 }
            .validate()
            .is_err());
        assert!(LearnerConfig::Gpr { length_scale: 1.0, signal_var: 1.0, noise_var: 0.0 }.validate().is_err());
        for f in ModelFamily::ALL {
            f.default_config().validate().unwrap();
            assert_eq!(ModelFamily::parse(f.as_str()), Some(f));
        }
    }

    #[test]
    fn config_json_is_tagged() {
        let json = serde_json::to_string(&ModelFamily::Ridge.default_config()).unwrap();
        assert_eq!(json, r#"{"model":"ridge","lambda":1.0}"#);
    }
}
