use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::shap::ShapExplanation;
use crate::data::{Dataset, ElementTable, LabelKind, MaterialRegistry};
use crate::error::{validation, Result};
use crate::evaluation::{cv_matrix, prepare};
use crate::features::{FeatureMatrix, FeatureSchema, FeaturizationPlan};
use crate::learners::{LearnerConfig, TrainedModel};
use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ImportanceKind {
    DropColumn,
    Gain,
    MeanAbsShap,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImportanceReport {
    pub kind: ImportanceKind,
    pub features: Vec<String>,
    pub scores: Vec<f64>,
    /// mean CV R² with every feature present (drop-column only)
    pub baseline_score: Option<f64>,
    /// fold partition shared by the baseline and every ablation
    pub fold_hash: Option<String>,
}

impl ImportanceReport {
    /// `(feature, score)` pairs, highest score first; ties keep schema order.
    pub fn ranked(&self) -> Vec<(&str, f64)> {
        let mut v: Vec<(&str, f64)> = self.features.iter().map(String::as_str).zip(self.scores.iter().copied()).collect();
        v.sort_by(|a, b| b.1.total_cmp(&a.1));
        v
    }

    pub fn score(&self, feature: &str) -> Option<f64> {
        self.features.iter().position(|f| f == feature).map(|i| self.scores[i])
    }
}

/// Baseline mean CV R² minus the score with each feature group removed.
/// A one-hot group is removed as a unit; every run uses the same folds.
pub fn drop_column_importance_matrix(
    cfg: &LearnerConfig,
    x: &FeatureMatrix<f64>,
    y: &[f64],
    k: usize,
    seed: u64,
    standardize_onehot: bool,
) -> Result<ImportanceReport> {
    let groups = x.schema().groups();
    if groups.len() < 2 {
        return Err(validation!("drop-column importance needs at least 2 feature groups, got {}", groups.len()));
    }
    let base = cv_matrix(cfg, x, y, k, seed, standardize_onehot)?;
    let ablated: Vec<Result<(f64, String)>> = groups
        .par_iter()
        .map(|g| {
            let out = cv_matrix(cfg, &x.drop_columns(&g.columns), y, k, seed, standardize_onehot)?;
            Ok((out.mean_r2(), out.fold_hash))
        })
        .collect();
    let mut scores = Vec::with_capacity(groups.len());
    for (g, r) in groups.iter().zip(ablated) {
        let (r2, hash) = r?;
        assert_eq!(hash, base.fold_hash, "ablation of {} used different folds", g.name);
        scores.push(base.mean_r2() - r2);
    }
    Ok(ImportanceReport {
        kind: ImportanceKind::DropColumn,
        features: groups.into_iter().map(|g| g.name).collect(),
        scores,
        baseline_score: Some(base.mean_r2()),
        fold_hash: Some(base.fold_hash),
    })
}

#[allow(clippy::too_many_arguments)]
pub fn drop_column_importance(
    cfg: &LearnerConfig,
    ds: &Dataset,
    registry: &MaterialRegistry,
    elements: Option<&ElementTable>,
    plan: &FeaturizationPlan,
    label: LabelKind,
    k: usize,
    seed: u64,
) -> Result<ImportanceReport> {
    let (x, y) = prepare(ds, registry, elements, plan, label)?;
    drop_column_importance_matrix(cfg, &x, &y, k, seed, plan.standardize_onehot)
}

/// Summed split gains per feature; forest gains are averaged over trees.
pub fn gain_importance<T: Real>(m: &TrainedModel<T>, schema: &FeatureSchema) -> Result<ImportanceReport> {
    let ens = m
        .tree_ensemble()
        .ok_or_else(|| validation!("gain importance needs a tree-based model, got {}", m.config.family()))?;
    if schema.len() != m.n_features {
        return Err(validation!("schema has {} columns, the model {}", schema.len(), m.n_features));
    }
    let w = ens.weight().as_f64();
    let mut scores = vec![0.0; m.n_features];
    for t in ens.trees {
        for (f, g) in t.split_gains() {
            scores[f] += g.as_f64().max(0.0);
        }
    }
    if matches!(ens.aggregation, crate::learners::Aggregation::Mean) {
        scores.iter_mut().for_each(|s| *s *= w);
    }
    Ok(ImportanceReport { kind: ImportanceKind::Gain, features: schema.names(), scores, baseline_score: None, fold_hash: None })
}

/// Mean |φ| per feature over a set of explanations.
pub fn shap_importance(explanations: &[ShapExplanation], names: &[String]) -> Result<ImportanceReport> {
    if explanations.is_empty() {
        return Err(validation!("no explanations to summarize"));
    }
    if let Some(e) = explanations.iter().find(|e| e.phis.len() != names.len()) {
        return Err(validation!("explanation has {} attributions for {} features", e.phis.len(), names.len()));
    }
    let n = explanations.len() as f64;
    let scores = (0..names.len()).map(|j| explanations.iter().map(|e| e.phis[j].abs()).sum::<f64>() / n).collect();
    Ok(ImportanceReport {
        kind: ImportanceKind::MeanAbsShap,
        features: names.to_vec(),
        scores,
        baseline_score: None,
        fold_hash: None,
    })
}
