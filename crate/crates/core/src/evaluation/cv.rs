use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::folds::{fold_hash, kfold_indices, Fold};
use super::metrics::{mae, mean_std, r2};
use crate::data::{select_complete, Dataset, ElementTable, LabelKind, MaterialRegistry};
use crate::error::{validation, Result};
use crate::features::{build_features, FeatureMatrix, FeaturizationPlan, Standardizer};
use crate::learners::{fit, LearnerConfig};
use crate::scalar::Real;

/// Per-fold and aggregate cross-validation scores.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvReport {
    pub task: LabelKind,
    pub featurization: String,
    pub model: LearnerConfig,
    pub k: usize,
    pub seed: u64,
    pub n_records: usize,
    pub n_features: usize,
    pub fold_r2: Vec<f64>,
    pub fold_mae: Vec<f64>,
    pub mean_r2: f64,
    pub std_r2: f64,
    pub mean_mae: f64,
    pub std_mae: f64,
    pub fold_hash: String,
    pub converged: bool,
}

/// Scores of a cross-validation run on a prepared matrix.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CvOutcome {
    pub fold_r2: Vec<f64>,
    pub fold_mae: Vec<f64>,
    pub fold_hash: String,
    /// out-of-fold prediction for every row
    pub predictions: Vec<f64>,
    pub converged: bool,
}

impl CvOutcome {
    pub fn mean_r2(&self) -> f64 {
        mean_std(&self.fold_r2).0
    }

    pub fn mean_mae(&self) -> f64 {
        mean_std(&self.fold_mae).0
    }
}

pub(crate) struct FoldResult {
    pub r2: f64,
    pub mae: f64,
    pub predictions: Vec<f64>,
    pub converged: bool,
}

/// Standardizes on `train` rows only, fits, and scores on `test`.
pub(crate) fn run_fold<T: Real>(
    cfg: &LearnerConfig,
    x: &FeatureMatrix<T>,
    y: &[T],
    train: &[usize],
    test: &[usize],
    standardize_onehot: bool,
) -> Result<FoldResult> {
    let xtr = x.select_rows(train);
    let xte = x.select_rows(test);
    let st = Standardizer::fit(&xtr, standardize_onehot)?;
    let ytr: Vec<T> = train.iter().map(|&i| y[i]).collect();
    let yte: Vec<T> = test.iter().map(|&i| y[i]).collect();
    let model = fit(cfg, &st.apply(&xtr)?, &ytr)?;
    let pred = model.predict(&st.apply(&xte)?)?;
    Ok(FoldResult {
        r2: r2(&yte, &pred)?.as_f64(),
        mae: mae(&yte, &pred)?.as_f64(),
        predictions: pred.iter().map(|v| v.as_f64()).collect(),
        converged: model.converged,
    })
}

/// k-fold CV on a prepared matrix; folds run in parallel and merge by index.
pub fn cv_matrix<T: Real>(
    cfg: &LearnerConfig,
    x: &FeatureMatrix<T>,
    y: &[T],
    k: usize,
    seed: u64,
    standardize_onehot: bool,
) -> Result<CvOutcome> {
    if y.len() != x.rows() {
        return Err(validation!("{} labels for {} feature rows", y.len(), x.rows()));
    }
    let folds = kfold_indices(x.rows(), k, seed)?;
    cv_with_folds(cfg, x, y, &folds, standardize_onehot)
}

pub fn cv_with_folds<T: Real>(
    cfg: &LearnerConfig,
    x: &FeatureMatrix<T>,
    y: &[T],
    folds: &[Fold],
    standardize_onehot: bool,
) -> Result<CvOutcome> {
    let results: Vec<Result<FoldResult>> = folds
        .par_iter()
        .enumerate()
        .map(|(f, fold)| run_fold(cfg, x, y, &fold.train, &fold.test, standardize_onehot).map_err(|e| e.in_fold(f)))
        .collect();
    let mut out = CvOutcome {
        fold_r2: Vec::with_capacity(folds.len()),
        fold_mae: Vec::with_capacity(folds.len()),
        fold_hash: fold_hash(folds),
        predictions: vec![f64::NAN; x.rows()],
        converged: true,
    };
    for (fold, r) in folds.iter().zip(results) {
        let r = r?;
        out.fold_r2.push(r.r2);
        out.fold_mae.push(r.mae);
        out.converged &= r.converged;
        for (&i, p) in fold.test.iter().zip(r.predictions) {
            out.predictions[i] = p;
        }
    }
    Ok(out)
}

/// Rows complete for `plan` and `label`, featurized with a schema taken from all of them.
pub fn prepare(
    ds: &Dataset,
    registry: &MaterialRegistry,
    elements: Option<&ElementTable>,
    plan: &FeaturizationPlan,
    label: LabelKind,
) -> Result<(FeatureMatrix<f64>, Vec<f64>)> {
    let sel = select_complete(ds, &plan.request(), label);
    let (x, _) = build_features(&sel, registry, elements, plan)?;
    let y = sel.records().iter().map(|r| r.label(label).expect("selected rows carry the label")).collect();
    Ok((x, y))
}

/// Select complete rows, featurize, then k-fold CV with train-only standardization.
#[allow(clippy::too_many_arguments)]
pub fn cross_validate(
    cfg: &LearnerConfig,
    ds: &Dataset,
    registry: &MaterialRegistry,
    elements: Option<&ElementTable>,
    plan: &FeaturizationPlan,
    label: LabelKind,
    k: usize,
    seed: u64,
) -> Result<CvReport> {
    let (x, y) = prepare(ds, registry, elements, plan, label)?;
    if x.rows() < k {
        return Err(validation!(
            "only {} complete records for {} under {}; need at least {k}",
            x.rows(),
            label,
            plan.scheme
        ));
    }
    let out = cv_matrix(cfg, &x, &y, k, seed, plan.standardize_onehot)?;
    Ok(report_from(label, describe_plan(plan), cfg, k, seed, &x, out))
}

pub fn describe_plan(plan: &FeaturizationPlan) -> String {
    let mut s = plan.scheme.as_str().to_string();
    for f in &plan.extra_numeric {
        s.push('+');
        s.push_str(f.name());
    }
    s
}

pub fn report_from<T: Real>(
    task: LabelKind,
    featurization: String,
    cfg: &LearnerConfig,
    k: usize,
    seed: u64,
    x: &FeatureMatrix<T>,
    out: CvOutcome,
) -> CvReport {
    let (mean_r2, std_r2) = mean_std(&out.fold_r2);
    let (mean_mae, std_mae) = mean_std(&out.fold_mae);
    CvReport {
        task,
        featurization,
        model: cfg.clone(),
        k,
        seed,
        n_records: x.rows(),
        n_features: x.cols(),
        fold_r2: out.fold_r2,
        fold_mae: out.fold_mae,
        mean_r2,
        std_r2,
        mean_mae,
        std_mae,
        fold_hash: out.fold_hash,
        converged: out.converged,
    }
}
