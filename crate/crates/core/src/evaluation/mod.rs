//! Metrics, fold generation, cross-validation, learning curves and label correlations.

mod correlation;
mod curve;
mod cv;
mod folds;
mod metrics;

pub use correlation::{pearson, pearson_matrix, pearson_pairs, CorrMatrix};
pub use curve::{learning_curve, CurvePoint, DEFAULT_FRACTIONS};
pub use cv::{cross_validate, cv_matrix, cv_with_folds, describe_plan, prepare, report_from, CvOutcome, CvReport};
pub use folds::{fold_hash, kfold_indices, Fold};
pub use metrics::{mae, mean_std, r2, rmse};
