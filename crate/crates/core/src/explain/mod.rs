//! Feature attribution: drop-column and gain importance, interventional tree SHAP
//! with a brute-force oracle, and plot-data exports.

mod exports;
mod importance;
mod shap;

pub use exports::{
    shap_exports, DecisionRow, DependenceRow, ForceEntry, ForcePlot, ShapExports, SummaryRow, SwarmRow, WaterfallRow,
};
pub use importance::{
    drop_column_importance, drop_column_importance_matrix, gain_importance, shap_importance, ImportanceKind,
    ImportanceReport,
};
pub use shap::{
    exact_shap_oracle, sample_background, tree_shap, ShapExplanation, DEFAULT_BACKGROUND, DEFAULT_ORACLE_MAX_FEATURES,
};
