mod data;
mod discover;
mod explain;
mod learn;
mod report;

pub use data::{corr, ingest, stats, synth, CorrArgs, IngestArgs, StatsArgs, SynthArgs};
pub use discover::{discover, DiscoverArgs};
pub use explain::{shap, ShapArgs};
pub use learn::{cv, importance, learning_curve_cmd, train, tune, CurveArgs, ImportanceArgs, ModelArgs, TuneArgs};
pub use report::{report, ReportArgs};
