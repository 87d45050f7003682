//! Mechanical-property prediction for metal additive manufacturing.
//!
//! Records and reference tables live in [`data`]; [`features`] turns them into
//! model inputs; [`learners`], [`evaluation`] and [`hyperopt`] fit, score and tune
//! regressors; [`explain`] attributes predictions; [`eqdiscovery`] fits
//! dimensionally consistent power laws.
//!
//! Numeric code is generic over [`Real`]; the aliases below fix it to `f64`.

pub mod bundled;
pub mod data;
pub mod eqdiscovery;
pub mod error;
pub mod evaluation;
pub mod explain;
pub mod features;
pub mod hyperopt;
pub mod learners;
pub mod linalg;
pub mod rng;
pub mod scalar;
pub mod synth;

pub use error::{Error, ErrorKind, Result};
pub use scalar::Real;

pub type Model = learners::TrainedModel<f64>;
pub type ModelF32 = learners::TrainedModel<f32>;
pub type Matrix = features::FeatureMatrix<f64>;
pub type MatrixF32 = features::FeatureMatrix<f32>;
pub type Scaler = features::Standardizer<f64>;
