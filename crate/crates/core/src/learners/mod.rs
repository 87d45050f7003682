//! Regressors behind one fit/predict contract.
//!
//! Every learner is generic over [`Real`](crate::Real); hyperparameters live in
//! [`LearnerConfig`] as `f64` and are converted when fitting.

mod config;
mod ensemble;
mod gpr;
mod linear;
mod mlp;
mod model;
mod svr;
mod tree;

pub use config::{Activation, KernelSpec, LearnerConfig, ModelFamily, ParamValue};
pub use ensemble::{Boosted, Forest};
pub use gpr::Gpr;
pub use linear::{lasso_lambda_max, Linear};
pub use mlp::{softplus, Layer, Mlp};
pub use model::{
    fit, load_model, save_model, Aggregation, Params, TrainedModel, TreeEnsemble, MODEL_FORMAT_VERSION,
};
pub use model::write_atomic;
pub use svr::{ResolvedKernel, Svr};
pub use tree::{Node, Tree};
