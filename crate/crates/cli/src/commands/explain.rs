use std::path::Path;

use clap::Args;
use mamprop::data::Dataset;
use mamprop::explain::{
    exact_shap_oracle, sample_background, shap_exports, shap_importance, tree_shap, ShapExplanation,
    DEFAULT_BACKGROUND, DEFAULT_ORACLE_MAX_FEATURES,
};
use mamprop::features::{encode, FeatureContext, FeatureMatrix, Scheme};
use mamprop::learners::TrainedModel;
use mamprop::rng;
use rayon::prelude::*;
use serde::Serialize;

use super::learn::ModelBundle;
use crate::fail::{CliError, CliResult};
use crate::session::{Session, FORMAT_VERSION};
use crate::settings::{ConfigArg, DataOpts, RunOpts, ShapOpts};

const INSTANCE_STREAM: u64 = 0x5a;

#[derive(Debug, Args)]
pub struct ShapArgs {
    #[command(flatten)]
    pub config: ConfigArg,
    #[command(flatten)]
    pub data: DataOpts,
    #[command(flatten)]
    pub run: RunOpts,
    #[command(flatten)]
    pub shap: ShapOpts,
}

/// Up to `n` row indices in ascending order, drawn from the run seed.
pub fn pick_rows(rows: usize, n: usize, seed: u64) -> Vec<usize> {
    if rows <= n {
        return (0..rows).collect();
    }
    let mut r = rng::stream(seed, rng::stream_id(&[INSTANCE_STREAM]));
    let mut idx = rng::permutation(rows, &mut r);
    idx.truncate(n);
    idx.sort_unstable();
    idx
}

/// Explains rows `idx` of the standardized matrix `z`; reported feature values
/// come from the unstandardized `raw`. Tree models use the fast path, others
/// the exact enumeration when the feature count allows.
pub fn explain_rows(
    model: &TrainedModel<f64>,
    z: &FeatureMatrix<f64>,
    raw: &FeatureMatrix<f64>,
    idx: &[usize],
    background: &FeatureMatrix<f64>,
) -> CliResult<Vec<ShapExplanation>> {
    let tree = model.tree_ensemble().is_some();
    if !tree && z.cols() > DEFAULT_ORACLE_MAX_FEATURES {
        return Err(CliError::validation(format!(
            "SHAP for {} models needs the exact enumeration, limited to {DEFAULT_ORACLE_MAX_FEATURES} features; this model has {}",
            model.config.family(),
            z.cols()
        )));
    }
    let out: Vec<mamprop::Result<ShapExplanation>> = idx
        .par_iter()
        .map(|&i| {
            let mut e = if tree {
                tree_shap(model, z.row(i), background)?
            } else {
                exact_shap_oracle(model, z.row(i), background, DEFAULT_ORACLE_MAX_FEATURES)?
            };
            e.feature_values = raw.row(i).to_vec();
            Ok(e)
        })
        .collect();
    Ok(out.into_iter().collect::<mamprop::Result<_>>()?)
}

#[derive(Debug, Serialize)]
struct GroupScore {
    group: String,
    mean_abs_shap: f64,
}

#[derive(Debug, Serialize)]
struct ShapReport {
    task: mamprop::data::LabelKind,
    model: mamprop::learners::ModelFamily,
    instances: usize,
    background_rows: usize,
    base_value: f64,
    max_additivity_gap: f64,
    features: Vec<String>,
    mean_abs_shap: Vec<f64>,
    groups: Option<Vec<GroupScore>>,
    encode_warnings: Vec<String>,
}

fn read_bundle(s: &mut Session, path: &Path) -> CliResult<ModelBundle> {
    let bytes = std::fs::read(path).map_err(|e| CliError::io(path, e))?;
    s.add_digest("model", path.display().to_string(), &bytes);
    let v: serde_json::Value = serde_json::from_slice(&bytes)
        .map_err(|e| CliError::schema(format!("{}: not valid JSON: {e}", path.display())))?;
    let version = v.get("format_version").and_then(serde_json::Value::as_u64).unwrap_or(0);
    if version == 0 || version > FORMAT_VERSION {
        return Err(CliError::schema(format!(
            "{}: format_version {version} is not supported (this build reads up to {FORMAT_VERSION})",
            path.display()
        )));
    }
    let result = v.get("result").cloned().ok_or_else(|| CliError::schema(format!("{} has no result", path.display())))?;
    serde_json::from_value(result).map_err(|e| CliError::schema(format!("{}: not a model file: {e}", path.display())))
}

/// SHAP values for a trained model over records, written as plot-ready files.
/// Deterministic for a fixed seed at any thread count.
pub fn shap(a: ShapArgs) -> CliResult<()> {
    let mut s = Session::start("shap", &a.config, a.run)?;
    let data = s.file.data.clone().merge(a.data);
    let mut opts = s.file.shap.clone().merge(a.shap);
    let model_path = opts.model.clone().ok_or_else(|| CliError::validation("--model is required"))?;
    let n_background = *opts.background.get_or_insert(DEFAULT_BACKGROUND);
    let n_instances = *opts.instances.get_or_insert(100);
    let group = *opts.group.get_or_insert(false);
    if n_background == 0 || n_instances == 0 {
        return Err(CliError::validation("background and instances must be positive"));
    }
    s.embed("data", &data);
    s.embed("shap", &opts);

    let bundle = read_bundle(&mut s, &model_path)?;
    let model = bundle.model()?;
    let registry = s.registry(&data)?;
    let elements = if bundle.plan.scheme == Scheme::Elemental { Some(s.elements(&data)?) } else { None };
    let ds = match &opts.data {
        Some(p) => s.records_from(p, &data, &registry)?,
        None => s.records(&data, &registry)?,
    };
    let req = bundle.plan.request();
    let keep: Vec<usize> =
        (0..ds.len()).filter(|&i| ds.status()[i].is_valid() && req.satisfied_by(ds.record(i))).collect();
    let sel: Dataset = ds.subset(&keep);
    if sel.is_empty() {
        return Err(CliError::validation("no valid record carries the model's input columns"));
    }
    let (raw, encode_warnings) =
        encode(&sel, &bundle.schema, FeatureContext { registry: &registry, elements: elements.as_ref() })?;
    for w in &encode_warnings {
        eprintln!("warning: {w}");
    }
    let z = bundle.standardizer.apply(&raw)?;
    model.check_schema(&z)?;

    let background = sample_background(&z, n_background, s.seed);
    let idx = pick_rows(z.rows(), n_instances, s.seed);
    let expls = explain_rows(&model, &z, &raw, &idx, &background)?;
    let names = bundle.schema.names();
    let imp = shap_importance(&expls, &names)?;
    let groups = group.then(|| {
        let mut acc: Vec<(String, f64)> = Vec::new();
        for e in &expls {
            let (gn, gp) = e.grouped(&bundle.schema);
            if acc.is_empty() {
                acc = gn.into_iter().map(|n| (n, 0.0)).collect();
            }
            for (a, p) in acc.iter_mut().zip(gp) {
                a.1 += p.abs() / expls.len() as f64;
            }
        }
        acc.into_iter().map(|(group, mean_abs_shap)| GroupScore { group, mean_abs_shap }).collect()
    });
    let report = ShapReport {
        task: bundle.task,
        model: model.config.family(),
        instances: expls.len(),
        background_rows: background.rows(),
        base_value: expls[0].base_value,
        max_additivity_gap: expls.iter().map(ShapExplanation::additivity_gap).fold(0.0, f64::max),
        features: imp.features.clone(),
        mean_abs_shap: imp.scores.clone(),
        groups,
        encode_warnings,
    };
    let files = shap_exports(&expls, &names)?.render()?;
    let layout = s.layout("shap");
    s.write_report(layout.file("", "json"), &report);
    for (name, bytes) in files {
        s.write_bytes(layout.named(&name), bytes);
    }
    s.commit()
}
