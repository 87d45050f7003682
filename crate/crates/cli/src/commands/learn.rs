use std::collections::BTreeSet;

use clap::Args;
use mamprop::data::{Dataset, ElementTable, MaterialRegistry};
use mamprop::evaluation::{cross_validate, learning_curve, mae, prepare, r2, DEFAULT_FRACTIONS};
use mamprop::explain::{
    drop_column_importance, gain_importance, sample_background, shap_importance, ImportanceReport,
    DEFAULT_BACKGROUND,
};
use mamprop::features::{FeatureMatrix, FeatureSchema, FeaturizationPlan, Scheme, Standardizer};
use mamprop::hyperopt::{
    builtin_space, cv_objective, grid_search, random_search, reference_optimum, tpe_search, Config, SearchSpace,
    Trial, TrialHistory, TrialStatus, TpeOptions,
};
use mamprop::learners::{fit, LearnerConfig, ModelFamily, TrainedModel};
use serde::{Deserialize, Serialize};

use super::explain::explain_rows;
use crate::fail::{CliError, CliResult};
use crate::resolve::{ModelChoice, ParamsFile};
use crate::session::{convergence, csv_bytes, fmt_f64, fmt_opt, Session, FORMAT_VERSION};
use crate::settings::{ConfigArg, CurveOpts, DataOpts, ImportanceOpts, ModelOpts, RunOpts, TuneOpts};

#[derive(Debug, Args)]
pub struct ModelArgs {
    #[command(flatten)]
    pub config: ConfigArg,
    #[command(flatten)]
    pub data: DataOpts,
    #[command(flatten)]
    pub run: RunOpts,
    #[command(flatten)]
    pub model: ModelOpts,
}

struct Loaded {
    registry: MaterialRegistry,
    elements: Option<ElementTable>,
    dataset: Dataset,
}

/// Merges settings, resolves the model choice and loads the inputs it needs.
fn setup(s: &mut Session, data: DataOpts, model: ModelOpts) -> CliResult<(ModelChoice, Loaded)> {
    let data = s.file.data.clone().merge(data);
    let mut model = s.file.model.clone().merge(model);
    let choice = ModelChoice::resolve(&mut model, s.seed)?;
    s.embed("data", &data);
    s.embed("model", &model);
    let registry = s.registry(&data)?;
    let elements = if choice.plan.scheme == Scheme::Elemental { Some(s.elements(&data)?) } else { None };
    let dataset = s.records(&data, &registry)?;
    Ok((choice, Loaded { registry, elements, dataset }))
}

fn prepared(choice: &ModelChoice, l: &Loaded) -> CliResult<(FeatureMatrix<f64>, Vec<f64>)> {
    let (x, y) = prepare(&l.dataset, &l.registry, l.elements.as_ref(), &choice.plan, choice.task)?;
    if x.rows() < choice.k.max(2) {
        return Err(CliError::validation(format!(
            "only {} complete records for {} under {}",
            x.rows(),
            choice.task,
            choice.plan.scheme
        )));
    }
    Ok((x, y))
}

fn warn_unconverged(converged: bool, cfg: &LearnerConfig) {
    if !converged {
        eprintln!("warning: {} solver stopped at its iteration cap", cfg.family());
    }
}

/// k-fold cross-validation report. Deterministic for a fixed seed at any thread count.
pub fn cv(a: ModelArgs) -> CliResult<()> {
    let mut s = Session::start("cv", &a.config, a.run)?;
    let (choice, l) = setup(&mut s, a.data, a.model)?;
    let report = cross_validate(
        &choice.config,
        &l.dataset,
        &l.registry,
        l.elements.as_ref(),
        &choice.plan,
        choice.task,
        choice.k,
        s.seed,
    )?;
    warn_unconverged(report.converged, &choice.config);
    let mut rows: Vec<Vec<String>> = (0..report.k)
        .map(|f| vec![f.to_string(), fmt_f64(report.fold_r2[f]), fmt_f64(report.fold_mae[f])])
        .collect();
    rows.push(vec!["mean".into(), fmt_f64(report.mean_r2), fmt_f64(report.mean_mae)]);
    rows.push(vec!["std".into(), fmt_f64(report.std_r2), fmt_f64(report.std_mae)]);
    let layout = s.layout(&choice.stem("cv"));
    s.write_report(layout.file("", "json"), &report);
    s.write_bytes(layout.file("", "csv"), csv_bytes(&["fold", "r2", "mae"], rows));
    s.commit()
}

/// Trained model plus everything needed to featurize new records for it.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModelBundle {
    pub task: mamprop::data::LabelKind,
    pub plan: FeaturizationPlan,
    pub schema: FeatureSchema,
    pub standardizer: Standardizer<f64>,
    /// model container as written by the learners module
    pub model: serde_json::Value,
    pub training_rows: usize,
    pub training_r2: f64,
    pub training_mae: f64,
}

impl ModelBundle {
    pub fn model(&self) -> CliResult<TrainedModel<f64>> {
        Ok(TrainedModel::from_json(&self.model.to_string())?)
    }
}

fn fit_all(choice: &ModelChoice, x: &FeatureMatrix<f64>, y: &[f64]) -> CliResult<(Standardizer<f64>, FeatureMatrix<f64>, TrainedModel<f64>)> {
    let scaler = Standardizer::fit(x, choice.plan.standardize_onehot)?;
    let z = scaler.apply(x)?;
    let model = fit(&choice.config, &z, y)?;
    warn_unconverged(model.converged, &choice.config);
    Ok((scaler, z, model))
}

/// Fits on every complete record and writes the model bundle.
pub fn train(a: ModelArgs) -> CliResult<()> {
    let mut s = Session::start("train", &a.config, a.run)?;
    let (choice, l) = setup(&mut s, a.data, a.model)?;
    let (x, y) = prepared(&choice, &l)?;
    let (scaler, z, model) = fit_all(&choice, &x, &y)?;
    let pred = model.predict(&z)?;
    let model_json: serde_json::Value = serde_json::from_str(&model.to_json()).expect("model JSON parses");
    let bundle = ModelBundle {
        task: choice.task,
        plan: choice.plan.clone(),
        schema: x.schema().clone(),
        standardizer: scaler,
        model: model_json,
        training_rows: x.rows(),
        training_r2: r2(&y, &pred)?,
        training_mae: mae(&y, &pred)?,
    };
    let rows = (0..y.len()).map(|i| vec![x.row_ids()[i].to_string(), fmt_f64(y[i]), fmt_f64(pred[i])]);
    let layout = s.layout(&choice.stem("model"));
    s.write_report(layout.file("", "json"), &bundle);
    s.write_bytes(layout.file("", "csv"), csv_bytes(&["row", "observed", "fitted"], rows));
    s.commit()
}

#[derive(Debug, Args)]
pub struct TuneArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub tune: TuneOpts,
}

#[derive(Debug, Serialize)]
struct TuneReport<'a> {
    task: mamprop::data::LabelKind,
    model: ModelFamily,
    method: &'a str,
    space: &'a SearchSpace,
    history: &'a TrialHistory,
    best: &'a Trial,
    /// optimum listed in the reference study, for comparison
    reference_optimum: Option<Config>,
}

/// Hyperparameter search over the built-in space, scored by mean k-fold R².
/// TPE runs trials sequentially; random and grid search evaluate in parallel
/// and merge by trial index, so all three are deterministic for a fixed seed.
pub fn tune(a: TuneArgs) -> CliResult<()> {
    let mut s = Session::start("tune", &a.model.config, a.model.run)?;
    let mut opts = s.file.tune.clone().merge(a.tune);
    let (choice, l) = setup(&mut s, a.model.data, a.model.model)?;
    let method = opts.method.get_or_insert_with(|| "tpe".into()).to_ascii_lowercase();
    let trials = *opts.trials.get_or_insert(50);
    let resolution = *opts.resolution.get_or_insert(5);
    s.embed("tune", &opts);
    let space = builtin_space(choice.task, choice.family)?;
    let (x, y) = prepared(&choice, &l)?;
    let objective = cv_objective(&choice.config, &x, &y, choice.k, s.seed, choice.plan.standardize_onehot);
    let history = match method.as_str() {
        "tpe" => tpe_search(&space, &objective, trials, s.seed, TpeOptions::default())?,
        "random" => random_search(&space, &objective, trials, s.seed)?,
        "grid" => grid_search(&space, &objective, resolution)?,
        other => return Err(CliError::validation(format!("unknown search method '{other}'; expected tpe, random or grid"))),
    };
    let best = history.best().ok_or_else(|| convergence("every trial failed"))?;

    let names: BTreeSet<&String> = history.trials().iter().flat_map(|t| t.config.keys()).collect();
    let mut header = vec!["trial", "objective", "status"];
    header.extend(names.iter().map(|n| n.as_str()));
    let rows = history.trials().iter().map(|t| {
        let mut r = vec![
            t.index.to_string(),
            fmt_opt(t.objective),
            match &t.status {
                TrialStatus::Ok => "ok".to_string(),
                TrialStatus::Failed(m) => format!("failed: {m}"),
            },
        ];
        r.extend(names.iter().map(|n| t.config.get(*n).map(|v| v.to_string()).unwrap_or_default()));
        r
    });
    let csv = csv_bytes(&header, rows);
    let params = ParamsFile {
        format_version: FORMAT_VERSION,
        task: choice.task,
        model: choice.family,
        config: best.config.clone(),
        objective: best.objective.unwrap_or(f64::NAN),
    };
    let report = TuneReport {
        task: choice.task,
        model: choice.family,
        method: &method,
        space: &space,
        history: &history,
        best,
        reference_optimum: reference_optimum(choice.task, choice.family),
    };
    let layout = s.layout(&choice.stem("tune"));
    let envelope = s.envelope(&report);
    s.write_json(layout.file("", "json"), &envelope);
    s.write_bytes(layout.file("", "csv"), csv);
    let params_json = serde_json::to_value(&params).expect("params serialize");
    s.write_json(layout.file("_best", "json"), &params_json);
    s.commit()
}

#[derive(Debug, Args)]
pub struct CurveArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub curve: CurveOpts,
}

/// MAE and R² against the share of each training fold used.
pub fn learning_curve_cmd(a: CurveArgs) -> CliResult<()> {
    let mut s = Session::start("learning-curve", &a.model.config, a.model.run)?;
    let mut opts = s.file.curve.clone().merge(a.curve);
    let (choice, l) = setup(&mut s, a.model.data, a.model.model)?;
    let fractions = opts.fractions.get_or_insert_with(|| DEFAULT_FRACTIONS.to_vec()).clone();
    let repeats = *opts.repeats.get_or_insert(3);
    s.embed("curve", &opts);
    let (x, y) = prepared(&choice, &l)?;
    let points =
        learning_curve(&choice.config, &x, &y, &fractions, repeats, choice.k, s.seed, choice.plan.standardize_onehot)?;
    let rows = points.iter().map(|p| {
        vec![
            fmt_f64(p.fraction),
            fmt_f64(p.train_rows.iter().sum::<usize>() as f64 / p.train_rows.len().max(1) as f64),
            fmt_f64(p.mean_mae),
            fmt_f64(p.std_mae),
            fmt_f64(p.mean_r2),
        ]
    });
    let csv = csv_bytes(&["fraction", "mean_train_rows", "mean_mae", "std_mae", "mean_r2"], rows);
    let layout = s.layout(&choice.stem("curve"));
    s.write_report(layout.file("", "json"), &points);
    s.write_bytes(layout.file("", "csv"), csv);
    s.commit()
}

#[derive(Debug, Args)]
pub struct ImportanceArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub importance: ImportanceOpts,
}

/// Drop-column (k-fold R² loss), split-gain, or mean |SHAP| importance.
pub fn importance(a: ImportanceArgs) -> CliResult<()> {
    let mut s = Session::start("importance", &a.model.config, a.model.run)?;
    let mut opts = s.file.importance.clone().merge(a.importance);
    let (choice, l) = setup(&mut s, a.model.data, a.model.model)?;
    let method = opts.method.get_or_insert_with(|| "drop".into()).to_ascii_lowercase();
    s.embed("importance", &opts);
    let report: ImportanceReport = match method.as_str() {
        "drop" => drop_column_importance(
            &choice.config,
            &l.dataset,
            &l.registry,
            l.elements.as_ref(),
            &choice.plan,
            choice.task,
            choice.k,
            s.seed,
        )?,
        "gain" => {
            let (x, y) = prepared(&choice, &l)?;
            let (_, _, model) = fit_all(&choice, &x, &y)?;
            gain_importance(&model, x.schema())?
        }
        "shap" => {
            let (x, y) = prepared(&choice, &l)?;
            let (_, z, model) = fit_all(&choice, &x, &y)?;
            let background = sample_background(&z, DEFAULT_BACKGROUND, s.seed);
            let idx = super::explain::pick_rows(z.rows(), DEFAULT_BACKGROUND, s.seed);
            let expls = explain_rows(&model, &z, &x, &idx, &background)?;
            shap_importance(&expls, &x.schema().names())?
        }
        other => return Err(CliError::validation(format!("unknown importance method '{other}'; expected drop, gain or shap"))),
    };
    let rows = report
        .ranked()
        .into_iter()
        .enumerate()
        .map(|(i, (f, v))| vec![(i + 1).to_string(), f.to_string(), fmt_f64(v)]);
    let csv = csv_bytes(&["rank", "feature", "score"], rows);
    let layout = s.layout(&choice.stem(&format!("importance_{method}")));
    s.write_report(layout.file("", "json"), &report);
    s.write_bytes(layout.file("", "csv"), csv);
    s.commit()
}
