use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::Args;
use mamprop::data::LabelKind;
use mamprop::evaluation::CvReport;
use serde::Serialize;

use crate::fail::{CliError, CliResult};
use crate::resolve::family_title;
use crate::session::{csv_bytes, Session, FORMAT_VERSION};
use crate::settings::{ConfigArg, ReportOpts, RunOpts};

#[derive(Debug, Args)]
pub struct ReportArgs {
    #[command(flatten)]
    pub config: ConfigArg,
    #[command(flatten)]
    pub run: RunOpts,
    #[command(flatten)]
    pub report: ReportOpts,
}

#[derive(Debug, Clone, Serialize)]
struct Candidate {
    source: String,
    model: String,
    featurization: String,
    mean_r2: f64,
    mean_mae: f64,
}

#[derive(Debug, Serialize)]
struct Row {
    category: String,
    metric: String,
    best_model: String,
    value: f64,
    unit: String,
    source: String,
}

#[derive(Debug, Serialize)]
struct Overview {
    rows: Vec<Row>,
    candidates: BTreeMap<String, Vec<Candidate>>,
}

fn cv_files(inputs: &[PathBuf]) -> CliResult<Vec<(PathBuf, bool)>> {
    let mut out = Vec::new();
    for p in inputs {
        if p.is_dir() {
            let mut found: Vec<PathBuf> = std::fs::read_dir(p)
                .map_err(|e| CliError::io(p, e))?
                .filter_map(|e| e.ok().map(|e| e.path()))
                .filter(|f| f.extension().is_some_and(|x| x == "json"))
                .collect();
            found.sort();
            out.extend(found.into_iter().map(|f| (f, false)));
        } else {
            out.push((p.clone(), true));
        }
    }
    Ok(out)
}

/// Parses a cv report; `None` for other JSON when scanning directories.
fn read_cv(path: &Path, explicit: bool) -> CliResult<Option<(Vec<u8>, CvReport)>> {
    let bytes = std::fs::read(path).map_err(|e| CliError::io(path, e))?;
    let v: serde_json::Value = match serde_json::from_slice(&bytes) {
        Ok(v) => v,
        Err(_) if !explicit => return Ok(None),
        Err(e) => return Err(CliError::schema(format!("{}: not valid JSON: {e}", path.display()))),
    };
    if v.get("command").and_then(serde_json::Value::as_str) != Some("cv") {
        if explicit {
            return Err(CliError::schema(format!("{} is not a cv report", path.display())));
        }
        return Ok(None);
    }
    let version = v.get("format_version").and_then(serde_json::Value::as_u64).unwrap_or(0);
    if version == 0 || version > FORMAT_VERSION {
        return Err(CliError::schema(format!("{}: format_version {version} is not supported", path.display())));
    }
    let result = v.get("result").cloned().unwrap_or_default();
    let r = serde_json::from_value(result).map_err(|e| CliError::schema(format!("{}: {e}", path.display())))?;
    Ok(Some((bytes, r)))
}

/// Best model per task by mean R² and by mean MAE, taken only from stored cv reports.
pub fn report(a: ReportArgs) -> CliResult<()> {
    let mut s = Session::start("report", &a.config, a.run)?;
    let opts = s.file.report.clone().merge(a.report);
    let inputs = opts.inputs.clone().filter(|v| !v.is_empty()).ok_or_else(|| CliError::validation("--inputs is required"))?;
    s.embed("report", &opts);

    let mut by_task: BTreeMap<LabelKind, Vec<Candidate>> = BTreeMap::new();
    for (path, explicit) in cv_files(&inputs)? {
        let Some((bytes, r)) = read_cv(&path, explicit)? else { continue };
        let source = path.display().to_string();
        s.add_digest(&source, source.clone(), &bytes);
        by_task.entry(r.task).or_default().push(Candidate {
            source,
            model: family_title(r.model.family()).to_string(),
            featurization: r.featurization.clone(),
            mean_r2: r.mean_r2,
            mean_mae: r.mean_mae,
        });
    }
    if by_task.is_empty() {
        return Err(CliError::validation("no cv reports found in the inputs"));
    }

    let mut rows = Vec::new();
    for (task, cands) in &by_task {
        // earliest candidate wins ties
        let best_r2 = cands.iter().fold(&cands[0], |b, c| if c.mean_r2 > b.mean_r2 { c } else { b });
        let best_mae = cands.iter().fold(&cands[0], |b, c| if c.mean_mae < b.mean_mae { c } else { b });
        rows.push(Row {
            category: task.title().into(),
            metric: "R2".into(),
            best_model: best_r2.model.clone(),
            value: best_r2.mean_r2,
            unit: String::new(),
            source: best_r2.source.clone(),
        });
        rows.push(Row {
            category: task.title().into(),
            metric: "MAE".into(),
            best_model: best_mae.model.clone(),
            value: best_mae.mean_mae,
            unit: task.unit().into(),
            source: best_mae.source.clone(),
        });
    }
    let csv = csv_bytes(
        &["category", "metric", "best_model", "value", "unit"],
        rows.iter().map(|r| {
            let value = if r.metric == "R2" { format!("{:.4}", r.value) } else { format!("{:.2}", r.value) };
            vec![r.category.clone(), r.metric.clone(), r.best_model.clone(), value, r.unit.clone()]
        }),
    );
    let overview = Overview {
        rows,
        candidates: by_task.into_iter().map(|(t, c)| (t.as_str().to_string(), c)).collect(),
    };
    let layout = s.layout("overview");
    s.write_report(layout.file("", "json"), &overview);
    s.write_bytes(layout.file("", "csv"), csv);
    s.commit()
}
