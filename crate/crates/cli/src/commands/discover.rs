use clap::Args;
use mamprop::data::{PostProcessing, Subprocess};
use mamprop::eqdiscovery::{
    evaluate_powerlaw, fit_powerlaw, target_dimension, ConstraintForm, PowerLawData, PowerLawOptions, QuantityTable,
    RecordFilter, DEFAULT_T0,
};

use crate::fail::{CliError, CliResult};
use crate::resolve::label;
use crate::session::{csv_bytes, fmt_f64, Session};
use crate::settings::{ConfigArg, DataOpts, DiscoverOpts, RunOpts};

#[derive(Debug, Args)]
pub struct DiscoverArgs {
    #[command(flatten)]
    pub config: ConfigArg,
    #[command(flatten)]
    pub data: DataOpts,
    #[command(flatten)]
    pub run: RunOpts,
    #[command(flatten)]
    pub discover: DiscoverOpts,
}

/// Dimensionally constrained power law for one label. Deterministic for a fixed seed.
pub fn discover(a: DiscoverArgs) -> CliResult<()> {
    let mut s = Session::start("discover", &a.config, a.run)?;
    let data = s.file.data.clone().merge(a.data);
    let mut opts = s.file.discover.clone().merge(a.discover);
    let lbl = label(opts.label.get_or_insert_with(|| "ys".into()))?;
    opts.label = Some(lbl.as_str().to_string());
    let cond_name = opts.condition.get_or_insert_with(|| "as-built".into()).clone();
    let condition = if cond_name.eq_ignore_ascii_case("any") {
        None
    } else {
        let c = PostProcessing::parse(&cond_name)
            .ok_or_else(|| CliError::validation(format!("unknown post-processing condition '{cond_name}'")))?;
        opts.condition = Some(c.as_str().into_owned());
        Some(c)
    };
    let subprocess = match &opts.subprocess {
        Some(name) => {
            let sp = Subprocess::parse(name)
                .ok_or_else(|| CliError::validation(format!("unknown subprocess '{name}'")))?;
            opts.subprocess = Some(sp.as_str().to_string());
            Some(sp)
        }
        None => None,
    };
    let t0 = *opts.t0.get_or_insert(DEFAULT_T0);
    let printed = *opts.paper_constraints.get_or_insert(false);
    let starts = *opts.starts.get_or_insert(PowerLawOptions::default().n_starts);
    s.embed("data", &data);
    s.embed("discover", &opts);

    let registry = s.registry(&data)?;
    let ds = s.records(&data, &registry)?;
    let table = QuantityTable::standard(t0);
    let pl = PowerLawData::from_dataset(&ds, &registry, &table, lbl, &RecordFilter { condition, subprocess })?;
    let fit_opts = PowerLawOptions {
        n_starts: starts,
        seed: s.seed,
        form: if printed { ConstraintForm::Printed } else { ConstraintForm::Derived },
        ..PowerLawOptions::default()
    };
    let model = fit_powerlaw(&pl, &table, lbl, &fit_opts)?;
    if !model.converged {
        eprintln!("warning: power-law refinement stopped at its iteration cap");
    }
    let (_, factor) = target_dimension(lbl)?;
    let pred = evaluate_powerlaw(&model, &pl.x)?;
    let rows = (0..pl.len())
        .map(|i| vec![pl.row_ids[i].to_string(), fmt_f64(pl.y[i] / factor), fmt_f64(pred[i] / factor)]);
    let csv = csv_bytes(&["row", "observed", "predicted"], rows);
    let layout = s.layout(&format!("powerlaw_{}", lbl.as_str()));
    s.write_report(layout.file("", "json"), &model);
    s.write_bytes(layout.file("", "csv"), csv);
    s.commit()
}
