use clap::Args;
use mamprop::data::{summarize_with_bins, LabelKind};
use mamprop::eqdiscovery::DEFAULT_T0;
use mamprop::evaluation::pearson_matrix;
use mamprop::synth::{powerlaw_dataset, sample_dataset, PowerLawSpec};
use serde::Serialize;

use crate::fail::{CliError, CliResult};
use crate::resolve::label;
use crate::session::{csv_bytes, fmt_f64, fmt_opt, Session};
use crate::settings::{ConfigArg, CorrOpts, DataOpts, RunOpts, StatsOpts, SynthOpts};

#[derive(Debug, Args)]
pub struct IngestArgs {
    #[command(flatten)]
    pub config: ConfigArg,
    #[command(flatten)]
    pub data: DataOpts,
    #[command(flatten)]
    pub run: RunOpts,
}

#[derive(Debug, Serialize)]
struct InvalidRecord {
    row: usize,
    source: String,
    problems: Vec<String>,
}

#[derive(Debug, Serialize)]
struct IngestSummary {
    materials: usize,
    elements: usize,
    records: usize,
    valid: usize,
    material_warnings: Vec<String>,
    element_coverage: Option<String>,
    invalid: Vec<InvalidRecord>,
}

/// Validates the three tables and writes the normalized valid records.
pub fn ingest(a: IngestArgs) -> CliResult<()> {
    let mut s = Session::start("ingest", &a.config, a.run)?;
    let data = s.file.data.clone().merge(a.data);
    s.embed("data", &data);
    let reg = s.registry(&data)?;
    let elements = s.elements(&data)?;
    let ds = s.records(&data, &reg)?;

    let invalid = ds
        .status()
        .iter()
        .enumerate()
        .filter_map(|(i, st)| match st {
            mamprop::data::RecordStatus::Invalid(p) => {
                Some(InvalidRecord { row: i, source: ds.provenance()[i].clone(), problems: p.clone() })
            }
            mamprop::data::RecordStatus::Valid => None,
        })
        .collect();
    let summary = IngestSummary {
        materials: reg.len(),
        elements: elements.len(),
        records: ds.len(),
        valid: ds.valid_count(),
        material_warnings: reg.warnings().to_vec(),
        element_coverage: elements.ensure_covers(&reg).err().map(|e| e.to_string()),
        invalid,
    };
    let valid: Vec<usize> = (0..ds.len()).filter(|&i| ds.status()[i].is_valid()).collect();
    let mut cleaned = Vec::new();
    ds.subset(&valid).write_csv(&mut cleaned)?;

    let layout = s.layout("ingest");
    s.write_report(layout.file("", "json"), &summary);
    s.write_bytes(layout.file("_records", "csv"), cleaned);
    s.commit()
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    #[command(flatten)]
    pub config: ConfigArg,
    #[command(flatten)]
    pub data: DataOpts,
    #[command(flatten)]
    pub run: RunOpts,
    #[command(flatten)]
    pub stats: StatsOpts,
}

/// Category counts and numeric histograms.
pub fn stats(a: StatsArgs) -> CliResult<()> {
    let mut s = Session::start("stats", &a.config, a.run)?;
    let data = s.file.data.clone().merge(a.data);
    let mut opts = s.file.stats.clone().merge(a.stats);
    let bins = *opts.bins.get_or_insert(mamprop::data::DEFAULT_BINS);
    s.embed("data", &data);
    s.embed("stats", &opts);
    let reg = s.registry(&data)?;
    let ds = s.records(&data, &reg)?;
    let st = summarize_with_bins(&ds, bins)?;

    let mut hist_rows = Vec::new();
    for (field, h) in &st.histograms {
        let edges = h.edges();
        for (b, c) in h.counts.iter().enumerate() {
            hist_rows.push(vec![field.clone(), b.to_string(), fmt_f64(edges[b]), fmt_f64(edges[b + 1]), c.to_string()]);
        }
    }
    let cat_rows = st
        .categories
        .iter()
        .flat_map(|(axis, levels)| levels.iter().map(move |(l, c)| vec![axis.clone(), l.clone(), c.to_string()]));

    let layout = s.layout("stats");
    s.write_report(layout.file("", "json"), &st);
    s.write_bytes(layout.file("_histograms", "csv"), csv_bytes(&["field", "bin", "lo", "hi", "count"], hist_rows));
    s.write_bytes(layout.file("_categories", "csv"), csv_bytes(&["axis", "level", "count"], cat_rows));
    s.commit()
}

#[derive(Debug, Args)]
pub struct CorrArgs {
    #[command(flatten)]
    pub config: ConfigArg,
    #[command(flatten)]
    pub data: DataOpts,
    #[command(flatten)]
    pub run: RunOpts,
    #[command(flatten)]
    pub corr: CorrOpts,
}

/// Pairwise-complete Pearson matrix over the label columns.
pub fn corr(a: CorrArgs) -> CliResult<()> {
    let mut s = Session::start("corr", &a.config, a.run)?;
    let data = s.file.data.clone().merge(a.data);
    let mut opts = s.file.corr.clone().merge(a.corr);
    let labels: Vec<LabelKind> = match &opts.labels {
        Some(names) => names.iter().map(|n| label(n)).collect::<CliResult<_>>()?,
        None => LabelKind::ALL.to_vec(),
    };
    opts.labels = Some(labels.iter().map(|l| l.as_str().to_string()).collect());
    s.embed("data", &data);
    s.embed("corr", &opts);
    let reg = s.registry(&data)?;
    let ds = s.records(&data, &reg)?;
    let m = pearson_matrix(&ds, &labels, opts.material.as_deref())?;

    let mut header = vec!["label"];
    header.extend(labels.iter().map(|l| l.as_str()));
    let rows = labels.iter().enumerate().map(|(i, l)| {
        let mut r = vec![l.as_str().to_string()];
        r.extend(m.values[i].iter().map(|v| fmt_opt(*v)));
        r
    });
    let layout = s.layout("corr");
    s.write_report(layout.file("", "json"), &m);
    s.write_bytes(layout.file("", "csv"), csv_bytes(&header, rows));
    s.commit()
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    #[command(flatten)]
    pub config: ConfigArg,
    #[command(flatten)]
    pub data: DataOpts,
    #[command(flatten)]
    pub run: RunOpts,
    #[command(flatten)]
    pub synth: SynthOpts,
}

#[derive(Debug, Serialize)]
struct SynthSummary {
    kind: String,
    records: usize,
    sha256: String,
}

/// Generates a record table: a mixed-process sample or power-law labelled rows.
pub fn synth(a: SynthArgs) -> CliResult<()> {
    let mut s = Session::start("synth", &a.config, a.run)?;
    let data = s.file.data.clone().merge(a.data);
    let mut opts = s.file.synth.clone().merge(a.synth);
    let kind = opts.kind.get_or_insert_with(|| "sample".into()).to_ascii_lowercase();
    let reg = s.registry(&data)?;
    let ds = match kind.as_str() {
        "sample" => {
            let n = *opts.n.get_or_insert(240);
            sample_dataset(&reg, n, s.seed)?
        }
        "oracle" | "as-built-ys" => {
            let n = *opts.n.get_or_insert(200);
            let nm = *opts.n_materials.get_or_insert(8);
            let noise = *opts.noise.get_or_insert(0.01);
            let t0 = *opts.t0.get_or_insert(DEFAULT_T0);
            let spec =
                if kind == "oracle" { PowerLawSpec::pressure_oracle(noise) } else { PowerLawSpec::as_built_ys(noise) };
            powerlaw_dataset(&reg, &spec, n, nm, t0, s.seed)?
        }
        other => {
            return Err(CliError::validation(format!("unknown synth kind '{other}'; expected sample, oracle or as-built-ys")))
        }
    };
    s.embed("data", &data);
    s.embed("synth", &opts);
    let mut bytes = Vec::new();
    ds.write_csv(&mut bytes)?;
    let summary = SynthSummary { kind, records: ds.len(), sha256: crate::session::sha256_hex(&bytes) };
    let layout = s.layout("records");
    s.write_bytes(layout.file("", "csv"), bytes);
    s.write_report(layout.file("", "json"), &summary);
    s.commit()
}
