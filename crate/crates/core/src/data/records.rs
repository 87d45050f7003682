use std::collections::BTreeSet;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::csvio::{self, Table};
use super::{LabelKind, MaterialRegistry, Orientation, PostProcessing, Process, Subprocess, SurfaceCondition};
use crate::error::{schema, validation, Error, Result};

const COLUMNS: [&str; 19] = [
    "source",
    "material",
    "process",
    "subprocess",
    "machine",
    "orientation",
    "post_processing",
    "surface_condition",
    "beam_power",
    "scan_speed",
    "layer_thickness",
    "beam_diameter",
    "ys",
    "uts",
    "e_mod",
    "elongation",
    "hv",
    "hrc",
    "rz",
];

/// Numeric processing parameters a record may carry.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum NumericField {
    BeamPower,
    ScanSpeed,
    LayerThickness,
    BeamDiameter,
}

impl NumericField {
    pub const ALL: [NumericField; 4] = [
        NumericField::BeamPower,
        NumericField::ScanSpeed,
        NumericField::LayerThickness,
        NumericField::BeamDiameter,
    ];

    pub fn name(self) -> &'static str {
        match self {
            NumericField::BeamPower => "beam_power",
            NumericField::ScanSpeed => "scan_speed",
            NumericField::LayerThickness => "layer_thickness",
            NumericField::BeamDiameter => "beam_diameter",
        }
    }

    pub fn unit(self) -> &'static str {
        match self {
            NumericField::BeamPower => "W",
            NumericField::ScanSpeed => "mm/s",
            NumericField::LayerThickness | NumericField::BeamDiameter => "um",
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Labels {
    pub ys: Option<f64>,
    pub uts: Option<f64>,
    pub e_mod: Option<f64>,
    pub elongation: Option<f64>,
    pub hv: Option<f64>,
    pub hrc: Option<f64>,
    pub rz: Option<f64>,
}

impl Labels {
    pub fn get(&self, kind: LabelKind) -> Option<f64> {
        *self.slot(kind)
    }

    pub fn set(&mut self, kind: LabelKind, v: Option<f64>) {
        *self.slot_mut(kind) = v;
    }

    fn slot(&self, kind: LabelKind) -> &Option<f64> {
        match kind {
            LabelKind::Ys => &self.ys,
            LabelKind::Uts => &self.uts,
            LabelKind::EMod => &self.e_mod,
            LabelKind::Elongation => &self.elongation,
            LabelKind::Hv => &self.hv,
            LabelKind::Hrc => &self.hrc,
            LabelKind::Rz => &self.rz,
        }
    }

    fn slot_mut(&mut self, kind: LabelKind) -> &mut Option<f64> {
        match kind {
            LabelKind::Ys => &mut self.ys,
            LabelKind::Uts => &mut self.uts,
            LabelKind::EMod => &mut self.e_mod,
            LabelKind::Elongation => &mut self.elongation,
            LabelKind::Hv => &mut self.hv,
            LabelKind::Hrc => &mut self.hrc,
            LabelKind::Rz => &mut self.rz,
        }
    }

    pub fn any(&self) -> bool {
        LabelKind::ALL.iter().any(|&k| self.get(k).is_some())
    }
}

/// One experiment.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DataRecord {
    pub material: String,
    pub process: Process,
    pub subprocess: Subprocess,
    pub machine: String,
    pub orientation: Orientation,
    pub post_processing: PostProcessing,
    pub surface_condition: Option<SurfaceCondition>,
    /// W
    pub beam_power: Option<f64>,
    /// mm/s
    pub scan_speed: Option<f64>,
    /// µm
    pub layer_thickness: Option<f64>,
    /// µm
    pub beam_diameter: Option<f64>,
    pub labels: Labels,
}

impl DataRecord {
    pub fn numeric(&self, field: NumericField) -> Option<f64> {
        match field {
            NumericField::BeamPower => self.beam_power,
            NumericField::ScanSpeed => self.scan_speed,
            NumericField::LayerThickness => self.layer_thickness,
            NumericField::BeamDiameter => self.beam_diameter,
        }
    }

    pub fn label(&self, kind: LabelKind) -> Option<f64> {
        self.labels.get(kind)
    }

    pub fn validate(&self) -> RecordStatus {
        let mut problems = Vec::new();
        for f in NumericField::ALL {
            if let Some(v) = self.numeric(f) {
                if !(v > 0.0) {
                    problems.push(format!("{} must be strictly positive, got {v}", f.name()));
                }
            }
        }
        for k in LabelKind::ALL {
            if let Some(v) = self.label(*k) {
                if !(v > 0.0) {
                    problems.push(format!("label {} must be strictly positive, got {v}", k.as_str()));
                }
            }
        }
        if !self.labels.any() {
            problems.push("record carries no label".to_string());
        }
        if self.subprocess.process() != self.process {
            problems.push(format!(
                "subprocess {} does not belong to process {}",
                self.subprocess, self.process
            ));
        }
        if self.machine.trim().is_empty() {
            problems.push("machine is empty".to_string());
        }
        if problems.is_empty() {
            RecordStatus::Valid
        } else {
            RecordStatus::Invalid(problems)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum RecordStatus {
    Valid,
    Invalid(Vec<String>),
}

impl RecordStatus {
    pub fn is_valid(&self) -> bool {
        matches!(self, RecordStatus::Valid)
    }
}

/// What to do with a post-processing level that is not recognised.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum UnknownLevelPolicy {
    #[default]
    Reject,
    MapToOther,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct LoadOptions {
    /// invalid records become load errors
    pub strict: bool,
    pub unknown_levels: UnknownLevelPolicy,
}

/// Ordered records with a source tag and validation status each.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Dataset {
    records: Vec<DataRecord>,
    provenance: Vec<String>,
    status: Vec<RecordStatus>,
}

impl Dataset {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, record: DataRecord, source: impl Into<String>) {
        self.status.push(record.validate());
        self.records.push(record);
        self.provenance.push(source.into());
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn records(&self) -> &[DataRecord] {
        &self.records
    }

    pub fn record(&self, i: usize) -> &DataRecord {
        &self.records[i]
    }

    pub fn provenance(&self) -> &[String] {
        &self.provenance
    }

    pub fn status(&self) -> &[RecordStatus] {
        &self.status
    }

    pub fn valid_count(&self) -> usize {
        self.status.iter().filter(|s| s.is_valid()).count()
    }

    pub fn iter_valid(&self) -> impl Iterator<Item = &DataRecord> {
        self.records
            .iter()
            .zip(&self.status)
            .filter(|(_, s)| s.is_valid())
            .map(|(r, _)| r)
    }

    /// Records at `indices`, in the given order.
    pub fn subset(&self, indices: &[usize]) -> Dataset {
        Dataset {
            records: indices.iter().map(|&i| self.records[i].clone()).collect(),
            provenance: indices.iter().map(|&i| self.provenance[i].clone()).collect(),
            status: indices.iter().map(|&i| self.status[i].clone()).collect(),
        }
    }

    pub fn labels(&self, kind: LabelKind) -> Vec<Option<f64>> {
        self.records.iter().map(|r| r.label(kind)).collect()
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csvio::writer(w);
        out.write_record(COLUMNS).map_err(csvio::csv_err)?;
        for (r, src) in self.records.iter().zip(&self.provenance) {
            let mut row = vec![
                src.clone(),
                r.material.clone(),
                r.process.as_str().to_string(),
                r.subprocess.as_str().to_string(),
                r.machine.clone(),
                r.orientation.as_str().to_string(),
                r.post_processing.as_str().into_owned(),
                r.surface_condition.map(|s| s.as_str().to_string()).unwrap_or_default(),
            ];
            row.extend(NumericField::ALL.iter().map(|&f| csvio::fmt_opt(r.numeric(f))));
            row.extend(LabelKind::ALL.iter().map(|&k| csvio::fmt_opt(r.label(k))));
            out.write_record(&row).map_err(csvio::csv_err)?;
        }
        out.flush().map_err(|e| Error::io("<csv writer>", e))?;
        Ok(())
    }

    pub fn from_csv_bytes(bytes: &[u8], registry: &MaterialRegistry, opts: LoadOptions) -> Result<Self> {
        parse(Table::read_bytes(bytes)?, registry, opts)
    }
}

/// Loads `records.csv`, resolving materials against `registry`.
pub fn load_dataset(path: impl AsRef<Path>, registry: &MaterialRegistry, opts: LoadOptions) -> Result<Dataset> {
    let path = path.as_ref();
    parse(Table::read_path(path)?, registry, opts).map_err(|e| match e {
        Error::Schema(m) => schema!("{}: {m}", path.display()),
        Error::Validation(m) => validation!("{}: {m}", path.display()),
        other => other,
    })
}

fn parse(table: Table, registry: &MaterialRegistry, opts: LoadOptions) -> Result<Dataset> {
    let col = |name: &str| table.require(name);
    let c_material = col("material")?;
    let c_subprocess = col("subprocess")?;
    let c_machine = col("machine")?;
    let c_orientation = col("orientation")?;
    let c_post = col("post_processing")?;
    let c_source = table.column("source");
    let c_process = table.column("process");
    let c_surface = table.column("surface_condition");
    let numeric_cols: Vec<Option<usize>> = NumericField::ALL.iter().map(|f| table.column(f.name())).collect();
    let label_cols: Vec<Option<usize>> = LabelKind::ALL.iter().map(|k| table.column(k.as_str())).collect();

    let mut ds = Dataset::new();
    for (line, rec) in &table.rows {
        let line = *line;
        let get = |c: usize| csvio::cell(rec, c);
        let material = get(c_material).to_string();
        if registry.get(&material).is_none() {
            return Err(validation!("line {line}: unknown material '{material}'"));
        }
        let level_err = |col: &str, raw: &str| schema!("line {line}, column '{col}': unknown level '{raw}'");
        let subprocess = Subprocess::parse(get(c_subprocess))
            .ok_or_else(|| level_err("subprocess", get(c_subprocess)))?;
        let process = match c_process.map(get).filter(|s| !s.is_empty()) {
            Some(raw) => Process::parse(raw).ok_or_else(|| level_err("process", raw))?,
            None => subprocess.process(),
        };
        let orientation = Orientation::parse(get(c_orientation))
            .ok_or_else(|| level_err("orientation", get(c_orientation)))?;
        let raw_post = get(c_post);
        let post_processing = match PostProcessing::parse(raw_post) {
            Some(p) => p,
            None if opts.unknown_levels == UnknownLevelPolicy::MapToOther && !raw_post.is_empty() => {
                PostProcessing::Other(raw_post.to_string())
            }
            None => return Err(level_err("post_processing", raw_post)),
        };
        let surface_condition = match c_surface.map(get).filter(|s| !s.is_empty()) {
            Some(raw) => Some(SurfaceCondition::parse(raw).ok_or_else(|| level_err("surface_condition", raw))?),
            None => None,
        };
        let mut numeric = [None; 4];
        for (slot, (f, c)) in numeric.iter_mut().zip(NumericField::ALL.iter().zip(&numeric_cols)) {
            if let Some(c) = c {
                *slot = csvio::opt_number(rec, line, *c, f.name())?;
            }
        }
        let mut labels = Labels::default();
        for (k, c) in LabelKind::ALL.iter().zip(&label_cols) {
            if let Some(c) = c {
                labels.set(*k, csvio::opt_number(rec, line, *c, k.as_str())?);
            }
        }
        let record = DataRecord {
            material,
            process,
            subprocess,
            machine: get(c_machine).to_string(),
            orientation,
            post_processing,
            surface_condition,
            beam_power: numeric[0],
            scan_speed: numeric[1],
            layer_thickness: numeric[2],
            beam_diameter: numeric[3],
            labels,
        };
        let source = c_source.map(get).unwrap_or("").to_string();
        ds.push(record, source);
        if opts.strict {
            if let Some(RecordStatus::Invalid(problems)) = ds.status.last() {
                return Err(validation!("line {line}: {}", problems.join("; ")));
            }
        }
    }
    Ok(ds)
}

/// Which optional fields a featurization needs.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureRequest {
    pub numeric: BTreeSet<NumericField>,
    pub surface_condition: bool,
}

impl FeatureRequest {
    pub fn none() -> Self {
        Self::default()
    }

    pub fn with(mut self, field: NumericField) -> Self {
        self.numeric.insert(field);
        self
    }

    pub fn satisfied_by(&self, r: &DataRecord) -> bool {
        self.numeric.iter().all(|&f| r.numeric(f).is_some())
            && (!self.surface_condition || r.surface_condition.is_some())
    }
}

/// Valid records carrying `label` and every requested field, in original order.
pub fn select_complete(ds: &Dataset, required: &FeatureRequest, label: LabelKind) -> Dataset {
    let keep: Vec<usize> = (0..ds.len())
        .filter(|&i| {
            let r = &ds.records[i];
            ds.status[i].is_valid() && r.label(label).is_some() && required.satisfied_by(r)
        })
        .collect();
    ds.subset(&keep)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::MaterialSpec;

    fn registry() -> MaterialRegistry {
        let mut reg = MaterialRegistry::new(vec![]);
        for (name, comp) in [("Ti6Al4V ELI", vec![("Al", 6.0), ("Ti", 90.0), ("V", 4.0)]), ("IN718", vec![("Ni", 100.0)])] {
            reg.insert(
                MaterialSpec {
                    name: name.into(),
                    composition: comp.into_iter().map(|(k, v)| (k.to_string(), v)).collect(),
                    density: 4.42,
                    specific_heat: 526.0,
                    thermal_conductivity: 7.0,
                    melting_temperature: 1650.0,
                    cte: 8.5,
                },
                false,
            )
            .unwrap();
        }
        reg
    }

    const HEADER: &str = "source,material,process,subprocess,machine,orientation,post_processing,surface_condition,beam_power,scan_speed,layer_thickness,beam_diameter,ys,uts,e_mod,elongation,hv,hrc,rz\n";

    fn load(body: &str, opts: LoadOptions) -> Result<Dataset> {
        Dataset::from_csv_bytes(format!("{HEADER}{body}").as_bytes(), &registry(), opts)
    }

    #[test]
    fn data_point_300_is_valid() {
        let ds = load(
            "lit-300,Ti6Al4V ELI,PBF,L-PBF,EOS M4OO SF,XY,as-built,,1000,,30,,950,,,,,,\n",
            LoadOptions::default(),
        )
        .unwrap();
        assert_eq!(ds.len(), 1);
        assert!(ds.status()[0].is_valid());
        let r = ds.record(0);
        assert_eq!(r.orientation, Orientation::Horizontal);
        assert_eq!(r.post_processing, PostProcessing::AsBuilt);
        assert_eq!(r.beam_power, Some(1000.0));
        assert_eq!(r.layer_thickness, Some(30.0));
        assert_eq!(r.machine, "EOS M4OO SF");
    }

    #[test]
    fn negative_power_and_missing_label_are_invalid() {
        let ds = load(
            "a,IN718,PBF,L-PBF,M,Z,HT,,-5,,30,,900,,,,,,\nb,IN718,PBF,L-PBF,M,Z,HT,,200,,30,,,,,,,,\n",
            LoadOptions::default(),
        )
        .unwrap();
        assert!(matches!(&ds.status()[0], RecordStatus::Invalid(p) if p[0].contains("beam_power")));
        assert!(matches!(&ds.status()[1], RecordStatus::Invalid(p) if p[0].contains("no label")));
        let strict = load("a,IN718,PBF,L-PBF,M,Z,HT,,-5,,30,,900,,,,,,\n", LoadOptions { strict: true, ..Default::default() });
        assert!(strict.is_err());
    }

    #[test]
    fn unknown_material_is_an_error() {
        let err = load("a,Unobtainium,PBF,L-PBF,M,Z,HT,,200,,30,,900,,,,,,\n", LoadOptions::default()).unwrap_err();
        assert!(err.to_string().contains("Unobtainium"));
    }

    #[test]
    fn unknown_post_processing_policy() {
        let body = "a,IN718,PBF,L-PBF,M,Z,aged,,200,,30,,900,,,,,,\n";
        assert!(load(body, LoadOptions::default()).is_err());
        let ds = load(body, LoadOptions { unknown_levels: UnknownLevelPolicy::MapToOther, ..Default::default() }).unwrap();
        assert_eq!(ds.record(0).post_processing, PostProcessing::Other("aged".into()));
    }

    #[test]
    fn select_complete_filters_and_preserves_order() {
        let ds = load(
            "a,IN718,PBF,L-PBF,M,Z,HT,,200,800,30,,900,,,,,,\nb,IN718,PBF,L-PBF,M,Z,HT,,200,,30,,910,,,,,,\nc,IN718,PBF,L-PBF,M,Z,HT,,200,700,30,,920,,,,,,\n",
            LoadOptions::default(),
        )
        .unwrap();
        let req = FeatureRequest::none().with(NumericField::ScanSpeed);
        let sel = select_complete(&ds, &req, LabelKind::Ys);
        assert_eq!(sel.provenance(), &["a".to_string(), "c".to_string()]);
        assert_eq!(select_complete(&ds, &FeatureRequest::none(), LabelKind::Ys).len(), 3);
        assert_eq!(select_complete(&ds, &FeatureRequest::none(), LabelKind::Uts).len(), 0);
        let all = FeatureRequest::none().with(NumericField::BeamPower);
        assert_eq!(select_complete(&ds, &all, LabelKind::Ys), ds);
    }

    #[test]
    fn csv_round_trip_is_byte_stable() {
        let ds = load(
            "a,IN718,PBF,L-PBF,M,Z,other:aged,bead_blasted,200,800.5,30,,900,1000.25,,12,,,\nb,Ti6Al4V ELI,DED,L-DED,Optomec,45,SR,,1500,,500,800,,,110,,330,,\n",
            LoadOptions::default(),
        )
        .unwrap();
        let mut first = Vec::new();
        ds.write_csv(&mut first).unwrap();
        let again = Dataset::from_csv_bytes(&first, &registry(), LoadOptions::default()).unwrap();
        let mut second = Vec::new();
        again.write_csv(&mut second).unwrap();
        assert_eq!(first, second);
        assert_eq!(again, ds);
    }
}
