use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::schema::{ColumnKind, FeatureMatrix, FeatureSchema};
use crate::data::{
    DataRecord, Dataset, ElementProperty, ElementTable, FeatureRequest, MaterialRegistry, MaterialSpec, NumericField,
    ThermalProperty,
};
use crate::error::{validation, Result};
use crate::linalg::Mat;

/// Which column families are appended to the baseline block.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scheme {
    #[default]
    Baseline,
    Composition,
    Elemental,
}

impl Scheme {
    pub const ALL: [Scheme; 3] = [Scheme::Baseline, Scheme::Composition, Scheme::Elemental];

    pub fn as_str(self) -> &'static str {
        match self {
            Scheme::Baseline => "baseline",
            Scheme::Composition => "baseline+composition",
            Scheme::Elemental => "baseline+elemental",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "baseline" => Some(Scheme::Baseline),
            "baseline+composition" | "composition" => Some(Scheme::Composition),
            "baseline+elemental" | "elemental" => Some(Scheme::Elemental),
            _ => None,
        }
    }
}

impl std::fmt::Display for Scheme {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Featurization scheme plus optional extra process columns.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeaturizationPlan {
    pub scheme: Scheme,
    /// process parameters beyond beam power and layer thickness
    #[serde(default)]
    pub extra_numeric: BTreeSet<NumericField>,
    #[serde(default)]
    pub standardize_onehot: bool,
}

impl FeaturizationPlan {
    pub fn new(scheme: Scheme) -> Self {
        FeaturizationPlan { scheme, ..Default::default() }
    }

    pub fn with_extra(mut self, field: NumericField) -> Self {
        self.extra_numeric.insert(field);
        self
    }

    pub fn numeric_fields(&self) -> Vec<NumericField> {
        let mut out = BASE_NUMERIC.to_vec();
        out.extend(self.extra_numeric.iter().filter(|f| !BASE_NUMERIC.contains(f)));
        out
    }

    /// Fields a record must carry to be featurized under this plan.
    pub fn request(&self) -> FeatureRequest {
        FeatureRequest {
            numeric: self.numeric_fields().into_iter().collect(),
            surface_condition: false,
        }
    }
}

const BASE_NUMERIC: [NumericField; 2] = [NumericField::BeamPower, NumericField::LayerThickness];

pub const ONE_HOT_GROUPS: [&str; 6] = ["material", "machine", "orientation", "post_processing", "process", "subprocess"];

fn level_of(r: &DataRecord, group: &str) -> String {
    match group {
        "material" => r.material.clone(),
        "machine" => r.machine.clone(),
        "orientation" => r.orientation.to_string(),
        "post_processing" => r.post_processing.to_string(),
        "process" => r.process.to_string(),
        "subprocess" => r.subprocess.to_string(),
        other => unreachable!("unknown one-hot group {other}"),
    }
}

fn numeric_column(quantity: &str, unit: &str) -> ColumnKind {
    ColumnKind::Numeric { quantity: quantity.into(), unit: unit.into() }
}

fn baseline_schema(ds: &Dataset, registry: &MaterialRegistry, plan: &FeaturizationPlan) -> FeatureSchema {
    let fields = plan.numeric_fields();
    let mut columns: Vec<ColumnKind> =
        fields[..2].iter().map(|f| numeric_column(f.name(), f.unit())).collect();
    columns.extend(ThermalProperty::ALL.iter().map(|p| numeric_column(p.name(), p.unit())));
    columns.extend(fields[2..].iter().map(|f| numeric_column(f.name(), f.unit())));
    for group in ONE_HOT_GROUPS {
        let levels: BTreeSet<String> = if group == "material" {
            registry.sorted_names().into_iter().collect()
        } else {
            ds.records().iter().map(|r| level_of(r, group)).collect()
        };
        let n = levels.len();
        columns.extend(levels.into_iter().map(|level| ColumnKind::OneHot { group: group.into(), level, n }));
    }
    FeatureSchema { columns }
}

/// Schema for `plan`: numeric block, sorted one-hot groups, then composition or elemental columns.
pub fn derive_schema(ds: &Dataset, registry: &MaterialRegistry, plan: &FeaturizationPlan) -> FeatureSchema {
    let mut schema = baseline_schema(ds, registry, plan);
    match plan.scheme {
        Scheme::Baseline => {}
        Scheme::Composition => schema.columns.extend(composition_schema(registry).columns),
        Scheme::Elemental => schema.columns.extend(elemental_schema().columns),
    }
    schema
}

fn composition_schema(registry: &MaterialRegistry) -> FeatureSchema {
    FeatureSchema {
        columns: registry
            .used_elements()
            .into_iter()
            .map(|element| ColumnKind::Composition { element })
            .collect(),
    }
}

fn elemental_schema() -> FeatureSchema {
    FeatureSchema {
        columns: ElementProperty::ALL
            .iter()
            .map(|p| ColumnKind::Elemental { property: p.name().into() })
            .collect(),
    }
}

/// Mixture rule: property-weighted sum with mass fractions normalized to one.
pub fn mixture(material: &MaterialSpec, elements: &ElementTable, property: ElementProperty) -> Result<f64> {
    let total = material.composition_total();
    if !(total > 0.0) {
        return Err(validation!("material '{}' has an empty composition", material.name));
    }
    let mut acc = 0.0;
    for (symbol, wt) in &material.composition {
        let e = elements
            .get(symbol)
            .ok_or_else(|| validation!("element '{symbol}' of material '{}' is missing from the element table", material.name))?;
        acc += property.of(e) * wt / total;
    }
    Ok(acc)
}

/// Context needed to evaluate any column kind.
#[derive(Clone, Copy)]
pub struct FeatureContext<'a> {
    pub registry: &'a MaterialRegistry,
    pub elements: Option<&'a ElementTable>,
}

/// Encodes `ds` against a frozen schema; unseen one-hot levels give an all-zero block and a warning.
pub fn encode(ds: &Dataset, schema: &FeatureSchema, ctx: FeatureContext<'_>) -> Result<(FeatureMatrix<f64>, Vec<String>)> {
    schema.validate()?;
    let known: BTreeMap<&str, BTreeSet<&str>> = schema.columns.iter().fold(BTreeMap::new(), |mut acc, c| {
        if let ColumnKind::OneHot { group, level, .. } = c {
            acc.entry(group.as_str()).or_default().insert(level.as_str());
        }
        acc
    });
    let rows: Vec<Result<Vec<f64>>> = (0..ds.len())
        .into_par_iter()
        .map(|i| encode_row(ds, i, schema, ctx))
        .collect();
    let mut data = Vec::with_capacity(ds.len() * schema.len());
    for r in rows {
        data.extend(r?);
    }
    let mut warnings = BTreeSet::new();
    for r in ds.records() {
        for (group, levels) in &known {
            let level = level_of(r, group);
            if !levels.contains(level.as_str()) {
                warnings.insert(format!("unseen level '{level}' in group '{group}' encoded as all zeros"));
            }
        }
    }
    let m = FeatureMatrix::new(Mat::from_rows(ds.len(), schema.len(), data), schema.clone(), (0..ds.len()).collect())?;
    Ok((m, warnings.into_iter().collect()))
}

fn encode_row(ds: &Dataset, i: usize, schema: &FeatureSchema, ctx: FeatureContext<'_>) -> Result<Vec<f64>> {
    let r = ds.record(i);
    let describe = || {
        let src = &ds.provenance()[i];
        if src.is_empty() {
            format!("record {i}")
        } else {
            format!("record {i} ('{src}')")
        }
    };
    let material = ctx
        .registry
        .get(&r.material)
        .ok_or_else(|| validation!("{}: unknown material '{}'", describe(), r.material))?;
    let mut out = Vec::with_capacity(schema.len());
    for c in &schema.columns {
        let v = match c {
            ColumnKind::Numeric { quantity, .. } => {
                if let Some(f) = NumericField::ALL.iter().find(|f| f.name() == quantity) {
                    r.numeric(*f)
                        .ok_or_else(|| validation!("{}: missing {quantity} (filter with select_complete first)", describe()))?
                } else if let Some(p) = ThermalProperty::ALL.iter().find(|p| p.name() == quantity) {
                    material.property(*p)
                } else {
                    return Err(validation!("unknown numeric feature '{quantity}'"));
                }
            }
            ColumnKind::OneHot { group, level, .. } => {
                if ONE_HOT_GROUPS.contains(&group.as_str()) {
                    f64::from(u8::from(level_of(r, group) == *level))
                } else {
                    return Err(validation!("unknown one-hot group '{group}'"));
                }
            }
            ColumnKind::Composition { element } => material.composition.get(element).copied().unwrap_or(0.0),
            ColumnKind::Elemental { property } => {
                let p = ElementProperty::ALL
                    .iter()
                    .find(|p| p.name() == property)
                    .ok_or_else(|| validation!("unknown elemental property '{property}'"))?;
                let elements = ctx
                    .elements
                    .ok_or_else(|| validation!("elemental features need an element table"))?;
                mixture(material, elements, *p)?
            }
        };
        out.push(v);
    }
    Ok(out)
}

/// Numeric block followed by one-hot groups over material, machine, orientation,
/// post-processing, process and subprocess.
pub fn baseline_features(ds: &Dataset, registry: &MaterialRegistry) -> Result<FeatureMatrix<f64>> {
    let plan = FeaturizationPlan::default();
    let schema = baseline_schema(ds, registry, &plan);
    Ok(encode(ds, &schema, FeatureContext { registry, elements: None })?.0)
}

/// Appends one wt% column per element used by any registered material.
pub fn composition_features(ds: &Dataset, registry: &MaterialRegistry, base: &FeatureMatrix<f64>) -> Result<FeatureMatrix<f64>> {
    let extra = encode(ds, &composition_schema(registry), FeatureContext { registry, elements: None })?.0;
    base.hstack(&extra.select_rows(base.row_ids()))
}

/// Appends the five mixture-rule elemental columns.
pub fn elemental_features(
    ds: &Dataset,
    registry: &MaterialRegistry,
    elements: &ElementTable,
    base: &FeatureMatrix<f64>,
) -> Result<FeatureMatrix<f64>> {
    elements.ensure_covers(registry)?;
    let extra = encode(ds, &elemental_schema(), FeatureContext { registry, elements: Some(elements) })?.0;
    base.hstack(&extra.select_rows(base.row_ids()))
}

/// Features for `plan` with the schema derived from `ds`.
pub fn build_features(
    ds: &Dataset,
    registry: &MaterialRegistry,
    elements: Option<&ElementTable>,
    plan: &FeaturizationPlan,
) -> Result<(FeatureMatrix<f64>, Vec<String>)> {
    if plan.scheme == Scheme::Elemental {
        match elements {
            Some(e) => e.ensure_covers(registry)?,
            None => return Err(validation!("the elemental scheme needs an element table")),
        }
    }
    let schema = derive_schema(ds, registry, plan);
    encode(ds, &schema, FeatureContext { registry, elements })
}
