use std::collections::BTreeSet;
use std::io::Write;
use std::ops::Range;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{validation, Error, Result};
use crate::linalg::Mat;
use crate::scalar::Real;

/// Where a feature column comes from.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ColumnKind {
    Numeric { quantity: String, unit: String },
    OneHot { group: String, level: String, n: usize },
    Composition { element: String },
    Elemental { property: String },
}

impl ColumnKind {
    /// Numeric-origin columns are the ones standardized by default.
    pub fn is_numeric_origin(&self) -> bool {
        !matches!(self, ColumnKind::OneHot { .. })
    }

    pub fn name(&self) -> String {
        match self {
            ColumnKind::Numeric { quantity, .. } => quantity.clone(),
            ColumnKind::OneHot { group, level, .. } => format!("{group}={level}"),
            ColumnKind::Composition { element } => format!("wt_{element}"),
            ColumnKind::Elemental { property } => format!("mix_{property}"),
        }
    }

    /// Group used for drop-column ablation and SHAP aggregation.
    pub fn group(&self) -> String {
        match self {
            ColumnKind::OneHot { group, .. } => group.clone(),
            other => other.name(),
        }
    }
}

/// A contiguous run of columns dropped or aggregated as a unit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureGroup {
    pub name: String,
    pub columns: Range<usize>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeatureSchema {
    pub columns: Vec<ColumnKind>,
}

impl FeatureSchema {
    pub fn new(columns: Vec<ColumnKind>) -> Result<Self> {
        let s = FeatureSchema { columns };
        s.validate()?;
        Ok(s)
    }

    /// Plain numeric columns, for matrices that do not come from records.
    pub fn numeric<S: AsRef<str>>(names: &[S]) -> Self {
        FeatureSchema {
            columns: names
                .iter()
                .map(|n| ColumnKind::Numeric {
                    quantity: n.as_ref().to_string(),
                    unit: String::new(),
                })
                .collect(),
        }
    }

    pub fn anonymous(n: usize) -> Self {
        let names: Vec<String> = (0..n).map(|i| format!("x{i}")).collect();
        Self::numeric(&names)
    }

    pub fn len(&self) -> usize {
        self.columns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.columns.is_empty()
    }

    pub fn names(&self) -> Vec<String> {
        self.columns.iter().map(ColumnKind::name).collect()
    }

    pub fn position(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c.name() == name)
    }

    pub fn validate(&self) -> Result<()> {
        let mut seen = BTreeSet::new();
        for c in &self.columns {
            let name = c.name();
            if !seen.insert(name.clone()) {
                return Err(validation!("duplicate feature column '{name}'"));
            }
        }
        let mut i = 0;
        while i < self.columns.len() {
            if let ColumnKind::OneHot { group, n, .. } = &self.columns[i] {
                let end = i + n;
                let ok = *n >= 1
                    && end <= self.columns.len()
                    && self.columns[i..end]
                        .iter()
                        .all(|c| matches!(c, ColumnKind::OneHot { group: g, n: m, .. } if g == group && m == n));
                if !ok {
                    return Err(validation!("one-hot group '{group}' does not occupy {n} consecutive columns"));
                }
                i = end;
            } else {
                i += 1;
            }
        }
        Ok(())
    }

    /// Consecutive column groups in schema order.
    pub fn groups(&self) -> Vec<FeatureGroup> {
        let mut out: Vec<FeatureGroup> = Vec::new();
        for (j, c) in self.columns.iter().enumerate() {
            let g = c.group();
            let extend = matches!(c, ColumnKind::OneHot { .. })
                && out.last().is_some_and(|last| last.name == g && last.columns.end == j);
            if extend {
                out.last_mut().unwrap().columns.end = j + 1;
            } else {
                out.push(FeatureGroup { name: g, columns: j..j + 1 });
            }
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("schema serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let schema: FeatureSchema =
            serde_json::from_str(s).map_err(|e| Error::Schema(format!("invalid feature schema: {e}")))?;
        schema.validate()?;
        Ok(schema)
    }

    /// Hex sha256 of the compact JSON form.
    pub fn fingerprint(&self) -> String {
        let json = serde_json::to_vec(self).expect("schema serializes");
        hex(&Sha256::digest(&json))
    }

    pub fn without(&self, drop: &Range<usize>) -> FeatureSchema {
        FeatureSchema {
            columns: self
                .columns
                .iter()
                .enumerate()
                .filter(|(j, _)| !drop.contains(j))
                .map(|(_, c)| c.clone())
                .collect(),
        }
    }

    pub fn concat(&self, other: &FeatureSchema) -> Result<FeatureSchema> {
        let mut columns = self.columns.clone();
        columns.extend(other.columns.iter().cloned());
        FeatureSchema::new(columns)
    }
}

pub(crate) fn hex(bytes: &[u8]) -> String {
    bytes.iter().map(|b| format!("{b:02x}")).collect()
}

/// Model inputs: finite values, a schema, and the record index of every row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureMatrix<T> {
    values: Mat<T>,
    schema: FeatureSchema,
    row_ids: Vec<usize>,
}

impl<T: Real> FeatureMatrix<T> {
    pub fn new(values: Mat<T>, schema: FeatureSchema, row_ids: Vec<usize>) -> Result<Self> {
        if values.cols != schema.len() {
            return Err(validation!(
                "matrix has {} columns but schema has {}",
                values.cols,
                schema.len()
            ));
        }
        if values.rows != row_ids.len() {
            return Err(validation!("matrix has {} rows but {} row ids", values.rows, row_ids.len()));
        }
        if let Some(pos) = values.data.iter().position(|v| !v.is_finite()) {
            return Err(validation!(
                "non-finite feature value at row {}, column '{}'",
                pos / values.cols.max(1),
                schema.columns[pos % values.cols.max(1)].name()
            ));
        }
        Ok(FeatureMatrix { values, schema, row_ids })
    }

    /// Row-major rows with a numeric schema `x0..`; row ids are `0..n`.
    pub fn from_rows(rows: &[Vec<T>]) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != cols) {
            return Err(validation!("ragged feature rows"));
        }
        let data = rows.iter().flatten().copied().collect();
        Self::new(Mat::from_rows(rows.len(), cols, data), FeatureSchema::anonymous(cols), (0..rows.len()).collect())
    }

    pub fn with_schema(self, schema: FeatureSchema) -> Result<Self> {
        Self::new(self.values, schema, self.row_ids)
    }

    pub fn rows(&self) -> usize {
        self.values.rows
    }

    pub fn cols(&self) -> usize {
        self.values.cols
    }

    pub fn row(&self, i: usize) -> &[T] {
        self.values.row(i)
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        self.values[(i, j)]
    }

    pub fn column(&self, j: usize) -> Vec<T> {
        (0..self.rows()).map(|i| self.values[(i, j)]).collect()
    }

    pub fn values(&self) -> &Mat<T> {
        &self.values
    }

    pub fn schema(&self) -> &FeatureSchema {
        &self.schema
    }

    pub fn row_ids(&self) -> &[usize] {
        &self.row_ids
    }

    pub fn fingerprint(&self) -> String {
        self.schema.fingerprint()
    }

    pub fn select_rows(&self, idx: &[usize]) -> Self {
        let mut data = Vec::with_capacity(idx.len() * self.cols());
        for &i in idx {
            data.extend_from_slice(self.row(i));
        }
        FeatureMatrix {
            values: Mat::from_rows(idx.len(), self.cols(), data),
            schema: self.schema.clone(),
            row_ids: idx.iter().map(|&i| self.row_ids[i]).collect(),
        }
    }

    pub fn drop_columns(&self, drop: &Range<usize>) -> Self {
        let keep: Vec<usize> = (0..self.cols()).filter(|j| !drop.contains(j)).collect();
        let mut data = Vec::with_capacity(self.rows() * keep.len());
        for i in 0..self.rows() {
            let r = self.row(i);
            data.extend(keep.iter().map(|&j| r[j]));
        }
        FeatureMatrix {
            values: Mat::from_rows(self.rows(), keep.len(), data),
            schema: self.schema.without(drop),
            row_ids: self.row_ids.clone(),
        }
    }

    /// Column-wise concatenation; both matrices must describe the same rows.
    pub fn hstack(&self, other: &FeatureMatrix<T>) -> Result<Self> {
        if self.row_ids != other.row_ids {
            return Err(validation!("cannot join feature matrices over different rows"));
        }
        let schema = self.schema.concat(&other.schema)?;
        let cols = self.cols() + other.cols();
        let mut data = Vec::with_capacity(self.rows() * cols);
        for i in 0..self.rows() {
            data.extend_from_slice(self.row(i));
            data.extend_from_slice(other.row(i));
        }
        Ok(FeatureMatrix {
            values: Mat::from_rows(self.rows(), cols, data),
            schema,
            row_ids: self.row_ids.clone(),
        })
    }

    pub fn map_values(&self, mut f: impl FnMut(usize, T) -> T) -> Self {
        let cols = self.cols().max(1);
        let data = self.values.data.iter().enumerate().map(|(k, &v)| f(k % cols, v)).collect();
        FeatureMatrix {
            values: Mat::from_rows(self.rows(), self.cols(), data),
            schema: self.schema.clone(),
            row_ids: self.row_ids.clone(),
        }
    }

    pub fn cast<U: Real>(&self) -> FeatureMatrix<U> {
        FeatureMatrix {
            values: Mat::from_rows(
                self.rows(),
                self.cols(),
                self.values.data.iter().map(|v| U::lit(v.as_f64())).collect(),
            ),
            schema: self.schema.clone(),
            row_ids: self.row_ids.clone(),
        }
    }

    /// CSV with the column names as header and a leading `row_id` column.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csv::WriterBuilder::new().has_headers(false).from_writer(w);
        let mut header = vec!["row_id".to_string()];
        header.extend(self.schema.names());
        out.write_record(&header).map_err(csv_error)?;
        for i in 0..self.rows() {
            let mut rec = vec![self.row_ids[i].to_string()];
            rec.extend(self.row(i).iter().map(|v| v.to_string()));
            out.write_record(&rec).map_err(csv_error)?;
        }
        out.flush().map_err(|e| Error::Io { path: "<feature csv>".into(), source: e })?;
        Ok(())
    }
}

fn csv_error(e: csv::Error) -> Error {
    Error::Schema(format!("csv write failed: {e}"))
}
