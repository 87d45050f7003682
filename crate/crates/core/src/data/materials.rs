use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::csvio::{self, Table};
use crate::error::{schema, validation, Result};

const PROPERTY_COLUMNS: [&str; 6] = [
    "name",
    "density",
    "thermal_conductivity",
    "melting_temperature",
    "cte",
    "specific_heat",
];

/// One alloy: composition in wt% plus thermal properties in literature units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MaterialSpec {
    pub name: String,
    /// element symbol → wt%; only non-zero entries are kept
    pub composition: BTreeMap<String, f64>,
    /// g/cm³ (multiply by 1000 for kg/m³)
    pub density: f64,
    /// J/(kg·K)
    pub specific_heat: f64,
    /// W/(m·K)
    pub thermal_conductivity: f64,
    /// °C
    pub melting_temperature: f64,
    /// 1e-6/K
    pub cte: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ThermalProperty {
    Density,
    MeltingPoint,
    ThermalConductivity,
    SpecificHeat,
    Cte,
}

impl ThermalProperty {
    pub const ALL: [ThermalProperty; 5] = [
        ThermalProperty::Density,
        ThermalProperty::MeltingPoint,
        ThermalProperty::ThermalConductivity,
        ThermalProperty::SpecificHeat,
        ThermalProperty::Cte,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ThermalProperty::Density => "density",
            ThermalProperty::MeltingPoint => "melting_point",
            ThermalProperty::ThermalConductivity => "thermal_conductivity",
            ThermalProperty::SpecificHeat => "specific_heat",
            ThermalProperty::Cte => "cte",
        }
    }

    pub fn unit(self) -> &'static str {
        match self {
            ThermalProperty::Density => "g/cm3",
            ThermalProperty::MeltingPoint => "degC",
            ThermalProperty::ThermalConductivity => "W/(m K)",
            ThermalProperty::SpecificHeat => "J/(kg K)",
            ThermalProperty::Cte => "1e-6/K",
        }
    }

    /// Range outside which a value draws a plausibility warning.
    fn plausible(self) -> (f64, f64) {
        match self {
            ThermalProperty::Density => (0.5, 25.0),
            ThermalProperty::MeltingPoint => (400.0, 3500.0),
            ThermalProperty::ThermalConductivity => (0.5, 500.0),
            ThermalProperty::SpecificHeat => (50.0, 3000.0),
            ThermalProperty::Cte => (0.1, 50.0),
        }
    }
}

impl MaterialSpec {
    pub fn property(&self, p: ThermalProperty) -> f64 {
        match p {
            ThermalProperty::Density => self.density,
            ThermalProperty::MeltingPoint => self.melting_temperature,
            ThermalProperty::ThermalConductivity => self.thermal_conductivity,
            ThermalProperty::SpecificHeat => self.specific_heat,
            ThermalProperty::Cte => self.cte,
        }
    }

    pub fn composition_total(&self) -> f64 {
        self.composition.values().sum()
    }

    /// Hard invariant violations (always fatal).
    fn check_invariants(&self) -> Result<()> {
        for p in ThermalProperty::ALL {
            let v = self.property(p);
            if !(v > 0.0) {
                return Err(validation!(
                    "material '{}': {} must be strictly positive, got {v}",
                    self.name,
                    p.name()
                ));
            }
        }
        if let Some((el, v)) = self.composition.iter().find(|(_, v)| **v < 0.0) {
            return Err(validation!(
                "material '{}': negative composition {el} = {v}",
                self.name
            ));
        }
        Ok(())
    }

    /// Soft plausibility findings.
    fn plausibility_warnings(&self) -> Vec<String> {
        let mut out = Vec::new();
        for p in ThermalProperty::ALL {
            let (lo, hi) = p.plausible();
            let v = self.property(p);
            if v < lo || v > hi {
                out.push(format!(
                    "material '{}': {} = {v} {} outside plausible range [{lo}, {hi}]",
                    self.name,
                    p.name(),
                    p.unit()
                ));
            }
        }
        let total = self.composition_total();
        if !(98.0..=102.0).contains(&total) {
            out.push(format!(
                "material '{}': composition sums to {total:.3} wt% (expected 98-102)",
                self.name
            ));
        }
        out
    }
}

/// Materials keyed by name, in file order.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct MaterialRegistry {
    materials: Vec<MaterialSpec>,
    index: BTreeMap<String, usize>,
    /// element columns in header order
    elements: Vec<String>,
    warnings: Vec<String>,
}

impl MaterialRegistry {
    pub fn new(element_columns: Vec<String>) -> Self {
        MaterialRegistry {
            elements: element_columns,
            ..Default::default()
        }
    }

    /// Adds a material, returning plausibility warnings. Fails on duplicates and
    /// invariant violations; in `strict` mode warnings are failures too.
    pub fn insert(&mut self, spec: MaterialSpec, strict: bool) -> Result<Vec<String>> {
        if self.index.contains_key(&spec.name) {
            return Err(validation!("duplicate material name '{}'", spec.name));
        }
        spec.check_invariants()?;
        let warnings = spec.plausibility_warnings();
        if strict {
            if let Some(w) = warnings.first() {
                return Err(validation!("{w} (strict mode)"));
            }
        }
        for el in spec.composition.keys() {
            if !self.elements.contains(el) {
                self.elements.push(el.clone());
            }
        }
        self.index.insert(spec.name.clone(), self.materials.len());
        self.materials.push(spec);
        self.warnings.extend(warnings.iter().cloned());
        Ok(warnings)
    }

    pub fn get(&self, name: &str) -> Option<&MaterialSpec> {
        self.index.get(name).map(|&i| &self.materials[i])
    }

    pub fn iter(&self) -> impl Iterator<Item = &MaterialSpec> {
        self.materials.iter()
    }

    pub fn len(&self) -> usize {
        self.materials.len()
    }

    pub fn is_empty(&self) -> bool {
        self.materials.is_empty()
    }

    /// Material names sorted lexicographically.
    pub fn sorted_names(&self) -> Vec<String> {
        self.index.keys().cloned().collect()
    }

    pub fn element_columns(&self) -> &[String] {
        &self.elements
    }

    /// Elements with a non-zero fraction in at least one material, in column order.
    pub fn used_elements(&self) -> Vec<String> {
        self.elements
            .iter()
            .filter(|el| self.materials.iter().any(|m| m.composition.contains_key(*el)))
            .cloned()
            .collect()
    }

    pub fn warnings(&self) -> &[String] {
        &self.warnings
    }

    pub fn from_csv_bytes(bytes: &[u8], strict: bool) -> Result<Self> {
        parse(Table::read_bytes(bytes)?, strict)
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csvio::writer(w);
        let mut header: Vec<&str> = PROPERTY_COLUMNS.to_vec();
        header.extend(self.elements.iter().map(String::as_str));
        out.write_record(&header).map_err(csvio::csv_err)?;
        for m in &self.materials {
            let mut row = vec![
                m.name.clone(),
                m.density.to_string(),
                m.thermal_conductivity.to_string(),
                m.melting_temperature.to_string(),
                m.cte.to_string(),
                m.specific_heat.to_string(),
            ];
            for el in &self.elements {
                row.push(m.composition.get(el).copied().unwrap_or(0.0).to_string());
            }
            out.write_record(&row).map_err(csvio::csv_err)?;
        }
        out.flush().map_err(|e| crate::error::Error::io("<csv writer>", e))?;
        Ok(())
    }
}

/// Loads `materials.csv`: the six property columns followed by one wt% column
/// per element symbol. Plausibility findings are collected as warnings.
pub fn load_materials(path: impl AsRef<Path>, strict: bool) -> Result<MaterialRegistry> {
    let path = path.as_ref();
    let bytes = std::fs::read(path).map_err(|e| crate::error::Error::io(path, e))?;
    if bytes.iter().all(|b| b.is_ascii_whitespace()) {
        return Ok(MaterialRegistry::default());
    }
    parse(Table::read_path(path)?, strict)
        .map_err(|e| match e {
            crate::error::Error::Schema(m) => schema!("{}: {m}", path.display()),
            crate::error::Error::Validation(m) => validation!("{}: {m}", path.display()),
            other => other,
        })
}

fn parse(table: Table, strict: bool) -> Result<MaterialRegistry> {
    let cols: Vec<usize> = PROPERTY_COLUMNS
        .iter()
        .map(|c| table.require(c))
        .collect::<Result<_>>()?;
    let element_cols: Vec<(usize, String)> = table
        .header
        .iter()
        .enumerate()
        .filter(|(_, h)| !PROPERTY_COLUMNS.contains(&h.as_str()))
        .map(|(i, h)| (i, h.clone()))
        .collect();
    for (_, sym) in &element_cols {
        let ok = !sym.is_empty()
            && sym.len() <= 3
            && sym.chars().next().is_some_and(|c| c.is_ascii_uppercase())
            && sym.chars().skip(1).all(|c| c.is_ascii_lowercase());
        if !ok {
            return Err(schema!("column '{sym}' is neither a property nor an element symbol"));
        }
    }
    let mut reg = MaterialRegistry::new(element_cols.iter().map(|(_, s)| s.clone()).collect());
    for (line, rec) in &table.rows {
        let line = *line;
        let name = csvio::cell(rec, cols[0]).to_string();
        if name.is_empty() {
            return Err(schema!("line {line}: empty material name"));
        }
        let num = |i: usize| csvio::number(rec, line, cols[i], PROPERTY_COLUMNS[i]);
        let mut composition = BTreeMap::new();
        for (col, sym) in &element_cols {
            if let Some(v) = csvio::opt_number(rec, line, *col, sym)? {
                if v != 0.0 {
                    composition.insert(sym.clone(), v);
                }
            }
        }
        let spec = MaterialSpec {
            name,
            composition,
            density: num(1)?,
            thermal_conductivity: num(2)?,
            melting_temperature: num(3)?,
            cte: num(4)?,
            specific_heat: num(5)?,
        };
        reg.insert(spec, strict)
            .map_err(|e| validation!("line {line}: {e}"))?;
    }
    Ok(reg)
}

#[cfg(test)]
mod tests {
    use super::*;

    const HEADER: &str = "name,density,thermal_conductivity,melting_temperature,cte,specific_heat,Al,Ti,V,Cu,C,Fe,Ni\n";

    fn reg(body: &str) -> Result<MaterialRegistry> {
        MaterialRegistry::from_csv_bytes(format!("{HEADER}{body}").as_bytes(), false)
    }

    #[test]
    fn ti64_row_loads_table_values() {
        let r = reg("Ti6Al4V,4.43,7.1,1695,8.6,561.5,6,90,4,0,0,0,0\n").unwrap();
        let m = r.get("Ti6Al4V").unwrap();
        assert_eq!(m.density, 4.43);
        assert_eq!(m.thermal_conductivity, 7.1);
        assert_eq!(m.melting_temperature, 1695.0);
        assert_eq!(m.cte, 8.6);
        assert_eq!(m.specific_heat, 561.5);
        assert!(r.warnings().is_empty());
    }

    #[test]
    fn copper_melting_point_is_a_warning_not_an_error() {
        let r = reg("Copper,8.6,350,9.6,17.01,435,0,0,0,99.9,0.02,0.04,0.015\n").unwrap();
        assert_eq!(r.len(), 1);
        assert_eq!(r.warnings().len(), 1);
        assert!(r.warnings()[0].contains("melting_point"));
        let strict = MaterialRegistry::from_csv_bytes(
            format!("{HEADER}Copper,8.6,350,9.6,17.01,435,0,0,0,99.9,0.02,0.04,0.015\n").as_bytes(),
            true,
        );
        assert!(strict.is_err());
    }

    #[test]
    fn duplicate_names_are_rejected() {
        let err = reg("A,1,1,1000,1,500,100,0,0,0,0,0,0\nA,1,1,1000,1,500,100,0,0,0,0,0,0\n").unwrap_err();
        assert!(err.to_string().contains("duplicate"));
    }

    #[test]
    fn unparsable_numbers_report_location() {
        let err = reg("A,abc,1,1000,1,500,100,0,0,0,0,0,0\n").unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("line 2") && msg.contains("density"), "{msg}");
    }

    #[test]
    fn non_positive_thermal_property_is_fatal() {
        assert!(reg("A,0,1,1000,1,500,100,0,0,0,0,0,0\n").is_err());
    }

    #[test]
    fn composition_sum_outside_tolerance_warns() {
        let r = reg("M300,8.1,14.2,1413,10.3,452,0,0.6,0,0,0.02,0,18\n").unwrap();
        assert!(r.warnings().iter().any(|w| w.contains("composition")));
    }

    #[test]
    fn empty_file_gives_empty_registry() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("m.csv");
        std::fs::write(&p, "").unwrap();
        let r = load_materials(&p, false).unwrap();
        assert!(r.is_empty());
        assert!(r.warnings().is_empty());
    }
}
