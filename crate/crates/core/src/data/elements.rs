use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::csvio::{self, Table};
use super::MaterialRegistry;
use crate::error::{schema, validation, Error, Result};

const COLUMNS: [&str; 6] = [
    "symbol",
    "atomic_number",
    "atomic_volume",
    "ionization_energy",
    "heat_of_fusion",
    "electron_affinity",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ElementProperties {
    pub symbol: String,
    pub atomic_number: u32,
    /// cm³/mol
    pub atomic_volume: f64,
    /// eV
    pub ionization_energy: f64,
    /// kJ/mol
    pub heat_of_fusion: f64,
    /// eV
    pub electron_affinity: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum ElementProperty {
    AtomicNumber,
    AtomicVolume,
    IonizationEnergy,
    HeatOfFusion,
    ElectronAffinity,
}

impl ElementProperty {
    pub const ALL: [ElementProperty; 5] = [
        ElementProperty::AtomicNumber,
        ElementProperty::AtomicVolume,
        ElementProperty::IonizationEnergy,
        ElementProperty::HeatOfFusion,
        ElementProperty::ElectronAffinity,
    ];

    pub fn name(self) -> &'static str {
        COLUMNS[1 + self as usize]
    }

    pub fn of(self, e: &ElementProperties) -> f64 {
        match self {
            ElementProperty::AtomicNumber => e.atomic_number as f64,
            ElementProperty::AtomicVolume => e.atomic_volume,
            ElementProperty::IonizationEnergy => e.ionization_energy,
            ElementProperty::HeatOfFusion => e.heat_of_fusion,
            ElementProperty::ElectronAffinity => e.electron_affinity,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ElementTable {
    rows: BTreeMap<String, ElementProperties>,
    order: Vec<String>,
}

impl ElementTable {
    pub fn insert(&mut self, e: ElementProperties) -> Result<()> {
        if e.atomic_number < 1 {
            return Err(validation!("element '{}': atomic number must be >= 1", e.symbol));
        }
        if self.rows.contains_key(&e.symbol) {
            return Err(validation!("duplicate element symbol '{}'", e.symbol));
        }
        self.order.push(e.symbol.clone());
        self.rows.insert(e.symbol.clone(), e);
        Ok(())
    }

    pub fn get(&self, symbol: &str) -> Option<&ElementProperties> {
        self.rows.get(symbol)
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &ElementProperties> {
        self.order.iter().map(|s| &self.rows[s])
    }

    /// Fails naming the first element some registered material uses but the table lacks.
    pub fn ensure_covers(&self, registry: &MaterialRegistry) -> Result<()> {
        for m in registry.iter() {
            for el in m.composition.keys() {
                if !self.rows.contains_key(el) {
                    return Err(validation!(
                        "element '{el}' used by material '{}' is missing from the element table",
                        m.name
                    ));
                }
            }
        }
        Ok(())
    }

    pub fn from_csv_bytes(bytes: &[u8]) -> Result<Self> {
        parse(Table::read_bytes(bytes)?)
    }

    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut out = csvio::writer(w);
        out.write_record(COLUMNS).map_err(csvio::csv_err)?;
        for e in self.iter() {
            out.write_record([
                e.symbol.clone(),
                e.atomic_number.to_string(),
                e.atomic_volume.to_string(),
                e.ionization_energy.to_string(),
                e.heat_of_fusion.to_string(),
                e.electron_affinity.to_string(),
            ])
            .map_err(csvio::csv_err)?;
        }
        out.flush().map_err(|e| Error::io("<csv writer>", e))?;
        Ok(())
    }
}

/// Loads `elements.csv` and checks it covers every element of `registry`.
pub fn load_elements(path: impl AsRef<Path>, registry: &MaterialRegistry) -> Result<ElementTable> {
    let path = path.as_ref();
    let table = parse(Table::read_path(path)?).map_err(|e| match e {
        Error::Schema(m) => schema!("{}: {m}", path.display()),
        Error::Validation(m) => validation!("{}: {m}", path.display()),
        other => other,
    })?;
    table.ensure_covers(registry)?;
    Ok(table)
}

fn parse(table: Table) -> Result<ElementTable> {
    let cols: Vec<usize> = COLUMNS.iter().map(|c| table.require(c)).collect::<Result<_>>()?;
    let mut out = ElementTable::default();
    for (line, rec) in &table.rows {
        let line = *line;
        let symbol = csvio::cell(rec, cols[0]).to_string();
        if symbol.is_empty() {
            return Err(schema!("line {line}: empty element symbol"));
        }
        let z = csvio::number(rec, line, cols[1], COLUMNS[1])?;
        if z.fract() != 0.0 || z < 1.0 {
            return Err(validation!("line {line}: atomic_number must be a positive integer, got {z}"));
        }
        let num = |i: usize| csvio::number(rec, line, cols[i], COLUMNS[i]);
        out.insert(ElementProperties {
            symbol,
            atomic_number: z as u32,
            atomic_volume: num(2)?,
            ionization_energy: num(3)?,
            heat_of_fusion: num(4)?,
            electron_affinity: num(5)?,
        })
        .map_err(|e| validation!("line {line}: {e}"))?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::MaterialSpec;

    const HEADER: &str = "symbol,atomic_number,atomic_volume,ionization_energy,heat_of_fusion,electron_affinity\n";

    #[test]
    fn titanium_row_is_stored() {
        let t = ElementTable::from_csv_bytes(format!("{HEADER}Ti,22,10.6,6.8281,14.15,0.079\n").as_bytes()).unwrap();
        assert_eq!(t.get("Ti").unwrap().atomic_number, 22);
    }

    #[test]
    fn duplicate_symbol_rejected() {
        let body = format!("{HEADER}Ti,22,10.6,6.8281,14.15,0.079\nTi,22,10.6,6.8281,14.15,0.079\n");
        assert!(ElementTable::from_csv_bytes(body.as_bytes()).is_err());
    }

    #[test]
    fn missing_scandium_is_named() {
        let mut reg = MaterialRegistry::new(vec![]);
        let comp = [("Al", 92.0), ("Mg", 4.65), ("Sc", 0.74), ("Zr", 0.4), ("Mn", 0.5), ("Fe", 0.4), ("Si", 0.4), ("Ti", 0.15), ("V", 0.1), ("Cu", 0.1), ("Zn", 0.25)];
        reg.insert(
            MaterialSpec {
                name: "Scalmalloy".into(),
                composition: comp.iter().map(|(k, v)| (k.to_string(), *v)).collect(),
                density: 2.67,
                specific_heat: 900.0,
                thermal_conductivity: 110.0,
                melting_temperature: 600.0,
                cte: 23.0,
            },
            false,
        )
        .unwrap();
        let mut body = HEADER.to_string();
        for (i, (sym, _)) in comp.iter().enumerate().filter(|(_, (s, _))| *s != "Sc") {
            body.push_str(&format!("{sym},{},10,7,10,0.5\n", i + 1));
        }
        let t = ElementTable::from_csv_bytes(body.as_bytes()).unwrap();
        let err = t.ensure_covers(&reg).unwrap_err();
        assert!(err.to_string().contains("'Sc'"), "{err}");
    }
}
