//! Reference tables and the sample record set shipped with the crate.

use crate::data::{Dataset, ElementTable, LoadOptions, MaterialRegistry};
use crate::Result;

pub const MATERIALS_CSV: &[u8] = include_bytes!("../../../data/materials.csv");
pub const ELEMENTS_CSV: &[u8] = include_bytes!("../../../data/elements.csv");
pub const RECORDS_CSV: &[u8] = include_bytes!("../../../data/records.csv");

pub fn materials() -> Result<MaterialRegistry> {
    MaterialRegistry::from_csv_bytes(MATERIALS_CSV, false)
}

pub fn elements() -> Result<ElementTable> {
    ElementTable::from_csv_bytes(ELEMENTS_CSV)
}

pub fn records(registry: &MaterialRegistry) -> Result<Dataset> {
    Dataset::from_csv_bytes(RECORDS_CSV, registry, LoadOptions::default())
}
