//! Experimental records and the material / element reference tables.
//!
//! Units are stored as printed in the literature tables (W, mm/s, µm, °C,
//! g/cm³-scale density, 1e-6/K); conversion to SI happens only in
//! [`crate::eqdiscovery`].

mod csvio;
mod elements;
mod materials;
mod records;
mod summary;

pub use elements::{load_elements, ElementProperties, ElementProperty, ElementTable};
pub use materials::{load_materials, MaterialRegistry, MaterialSpec, ThermalProperty};
pub use records::{
    load_dataset, select_complete, DataRecord, Dataset, FeatureRequest, Labels, LoadOptions,
    NumericField, RecordStatus, UnknownLevelPolicy,
};
pub use summary::{summarize, summarize_with_bins, Histogram, SummaryStats, DEFAULT_BINS, MISSING_LEVEL};

use serde::{Deserialize, Serialize};

macro_rules! levels {
    (
        $(#[$meta:meta])*
        $name:ident { $($variant:ident => $canon:literal $(| $alias:literal)*),+ $(,)? }
    ) => {
        $(#[$meta])*
        #[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
        pub enum $name { $($variant),+ }

        impl $name {
            pub const ALL: &'static [$name] = &[$($name::$variant),+];

            pub fn as_str(self) -> &'static str {
                match self { $($name::$variant => $canon),+ }
            }

            /// Case-insensitive parse accepting the canonical spelling and known aliases.
            pub fn parse(s: &str) -> Option<Self> {
                let key = normalize_token(s);
                $(
                    if key == normalize_token($canon) $(|| key == normalize_token($alias))* {
                        return Some($name::$variant);
                    }
                )+
                None
            }
        }

        impl std::fmt::Display for $name {
            fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
                f.write_str(self.as_str())
            }
        }
    };
}

fn normalize_token(s: &str) -> String {
    s.trim()
        .chars()
        .filter(|c| !matches!(c, ' ' | '-' | '_' | '°'))
        .flat_map(char::to_lowercase)
        .collect()
}

levels! {
    /// Top-level process class.
    Process { Pbf => "PBF", Ded => "DED" }
}

levels! {
    /// Sub-process taxonomy; trade names are reconciled to the standard terms.
    Subprocess {
        LPbf => "L-PBF" | "SLM" | "DMLS" | "DMLM" | "LMF" | "LPBF",
        EPbf => "E-PBF" | "EBM" | "EPBF",
        LDed => "L-DED" | "LENS" | "LMD" | "DMD" | "DLD" | "LSF" | "LF3" | "DMP",
        EDed => "E-DED" | "EBAM",
        ArcDed => "Arc-DED" | "WAAM" | "SMD",
        WireLDed => "Wire-L-DED" | "wire laser DED",
    }
}

impl Subprocess {
    pub fn process(self) -> Process {
        match self {
            Subprocess::LPbf | Subprocess::EPbf => Process::Pbf,
            _ => Process::Ded,
        }
    }
}

levels! {
    /// Specimen build orientation.
    Orientation {
        Horizontal => "horizontal" | "XY" | "H" | "YX",
        Vertical => "vertical" | "Z" | "V" | "XZ",
        Deg45 => "deg45" | "45" | "45deg" | "diagonal",
    }
}

levels! {
    /// Surface finishing applied before roughness measurement.
    SurfaceCondition {
        AsBuilt => "as_built" | "as-built" | "asbuilt",
        BeadBlasted => "bead_blasted" | "bead blasting",
        ShotPeened => "shot_peened" | "shot peening",
        CorundumBlasted => "corundum_blasted" | "corundum blasting",
    }
}

levels! {
    /// Mechanical property being predicted.
    LabelKind {
        Ys => "ys" | "yield_strength" | "yield",
        Uts => "uts" | "ultimate_tensile_strength",
        EMod => "e_mod" | "e" | "elastic_modulus" | "modulus",
        Elongation => "elongation" | "elong" | "elongation_at_break",
        Hv => "hv" | "vickers",
        Hrc => "hrc" | "rockwell",
        Rz => "rz" | "roughness",
    }
}

impl LabelKind {
    pub fn unit(self) -> &'static str {
        match self {
            LabelKind::Ys | LabelKind::Uts => "MPa",
            LabelKind::EMod => "GPa",
            LabelKind::Elongation => "%",
            LabelKind::Hv => "HV",
            LabelKind::Hrc => "HRC",
            LabelKind::Rz => "µm",
        }
    }

    pub fn title(self) -> &'static str {
        match self {
            LabelKind::Ys => "Yield strength",
            LabelKind::Uts => "Ultimate tensile strength",
            LabelKind::EMod => "Elastic modulus",
            LabelKind::Elongation => "Elongation at break",
            LabelKind::Hv => "Hardness (Vickers)",
            LabelKind::Hrc => "Hardness (Rockwell)",
            LabelKind::Rz => "Mean roughness depth (Rz)",
        }
    }
}

/// Post-processing condition; unrecognised conditions can be kept as `Other`.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum PostProcessing {
    AsBuilt,
    Ht,
    Hip,
    Sr,
    Other(String),
}

impl PostProcessing {
    pub fn as_str(&self) -> std::borrow::Cow<'_, str> {
        match self {
            PostProcessing::AsBuilt => "as-built".into(),
            PostProcessing::Ht => "HT".into(),
            PostProcessing::Hip => "HIP".into(),
            PostProcessing::Sr => "SR".into(),
            PostProcessing::Other(tag) => format!("other:{tag}").into(),
        }
    }

    /// Parses a known condition; `other:<tag>` always yields `Other(tag)`.
    pub fn parse(s: &str) -> Option<Self> {
        let t = s.trim();
        if let Some(tag) = t.strip_prefix("other:") {
            return Some(PostProcessing::Other(tag.to_string()));
        }
        match normalize_token(t).as_str() {
            "asbuilt" | "ab" | "none" => Some(PostProcessing::AsBuilt),
            "ht" | "heattreated" | "heattreatment" => Some(PostProcessing::Ht),
            "hip" | "hotisostaticpressing" => Some(PostProcessing::Hip),
            "sr" | "stressrelieved" | "stressrelief" => Some(PostProcessing::Sr),
            _ => None,
        }
    }
}

impl std::fmt::Display for PostProcessing {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.as_str())
    }
}
