use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{Dataset, LabelKind, NumericField};
use crate::error::{validation, Result};

pub const DEFAULT_BINS: usize = 20;

/// Equal-width histogram over `[lo, hi]`; the last bin is closed on the right.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Histogram {
    pub lo: f64,
    pub hi: f64,
    pub counts: Vec<usize>,
    pub missing: usize,
}

impl Histogram {
    pub fn build(values: &[Option<f64>], bins: usize) -> Histogram {
        let bins = bins.max(1);
        let present: Vec<f64> = values.iter().flatten().copied().collect();
        let missing = values.len() - present.len();
        let mut counts = vec![0; bins];
        if present.is_empty() {
            return Histogram { lo: 0.0, hi: 0.0, counts, missing };
        }
        let lo = present.iter().copied().fold(f64::INFINITY, f64::min);
        let hi = present.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let width = (hi - lo) / bins as f64;
        for v in present {
            let b = if width > 0.0 { (((v - lo) / width) as usize).min(bins - 1) } else { 0 };
            counts[b] += 1;
        }
        Histogram { lo, hi, counts, missing }
    }

    pub fn edges(&self) -> Vec<f64> {
        let n = self.counts.len();
        (0..=n)
            .map(|i| self.lo + (self.hi - self.lo) * i as f64 / n as f64)
            .collect()
    }

    pub fn occupied_bins(&self) -> usize {
        self.counts.iter().filter(|&&c| c > 0).count()
    }

    pub fn total(&self) -> usize {
        self.counts.iter().sum()
    }
}

/// Category counts and numeric histograms over the valid records.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryStats {
    pub records: usize,
    pub valid: usize,
    /// axis name -> level -> count
    pub categories: BTreeMap<String, BTreeMap<String, usize>>,
    pub histograms: BTreeMap<String, Histogram>,
    pub label_counts: BTreeMap<String, usize>,
}

pub const MISSING_LEVEL: &str = "(missing)";

pub fn summarize(ds: &Dataset) -> Result<SummaryStats> {
    summarize_with_bins(ds, DEFAULT_BINS)
}

pub fn summarize_with_bins(ds: &Dataset, bins: usize) -> Result<SummaryStats> {
    if ds.is_empty() {
        return Err(validation!("cannot summarize an empty dataset"));
    }
    if bins == 0 {
        return Err(validation!("histogram bin count must be at least 1"));
    }
    let valid: Vec<_> = ds.iter_valid().collect();
    let mut categories: BTreeMap<String, BTreeMap<String, usize>> = BTreeMap::new();
    let mut bump = |axis: &str, level: String| {
        *categories.entry(axis.to_string()).or_default().entry(level).or_default() += 1;
    };
    for r in &valid {
        bump("subprocess", r.subprocess.to_string());
        bump("orientation", r.orientation.to_string());
        bump("post_processing", r.post_processing.to_string());
        bump(
            "surface_condition",
            r.surface_condition.map_or(MISSING_LEVEL.to_string(), |s| s.to_string()),
        );
        bump("material", r.material.clone());
        bump("machine", r.machine.clone());
    }
    let histograms = NumericField::ALL
        .iter()
        .map(|&f| {
            let vals: Vec<Option<f64>> = valid.iter().map(|r| r.numeric(f)).collect();
            (f.name().to_string(), Histogram::build(&vals, bins))
        })
        .collect();
    let label_counts = LabelKind::ALL
        .iter()
        .map(|&k| (k.as_str().to_string(), valid.iter().filter(|r| r.label(k).is_some()).count()))
        .collect();
    Ok(SummaryStats {
        records: ds.len(),
        valid: valid.len(),
        categories,
        histograms,
        label_counts,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::{DataRecord, Labels, Orientation, PostProcessing, Subprocess};

    fn record(sub: Subprocess, power: f64) -> DataRecord {
        DataRecord {
            material: "IN718".into(),
            process: sub.process(),
            subprocess: sub,
            machine: "M".into(),
            orientation: Orientation::Vertical,
            post_processing: PostProcessing::AsBuilt,
            surface_condition: None,
            beam_power: Some(power),
            scan_speed: None,
            layer_thickness: None,
            beam_diameter: None,
            labels: Labels { ys: Some(900.0), ..Default::default() },
        }
    }

    #[test]
    fn one_record_per_subprocess() {
        let mut ds = Dataset::new();
        for &s in Subprocess::ALL {
            ds.push(record(s, 200.0), "t");
        }
        let st = summarize(&ds).unwrap();
        let sub = &st.categories["subprocess"];
        assert_eq!(sub.len(), 6);
        assert!(sub.values().all(|&c| c == 1));
        for counts in st.categories.values() {
            assert_eq!(counts.values().sum::<usize>(), 6);
        }
    }

    #[test]
    fn constant_power_fills_a_single_bin() {
        let mut ds = Dataset::new();
        for _ in 0..5 {
            ds.push(record(Subprocess::LPbf, 250.0), "t");
        }
        let st = summarize(&ds).unwrap();
        let h = &st.histograms["beam_power"];
        assert_eq!(h.counts.len(), DEFAULT_BINS);
        assert_eq!(h.occupied_bins(), 1);
        assert_eq!(h.total(), 5);
        assert_eq!(st.histograms["scan_speed"].missing, 5);
    }

    #[test]
    fn empty_dataset_is_an_error() {
        assert!(summarize(&Dataset::new()).is_err());
    }

    #[test]
    fn max_value_lands_in_last_bin() {
        let h = Histogram::build(&[Some(0.0), Some(0.5), Some(10.0)], 10);
        assert_eq!(h.counts[0], 2);
        assert_eq!(h.counts[9], 1);
        assert_eq!(h.edges().len(), 11);
    }
}
