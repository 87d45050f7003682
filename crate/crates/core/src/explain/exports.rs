use serde::{Deserialize, Serialize};

use super::importance::shap_importance;
use super::shap::ShapExplanation;
use crate::error::{validation, Result};
use crate::evaluation::pearson_pairs;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub feature: String,
    pub mean_abs_shap: f64,
}

/// One dot of the beeswarm: instance, feature, attribution and raw value.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SwarmRow {
    pub instance: usize,
    pub feature: String,
    pub shap: f64,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WaterfallRow {
    pub instance: usize,
    pub rank: usize,
    pub feature: String,
    pub value: f64,
    pub shap: f64,
    pub start: f64,
    pub end: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForceEntry {
    pub feature: String,
    pub value: f64,
    pub shap: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForcePlot {
    pub instance: usize,
    pub base_value: f64,
    pub prediction: f64,
    /// pushes above the base, largest first
    pub positive: Vec<ForceEntry>,
    /// pushes below the base, largest magnitude first
    pub negative: Vec<ForceEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionRow {
    pub instance: usize,
    pub step: usize,
    pub feature: String,
    pub cumulative: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DependenceRow {
    pub feature: String,
    pub instance: usize,
    pub value: f64,
    pub shap: f64,
    pub partner: String,
    pub partner_value: f64,
}

/// Plot-ready tables derived from a set of explanations sharing one schema.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShapExports {
    pub features: Vec<String>,
    /// sorted by mean |φ|, descending
    pub summary: Vec<SummaryRow>,
    pub swarm: Vec<SwarmRow>,
    pub waterfall: Vec<WaterfallRow>,
    pub force: Vec<ForcePlot>,
    pub decision: Vec<DecisionRow>,
    pub dependence: Vec<DependenceRow>,
}

/// Partner for feature `j`: the other feature whose values correlate most
/// strongly in magnitude with `j`'s attributions; `None` without any correlation.
fn interaction_partner(ex: &[ShapExplanation], j: usize) -> Option<usize> {
    let mut best: Option<(f64, usize)> = None;
    for p in (0..ex[0].phis.len()).filter(|&p| p != j) {
        let pairs: Vec<(f64, f64)> = ex.iter().map(|e| (e.phis[j], e.feature_values[p])).collect();
        if let Some(r) = pearson_pairs(&pairs) {
            if best.is_none_or(|(b, _)| r.abs() > b) {
                best = Some((r.abs(), p));
            }
        }
    }
    best.map(|b| b.1)
}

pub fn shap_exports(explanations: &[ShapExplanation], names: &[String]) -> Result<ShapExports> {
    let imp = shap_importance(explanations, names)?;
    if let Some(e) = explanations.iter().find(|e| e.feature_values.len() != names.len()) {
        return Err(validation!("explanation has {} feature values for {} features", e.feature_values.len(), names.len()));
    }
    let summary: Vec<SummaryRow> = imp
        .ranked()
        .into_iter()
        .map(|(f, s)| SummaryRow { feature: f.to_string(), mean_abs_shap: s })
        .collect();
    let order: Vec<usize> = summary.iter().map(|r| names.iter().position(|n| *n == r.feature).unwrap()).collect();

    let mut swarm = Vec::new();
    let mut waterfall = Vec::new();
    let mut force = Vec::new();
    let mut decision = Vec::new();
    for (i, e) in explanations.iter().enumerate() {
        for &j in &order {
            swarm.push(SwarmRow { instance: i, feature: names[j].clone(), shap: e.phis[j], value: e.feature_values[j] });
        }
        let mut by_mag: Vec<usize> = (0..names.len()).collect();
        by_mag.sort_by(|&a, &b| e.phis[b].abs().total_cmp(&e.phis[a].abs()));
        let mut acc = e.base_value;
        for (rank, &j) in by_mag.iter().enumerate() {
            let start = acc;
            acc += e.phis[j];
            waterfall.push(WaterfallRow {
                instance: i,
                rank,
                feature: names[j].clone(),
                value: e.feature_values[j],
                shap: e.phis[j],
                start,
                end: acc,
            });
        }
        let entry = |j: usize| ForceEntry { feature: names[j].clone(), value: e.feature_values[j], shap: e.phis[j] };
        force.push(ForcePlot {
            instance: i,
            base_value: e.base_value,
            prediction: e.prediction,
            positive: by_mag.iter().copied().filter(|&j| e.phis[j] > 0.0).map(entry).collect(),
            negative: by_mag.iter().copied().filter(|&j| e.phis[j] < 0.0).map(entry).collect(),
        });
        // least important first so the path ends at the most important feature
        let mut acc = e.base_value;
        for (step, &j) in order.iter().rev().enumerate() {
            acc += e.phis[j];
            decision.push(DecisionRow { instance: i, step, feature: names[j].clone(), cumulative: acc });
        }
    }

    let mut dependence = Vec::new();
    for &j in &order {
        let partner = interaction_partner(explanations, j);
        for (i, e) in explanations.iter().enumerate() {
            dependence.push(DependenceRow {
                feature: names[j].clone(),
                instance: i,
                value: e.feature_values[j],
                shap: e.phis[j],
                partner: partner.map(|p| names[p].clone()).unwrap_or_default(),
                partner_value: partner.map_or(f64::NAN, |p| e.feature_values[p]),
            });
        }
    }
    Ok(ShapExports { features: names.to_vec(), summary, swarm, waterfall, force, decision, dependence })
}

fn csv_bytes<R: Serialize>(rows: &[R]) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    for r in rows {
        w.serialize(r).map_err(|e| validation!("cannot encode export row: {e}"))?;
    }
    w.into_inner().map_err(|e| validation!("cannot encode export: {e}"))
}

impl ShapExports {
    /// `(file name, contents)` for every export file.
    pub fn render(&self) -> Result<Vec<(String, Vec<u8>)>> {
        Ok(vec![
            ("shap_summary.csv".into(), csv_bytes(&self.summary)?),
            ("shap_swarm.csv".into(), csv_bytes(&self.swarm)?),
            ("shap_waterfall.csv".into(), csv_bytes(&self.waterfall)?),
            ("shap_force.json".into(), serde_json::to_vec_pretty(&self.force).expect("force plot serializes")),
            ("shap_decision.csv".into(), csv_bytes(&self.decision)?),
            ("shap_dependence.csv".into(), csv_bytes(&self.dependence)?),
        ])
    }
}
