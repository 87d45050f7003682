use rand::seq::index::sample;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{validation, Result};
use crate::features::{FeatureMatrix, FeatureSchema};
use crate::learners::{Node, TrainedModel, Tree};
use crate::rng;
use crate::scalar::Real;

const BACKGROUND_STREAM: u64 = 0xB0;
pub const DEFAULT_BACKGROUND: usize = 100;
pub const DEFAULT_ORACLE_MAX_FEATURES: usize = 15;

/// Additive attribution of one prediction against a background distribution.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ShapExplanation {
    pub base_value: f64,
    pub phis: Vec<f64>,
    pub prediction: f64,
    pub feature_values: Vec<f64>,
}

impl ShapExplanation {
    /// `|base + Σφ − prediction|`
    pub fn additivity_gap(&self) -> f64 {
        (self.base_value + self.phis.iter().sum::<f64>() - self.prediction).abs()
    }

    /// Sums φ within each feature group of `schema`.
    pub fn grouped(&self, schema: &FeatureSchema) -> (Vec<String>, Vec<f64>) {
        schema
            .groups()
            .into_iter()
            .map(|g| (g.name, self.phis[g.columns].iter().sum::<f64>()))
            .unzip()
    }
}

/// Up to `n` training rows drawn without replacement; all rows if fewer.
pub fn sample_background<T: Real>(x: &FeatureMatrix<T>, n: usize, seed: u64) -> FeatureMatrix<T> {
    if x.rows() <= n {
        return x.clone();
    }
    let mut r = rng::stream(seed, rng::stream_id(&[BACKGROUND_STREAM]));
    let mut idx = sample(&mut r, x.rows(), n).into_vec();
    idx.sort_unstable();
    x.select_rows(&idx)
}

fn check_inputs<T: Real>(m: &TrainedModel<T>, x: &[T], background: &FeatureMatrix<T>) -> Result<()> {
    if background.rows() == 0 {
        return Err(validation!("the SHAP background set is empty"));
    }
    m.check_schema(background)?;
    if x.len() != m.n_features {
        return Err(validation!("instance has {} features, the model expects {}", x.len(), m.n_features));
    }
    Ok(())
}

/// Shapley weight of a member of the required-in set `A` when `|A| = a`, `|B| = b`:
/// `(a−1)! b! / (a+b)!`.
fn weight(a: usize, b: usize) -> f64 {
    let mut w = 1.0 / a as f64;
    for k in 1..=b {
        w *= k as f64 / (a + k) as f64;
    }
    w
}

#[derive(Clone, Copy, PartialEq)]
enum Side {
    /// only the instance value reaches the current node
    Fore,
    /// only the background value does
    Back,
    /// both do
    Both,
}

/// Interventional SHAP of one tree for instance `x` against a single reference `r`.
/// A leaf is reached by the hybrid input iff every `Fore` feature comes from `x`
/// and every `Back` feature from `r`, so it contributes a two-set unanimity game.
fn tree_shap_single<T: Real>(tree: &Tree<T>, x: &[T], r: &[T], phi: &mut [f64]) {
    fn walk<T: Real>(nodes: &[Node<T>], k: usize, x: &[T], r: &[T], side: &mut Vec<(usize, Side)>, phi: &mut [f64]) {
        match &nodes[k] {
            Node::Leaf { value, .. } => {
                let a = side.iter().filter(|s| s.1 == Side::Fore).count();
                let b = side.iter().filter(|s| s.1 == Side::Back).count();
                let v = value.as_f64();
                if a > 0 {
                    let w = v * weight(a, b);
                    for &(f, s) in side.iter() {
                        if s == Side::Fore {
                            phi[f] += w;
                        }
                    }
                }
                if b > 0 {
                    let w = v * weight(b, a);
                    for &(f, s) in side.iter() {
                        if s == Side::Back {
                            phi[f] -= w;
                        }
                    }
                }
            }
            Node::Split { feature, threshold, left, right, .. } => {
                let f = *feature;
                let x_child = if x[f] < *threshold { *left } else { *right };
                let r_child = if r[f] < *threshold { *left } else { *right };
                let prior = side.iter().position(|s| s.0 == f);
                let state = prior.map(|p| side[p].1);
                let visit = |child: usize, s: Side, side: &mut Vec<(usize, Side)>, phi: &mut [f64]| {
                    match prior {
                        Some(p) => {
                            let old = side[p].1;
                            side[p].1 = s;
                            walk(nodes, child, x, r, side, phi);
                            side[p].1 = old;
                        }
                        None => {
                            side.push((f, s));
                            walk(nodes, child, x, r, side, phi);
                            side.pop();
                        }
                    }
                };
                match state {
                    Some(Side::Fore) => visit(x_child, Side::Fore, side, phi),
                    Some(Side::Back) => visit(r_child, Side::Back, side, phi),
                    None | Some(Side::Both) => {
                        if x_child == r_child {
                            visit(x_child, Side::Both, side, phi);
                        } else {
                            visit(x_child, Side::Fore, side, phi);
                            visit(r_child, Side::Back, side, phi);
                        }
                    }
                }
            }
        }
    }
    let mut side = Vec::new();
    walk(&tree.nodes, 0, x, r, &mut side, phi);
}

/// Exact interventional SHAP values for a tree-based model, averaged over the background rows.
pub fn tree_shap<T: Real>(m: &TrainedModel<T>, x: &[T], background: &FeatureMatrix<T>) -> Result<ShapExplanation> {
    check_inputs(m, x, background)?;
    let ens = m
        .tree_ensemble()
        .ok_or_else(|| validation!("tree SHAP needs a tree-based model, got {}", m.config.family()))?;
    let nf = m.n_features;
    let w = ens.weight().as_f64();
    let per_row: Vec<Vec<f64>> = (0..background.rows())
        .into_par_iter()
        .map(|b| {
            let mut phi = vec![0.0; nf];
            for t in ens.trees {
                tree_shap_single(t, x, background.row(b), &mut phi);
            }
            phi
        })
        .collect();
    // summed in row order so the result does not depend on the thread count
    let mut total = vec![0.0; nf];
    for phi in per_row {
        total.iter_mut().zip(phi).for_each(|(u, v)| *u += v);
    }
    let n = background.rows() as f64;
    let base = (0..background.rows()).map(|b| m.predict_row(background.row(b)).as_f64()).sum::<f64>() / n;
    Ok(ShapExplanation {
        base_value: base,
        phis: total.into_iter().map(|v| v * w / n).collect(),
        prediction: m.predict_row(x).as_f64(),
        feature_values: x.iter().map(|v| v.as_f64()).collect(),
    })
}

/// Brute-force Shapley values over all 2^M coalitions with the interventional value function.
pub fn exact_shap_oracle<T: Real>(
    m: &TrainedModel<T>,
    x: &[T],
    background: &FeatureMatrix<T>,
    max_features: usize,
) -> Result<ShapExplanation> {
    check_inputs(m, x, background)?;
    let nf = m.n_features;
    if nf > max_features || nf >= 31 {
        return Err(validation!("exact SHAP over {nf} features exceeds the limit of {max_features}"));
    }
    let n = background.rows() as f64;
    let value: Vec<f64> = (0..1usize << nf)
        .into_par_iter()
        .map(|mask| {
            let mut z = vec![T::zero(); nf];
            let mut s = 0.0;
            for b in 0..background.rows() {
                let row = background.row(b);
                for (j, zj) in z.iter_mut().enumerate() {
                    *zj = if mask >> j & 1 == 1 { x[j] } else { row[j] };
                }
                s += m.predict_row(&z).as_f64();
            }
            s / n
        })
        .collect();
    // |S|! (M−|S|−1)! / M!
    let coalition_weight = |s: usize| weight(s + 1, nf - s - 1);
    let phis = (0..nf)
        .map(|i| {
            (0..1usize << nf)
                .filter(|mask| mask >> i & 1 == 0)
                .map(|mask| coalition_weight(mask.count_ones() as usize) * (value[mask | 1 << i] - value[mask]))
                .sum()
        })
        .collect();
    Ok(ShapExplanation {
        base_value: value[0],
        phis,
        prediction: m.predict_row(x).as_f64(),
        feature_values: x.iter().map(|v| v.as_f64()).collect(),
    })
}
