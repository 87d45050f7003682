use rand::Rng as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::tree::{grow, GrowParams, Tree};
use crate::linalg::Mat;
use crate::rng;
use crate::scalar::Real;

const FOREST_STREAM: u64 = 0xF0;
const BOOST_STREAM: u64 = 0xB0;

/// Bagged regression trees; prediction is the mean over trees.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct Forest<T> {
    pub trees: Vec<Tree<T>>,
}

impl<T: Real> Forest<T> {
    pub fn predict_row(&self, x: &[T]) -> T {
        let s: T = self.trees.iter().map(|t| t.predict_row(x)).sum();
        s / T::from_usize_lossy(self.trees.len())
    }
}

pub(crate) struct ForestParams {
    pub n_estimators: usize,
    pub max_depth: Option<usize>,
    pub min_samples_leaf: usize,
    pub max_features: Option<usize>,
    pub seed: u64,
}

/// Tree `t` draws from its own stream, so the result does not depend on scheduling.
pub(crate) fn fit_forest<T: Real>(x: &Mat<T>, y: &[T], p: &ForestParams) -> Forest<T> {
    let n = x.rows;
    let mut grow_params = GrowParams::cart(p.max_depth, p.min_samples_leaf);
    grow_params.max_features = p.max_features.unwrap_or(usize::MAX).max(1);
    let trees = (0..p.n_estimators)
        .into_par_iter()
        .map(|t| {
            let mut r = rng::stream(p.seed, rng::stream_id(&[FOREST_STREAM, t as u64]));
            let rows: Vec<usize> = (0..n).map(|_| r.random_range(0..n)).collect();
            grow(x, y, rows, &grow_params, Some(&mut r))
        })
        .collect();
    Forest { trees }
}

/// Stagewise boosted trees; leaves already include the learning rate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct Boosted<T> {
    pub base: T,
    pub trees: Vec<Tree<T>>,
    /// training loss (mean squared error / 2) after the base and after every stage
    pub train_loss: Vec<T>,
}

impl<T: Real> Boosted<T> {
    pub fn predict_row(&self, x: &[T]) -> T {
        self.base + self.trees.iter().map(|t| t.predict_row(x)).sum::<T>()
    }
}

pub(crate) struct BoostParams<T> {
    pub n_estimators: usize,
    pub learning_rate: T,
    pub max_depth: usize,
    pub min_samples_leaf: usize,
    pub l1: T,
    pub l2: T,
    pub subsample: T,
    pub seed: u64,
}

fn half_mse<T: Real>(y: &[T], f: &[T]) -> T {
    let s: T = y.iter().zip(f).map(|(&a, &b)| (a - b) * (a - b)).sum();
    s / T::lit(2.0) / T::from_usize_lossy(y.len())
}

/// Squared-loss boosting: each stage fits the residuals with soft-thresholded,
/// L2-shrunk leaf values.
pub(crate) fn fit_boosting<T: Real>(x: &Mat<T>, y: &[T], p: &BoostParams<T>) -> Boosted<T> {
    let n = x.rows;
    let base = y.iter().copied().sum::<T>() / T::from_usize_lossy(n);
    let mut f = vec![base; n];
    let grow_params = GrowParams {
        max_depth: p.max_depth,
        min_samples_leaf: p.min_samples_leaf.max(1),
        max_features: usize::MAX,
        l1: p.l1,
        l2: p.l2,
    };
    let mut trees = Vec::with_capacity(p.n_estimators);
    let mut train_loss = vec![half_mse(y, &f)];
    let take = ((p.subsample.as_f64() * n as f64).round() as usize).clamp(1, n);
    for stage in 0..p.n_estimators {
        let residual: Vec<T> = y.iter().zip(&f).map(|(&a, &b)| a - b).collect();
        let rows = if take < n {
            let mut r = rng::stream(p.seed, rng::stream_id(&[BOOST_STREAM, stage as u64]));
            let mut perm = rng::permutation(n, &mut r);
            perm.truncate(take);
            perm.sort_unstable();
            perm
        } else {
            (0..n).collect()
        };
        let mut tree = grow(x, &residual, rows, &grow_params, None);
        tree.scale_leaves(p.learning_rate);
        for (i, fi) in f.iter_mut().enumerate() {
            *fi += tree.predict_row(x.row(i));
        }
        train_loss.push(half_mse(y, &f));
        trees.push(tree);
    }
    Boosted { base, trees, train_loss }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn data() -> (Mat<f64>, Vec<f64>) {
        let n = 60;
        let mut xs = Vec::new();
        let mut ys = Vec::new();
        for i in 0..n {
            let a = i as f64 / n as f64;
            let b = ((i * 7) % 11) as f64;
            xs.extend([a, b]);
            ys.push(3.0 * a + 0.2 * b + (a * 9.0).sin());
        }
        (Mat::from_rows(n, 2, xs), ys)
    }

    #[test]
    fn forest_is_deterministic_and_averages() {
        let (x, y) = data();
        let p = ForestParams { n_estimators: 8, max_depth: None, min_samples_leaf: 1, max_features: Some(1), seed: 3 };
        let a = fit_forest(&x, &y, &p);
        let b = fit_forest(&x, &y, &p);
        assert_eq!(a, b);
        let two = Forest { trees: vec![Tree::leaf(2.0), Tree::leaf(4.0)] };
        assert_eq!(two.predict_row(&[0.0]), 3.0);
    }

    #[test]
    fn boosting_loss_never_increases() {
        let (x, y) = data();
        for (l1, l2, lr) in [(0.0, 0.0, 1.0), (0.5, 1.0, 0.3), (0.0, 5.0, 0.1)] {
            let p = BoostParams {
                n_estimators: 30,
                learning_rate: lr,
                max_depth: 3,
                min_samples_leaf: 1,
                l1,
                l2,
                subsample: 1.0,
                seed: 0,
            };
            let m = fit_boosting(&x, &y, &p);
            for w in m.train_loss.windows(2) {
                assert!(w[1] <= w[0] + 1e-12, "{:?}", w);
            }
        }
    }

    #[test]
    fn empty_ensemble_predicts_base() {
        let m = Boosted { base: 7.5, trees: vec![], train_loss: vec![] };
        assert_eq!(m.predict_row(&[1.0, 2.0]), 7.5);
    }
}
