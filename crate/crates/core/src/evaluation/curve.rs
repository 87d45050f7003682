use rand::seq::index::sample;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::cv::run_fold;
use super::folds::kfold_indices;
use super::metrics::mean_std;
use crate::error::{validation, Result};
use crate::features::FeatureMatrix;
use crate::learners::LearnerConfig;
use crate::rng;
use crate::scalar::Real;

const CURVE_STREAM: u64 = 0xC0;

pub const DEFAULT_FRACTIONS: [f64; 5] = [0.2, 0.4, 0.6, 0.8, 1.0];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurvePoint {
    pub fraction: f64,
    pub mean_mae: f64,
    pub std_mae: f64,
    pub mean_r2: f64,
    /// one MAE per (repeat, fold), repeat-major
    pub maes: Vec<f64>,
    pub train_rows: Vec<usize>,
}

/// Training-set-size sweep: the fold partition is fixed by `seed`; each
/// (fraction, repeat, fold) subsamples that fold's training rows without
/// replacement. At fraction 1 the full training partition is used.
pub fn learning_curve<T: Real>(
    cfg: &LearnerConfig,
    x: &FeatureMatrix<T>,
    y: &[T],
    fractions: &[f64],
    repeats: usize,
    k: usize,
    seed: u64,
    standardize_onehot: bool,
) -> Result<Vec<CurvePoint>> {
    if repeats == 0 {
        return Err(validation!("repeats must be at least 1"));
    }
    let folds = kfold_indices(x.rows(), k, seed)?;
    for &f in fractions {
        if !(f > 0.0 && f <= 1.0) {
            return Err(validation!("training fraction {f} is outside (0, 1]"));
        }
        for fold in &folds {
            if ((f * fold.train.len() as f64).round() as usize) < 2 {
                return Err(validation!("fraction {f} leaves fewer than 2 training rows"));
            }
        }
    }
    fractions
        .iter()
        .enumerate()
        .map(|(fi, &frac)| {
            let jobs: Vec<(usize, usize)> = (0..repeats).flat_map(|r| (0..folds.len()).map(move |f| (r, f))).collect();
            let results: Vec<Result<(f64, f64, usize)>> = jobs
                .par_iter()
                .map(|&(rep, f)| {
                    let fold = &folds[f];
                    let take = (frac * fold.train.len() as f64).round() as usize;
                    let train: Vec<usize> = if take >= fold.train.len() {
                        fold.train.clone()
                    } else {
                        let mut r = rng::stream(seed, rng::stream_id(&[CURVE_STREAM, fi as u64, rep as u64, f as u64]));
                        let mut pick: Vec<usize> =
                            sample(&mut r, fold.train.len(), take).into_iter().map(|i| fold.train[i]).collect();
                        pick.sort_unstable();
                        pick
                    };
                    let res = run_fold(cfg, x, y, &train, &fold.test, standardize_onehot).map_err(|e| e.in_fold(f))?;
                    Ok((res.mae, res.r2, train.len()))
                })
                .collect();
            let mut maes = Vec::with_capacity(jobs.len());
            let mut r2s = Vec::with_capacity(jobs.len());
            let mut rows = Vec::with_capacity(jobs.len());
            for r in results {
                let (m, r2, n) = r?;
                maes.push(m);
                r2s.push(r2);
                rows.push(n);
            }
            let (mean_mae, std_mae) = mean_std(&maes);
            Ok(CurvePoint { fraction: frac, mean_mae, std_mae, mean_r2: mean_std(&r2s).0, maes, train_rows: rows })
        })
        .collect()
}
