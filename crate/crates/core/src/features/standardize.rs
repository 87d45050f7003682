use serde::{Deserialize, Serialize};

use super::schema::FeatureMatrix;
use crate::error::{validation, Result};
use crate::scalar::Real;

/// Per-column z-scoring with population statistics.
///
/// Columns the standardizer leaves alone (one-hot columns by default) carry
/// mean 0 and std 1. Zero-variance columns are flagged passthrough and map to 0.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct Standardizer<T> {
    pub means: Vec<T>,
    pub stds: Vec<T>,
    pub passthrough: Vec<bool>,
    pub fingerprint: String,
}

impl<T: Real> Standardizer<T> {
    pub fn fit(x: &FeatureMatrix<T>, standardize_onehot: bool) -> Result<Self> {
        if x.rows() == 0 || x.cols() == 0 {
            return Err(validation!("cannot fit a standardizer on an empty matrix"));
        }
        let n = T::from_usize_lossy(x.rows());
        let mut means = Vec::with_capacity(x.cols());
        let mut stds = Vec::with_capacity(x.cols());
        let mut passthrough = Vec::with_capacity(x.cols());
        for (j, kind) in x.schema().columns.iter().enumerate() {
            if !(standardize_onehot || kind.is_numeric_origin()) {
                means.push(T::zero());
                stds.push(T::one());
                passthrough.push(false);
                continue;
            }
            let col = x.column(j);
            let m = col.iter().copied().sum::<T>() / n;
            let var = col.iter().map(|&v| (v - m) * (v - m)).sum::<T>() / n;
            let s = var.sqrt();
            let constant = !(s > T::epsilon() * (T::one() + m.abs()));
            means.push(m);
            stds.push(if constant { T::one() } else { s });
            passthrough.push(constant);
        }
        Ok(Standardizer { means, stds, passthrough, fingerprint: x.fingerprint() })
    }

    fn check(&self, x: &FeatureMatrix<T>) -> Result<()> {
        if x.fingerprint() != self.fingerprint {
            return Err(validation!("standardizer was fitted on a different feature schema"));
        }
        Ok(())
    }

    pub fn apply(&self, x: &FeatureMatrix<T>) -> Result<FeatureMatrix<T>> {
        self.check(x)?;
        Ok(x.map_values(|j, v| {
            if self.passthrough[j] {
                T::zero()
            } else {
                (v - self.means[j]) / self.stds[j]
            }
        }))
    }

    /// Inverse map; passthrough columns come back as their training constant.
    pub fn invert(&self, z: &FeatureMatrix<T>) -> Result<FeatureMatrix<T>> {
        self.check(z)?;
        Ok(z.map_values(|j, v| {
            if self.passthrough[j] {
                self.means[j]
            } else {
                v * self.stds[j] + self.means[j]
            }
        }))
    }
}

/// Fits on `x` (training rows only) and returns the standardizer.
pub fn fit_standardizer<T: Real>(x: &FeatureMatrix<T>, standardize_onehot: bool) -> Result<Standardizer<T>> {
    Standardizer::fit(x, standardize_onehot)
}

pub fn apply_standardizer<T: Real>(s: &Standardizer<T>, x: &FeatureMatrix<T>) -> Result<FeatureMatrix<T>> {
    s.apply(x)
}
