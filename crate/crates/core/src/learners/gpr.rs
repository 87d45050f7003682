use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg::{cholesky, cholesky_solve, dot, forward_substitute, Mat};
use crate::scalar::Real;

/// Gaussian-process posterior with an RBF kernel on standardized targets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct Gpr<T> {
    pub length_scale: T,
    pub signal_var: T,
    pub x_train: Mat<T>,
    /// (K + noise·I + jitter·I)⁻¹ ỹ
    pub alpha: Vec<T>,
    pub chol: Mat<T>,
    pub y_mean: T,
    pub y_scale: T,
    /// jitter that made the kernel matrix factorizable
    pub jitter: T,
}

pub(crate) fn rbf<T: Real>(a: &[T], b: &[T], length_scale: T, signal_var: T) -> T {
    let d2: T = a.iter().zip(b).map(|(&u, &v)| (u - v) * (u - v)).sum();
    signal_var * (-d2 / (T::lit(2.0) * length_scale * length_scale)).exp()
}

pub(crate) fn fit_gpr<T: Real>(x: &Mat<T>, y: &[T], length_scale: T, signal_var: T, noise_var: T) -> Result<Gpr<T>> {
    let n = x.rows;
    let nf = T::from_usize_lossy(n);
    let y_mean = y.iter().copied().sum::<T>() / nf;
    let var = y.iter().map(|&v| (v - y_mean) * (v - y_mean)).sum::<T>() / nf;
    let y_scale = if var > T::zero() { var.sqrt() } else { T::one() };
    let yt: Vec<T> = y.iter().map(|&v| (v - y_mean) / y_scale).collect();
    let mut k = Mat::zeros(n, n);
    for i in 0..n {
        for j in 0..=i {
            let v = rbf(x.row(i), x.row(j), length_scale, signal_var);
            k[(i, j)] = v;
            k[(j, i)] = v;
        }
        k[(i, i)] += noise_var;
    }
    let mut jitter = T::zero();
    loop {
        let mut kj = k.clone();
        if jitter > T::zero() {
            for i in 0..n {
                kj[(i, i)] += jitter;
            }
        }
        if let Some(chol) = cholesky(&kj) {
            let alpha = cholesky_solve(&chol, &yt);
            return Ok(Gpr { length_scale, signal_var, x_train: x.clone(), alpha, chol, y_mean, y_scale, jitter });
        }
        jitter = if jitter == T::zero() { T::lit(1e-10) } else { jitter * T::lit(10.0) };
        if jitter > T::lit(1e-4) * (T::one() + T::lit(1e-9)) {
            return Err(Error::Convergence(
                "GPR kernel matrix is not positive definite even with 1e-4 jitter".into(),
            ));
        }
    }
}

impl<T: Real> Gpr<T> {
    fn kvec(&self, x: &[T]) -> Vec<T> {
        (0..self.x_train.rows)
            .map(|i| rbf(self.x_train.row(i), x, self.length_scale, self.signal_var))
            .collect()
    }

    pub fn predict_row(&self, x: &[T]) -> T {
        self.y_mean + self.y_scale * dot(&self.kvec(x), &self.alpha)
    }

    /// Posterior mean and latent-function variance in label units; roundoff below zero is clamped.
    pub fn predict_with_variance(&self, x: &[T]) -> (T, T) {
        let k = self.kvec(x);
        let mean = self.y_mean + self.y_scale * dot(&k, &self.alpha);
        let v = forward_substitute(&self.chol, &k);
        let var = (self.signal_var - dot(&v, &v)).max(T::zero()) * self.y_scale * self.y_scale;
        (mean, var)
    }
}
