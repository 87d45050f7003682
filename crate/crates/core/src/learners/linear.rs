use serde::{Deserialize, Serialize};

use crate::error::{validation, Result};
use crate::linalg::{cholesky, cholesky_solve, lu_solve, Mat};
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct Linear<T> {
    pub weights: Vec<T>,
    pub intercept: T,
}

impl<T: Real> Linear<T> {
    pub fn predict_row(&self, x: &[T]) -> T {
        self.intercept + x.iter().zip(&self.weights).map(|(&a, &w)| a * w).sum::<T>()
    }
}

struct Centered<T> {
    xc: Mat<T>,
    yc: Vec<T>,
    x_mean: Vec<T>,
    y_mean: T,
}

fn center<T: Real>(x: &Mat<T>, y: &[T]) -> Centered<T> {
    let n = T::from_usize_lossy(x.rows);
    let mut x_mean = vec![T::zero(); x.cols];
    for i in 0..x.rows {
        for (m, &v) in x_mean.iter_mut().zip(x.row(i)) {
            *m += v;
        }
    }
    x_mean.iter_mut().for_each(|m| *m /= n);
    let y_mean = y.iter().copied().sum::<T>() / n;
    let mut xc = x.clone();
    for i in 0..x.rows {
        for j in 0..x.cols {
            xc[(i, j)] -= x_mean[j];
        }
    }
    Centered { xc, yc: y.iter().map(|&v| v - y_mean).collect(), x_mean, y_mean }
}

/// Minimizes ‖y − Xw − b‖² + λ‖w‖² with the intercept unpenalized.
pub(crate) fn fit_ridge<T: Real>(x: &Mat<T>, y: &[T], lambda: T) -> Result<Linear<T>> {
    let c = center(x, y);
    let mut a = c.xc.gram();
    for j in 0..a.rows {
        a[(j, j)] += lambda;
    }
    let rhs = c.xc.tmatvec(&c.yc);
    let w = match cholesky(&a) {
        Some(l) => cholesky_solve(&l, &rhs),
        None => lu_solve(&a, &rhs, T::epsilon() * T::lit(64.0))
            .ok_or_else(|| validation!("ridge normal equations are singular; increase lambda or remove collinear columns"))?,
    };
    let intercept = c.y_mean - c.x_mean.iter().zip(&w).map(|(&m, &wj)| m * wj).sum::<T>();
    Ok(Linear { weights: w, intercept })
}

fn soft_threshold<T: Real>(z: T, t: T) -> T {
    if z > t {
        z - t
    } else if z < -t {
        z + t
    } else {
        T::zero()
    }
}

/// Smallest λ for which every lasso coefficient is zero: max_j |x_jᵀ(y − ȳ)| / n.
pub fn lasso_lambda_max<T: Real>(x: &Mat<T>, y: &[T]) -> T {
    let c = center(x, y);
    let n = T::from_usize_lossy(x.rows);
    c.xc.tmatvec(&c.yc).into_iter().fold(T::zero(), |m, v| m.max(v.abs() / n))
}

pub(crate) struct LassoFit<T> {
    pub model: Linear<T>,
    pub iterations: usize,
    pub converged: bool,
}

/// Cyclic coordinate descent on (1/2n)‖y − Xw − b‖² + λ‖w‖₁; stops when the
/// largest coefficient change in a sweep falls below `tol`.
pub(crate) fn fit_lasso<T: Real>(x: &Mat<T>, y: &[T], lambda: T, max_iter: usize, tol: T) -> LassoFit<T> {
    let c = center(x, y);
    let (n, d) = (x.rows, x.cols);
    let nf = T::from_usize_lossy(n);
    let col_sq: Vec<T> = (0..d)
        .map(|j| (0..n).map(|i| c.xc[(i, j)] * c.xc[(i, j)]).sum::<T>() / nf)
        .collect();
    let mut w = vec![T::zero(); d];
    let mut resid = c.yc.clone();
    let mut converged = false;
    let mut iterations = 0;
    while iterations < max_iter {
        iterations += 1;
        let mut max_delta = T::zero();
        for j in 0..d {
            if col_sq[j] <= T::zero() {
                continue;
            }
            let rho = (0..n).map(|i| c.xc[(i, j)] * resid[i]).sum::<T>() / nf + col_sq[j] * w[j];
            let new = soft_threshold(rho, lambda) / col_sq[j];
            let delta = new - w[j];
            if delta != T::zero() {
                for (i, r) in resid.iter_mut().enumerate() {
                    *r -= c.xc[(i, j)] * delta;
                }
                w[j] = new;
            }
            max_delta = max_delta.max(delta.abs());
        }
        if max_delta < tol {
            converged = true;
            break;
        }
    }
    let intercept = c.y_mean - c.x_mean.iter().zip(&w).map(|(&m, &wj)| m * wj).sum::<T>();
    LassoFit { model: Linear { weights: w, intercept }, iterations, converged }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn lasso_above_lambda_max_is_all_zero() {
        let x = Mat::from_rows(5, 2, vec![1.0, 0.0, 2.0, 1.0, 3.0, 0.0, 4.0, 1.0, 5.0, 3.0]);
        let y = [1.0, 3.0, 2.0, 5.0, 4.0];
        let lmax = lasso_lambda_max(&x, &y);
        let fit = fit_lasso(&x, &y, lmax, 1000, 1e-10);
        assert!(fit.converged);
        assert!(fit.model.weights.iter().all(|&w| w == 0.0));
        assert_eq!(fit.model.intercept, 3.0);
        let below = fit_lasso(&x, &y, lmax * 0.5, 1000, 1e-10);
        assert!(below.model.weights.iter().any(|&w| w != 0.0));
    }

    #[test]
    fn ridge_recovers_exact_linear_map() {
        let x = Mat::from_rows(4, 2, vec![1.0, 2.0, 0.0, 1.0, 3.0, -1.0, 2.0, 2.0]);
        let y: Vec<f64> = (0..4).map(|i| 0.5 + 2.0 * x[(i, 0)] - 3.0 * x[(i, 1)]).collect();
        let m = fit_ridge(&x, &y, 0.0).unwrap();
        assert!((m.weights[0] - 2.0).abs() < 1e-12);
        assert!((m.weights[1] + 3.0).abs() < 1e-12);
        assert!((m.intercept - 0.5).abs() < 1e-12);
    }
}
