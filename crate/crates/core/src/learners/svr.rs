use serde::{Deserialize, Serialize};

use crate::linalg::{dot, Mat};
use crate::scalar::Real;

/// Kernel with every parameter resolved.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ResolvedKernel {
    Linear,
    Poly { degree: u32, gamma: f64, coef0: f64 },
    Rbf { gamma: f64 },
    Sigmoid { gamma: f64, coef0: f64 },
}

impl ResolvedKernel {
    pub fn eval<T: Real>(&self, a: &[T], b: &[T]) -> T {
        match *self {
            ResolvedKernel::Linear => dot(a, b),
            ResolvedKernel::Poly { degree, gamma, coef0 } => {
                (T::lit(gamma) * dot(a, b) + T::lit(coef0)).powi(degree as i32)
            }
            ResolvedKernel::Rbf { gamma } => {
                let d2: T = a.iter().zip(b).map(|(&u, &v)| (u - v) * (u - v)).sum();
                (-T::lit(gamma) * d2).exp()
            }
            ResolvedKernel::Sigmoid { gamma, coef0 } => (T::lit(gamma) * dot(a, b) + T::lit(coef0)).tanh(),
        }
    }
}

/// ε-SVR decision function `Σ βᵢ K(sᵢ, x) − rho` over the support vectors.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "T: Real")]
pub struct Svr<T> {
    pub kernel: ResolvedKernel,
    pub support: Mat<T>,
    pub coef: Vec<T>,
    pub rho: T,
    /// β for every training row, kept for KKT checks
    pub dual: Vec<T>,
}

impl<T: Real> Svr<T> {
    pub fn predict_row(&self, x: &[T]) -> T {
        (0..self.support.rows)
            .map(|i| self.coef[i] * self.kernel.eval(self.support.row(i), x))
            .sum::<T>()
            - self.rho
    }
}

pub(crate) struct SvrFit<T> {
    pub model: Svr<T>,
    pub iterations: usize,
    pub converged: bool,
}

/// SMO over the 2n-variable dual (α, α*) with second-order working-set selection;
/// stops when the maximal KKT violation drops below `tol`.
pub(crate) fn fit_svr<T: Real>(x: &Mat<T>, y: &[T], c: T, epsilon: T, kernel: ResolvedKernel, max_iter: usize, tol: T) -> SvrFit<T> {
    let l = x.rows;
    let mut k = Mat::zeros(l, l);
    for i in 0..l {
        for j in 0..=i {
            let v = kernel.eval(x.row(i), x.row(j));
            k[(i, j)] = v;
            k[(j, i)] = v;
        }
    }
    let sign = |t: usize| if t < l { T::one() } else { -T::one() };
    let q = |s: usize, t: usize| sign(s) * sign(t) * k[(s % l, t % l)];
    let qd: Vec<T> = (0..2 * l).map(|t| k[(t % l, t % l)]).collect();
    let tau = T::lit(1e-12);

    let mut a = vec![T::zero(); 2 * l];
    let mut g: Vec<T> = (0..2 * l)
        .map(|t| if t < l { epsilon - y[t] } else { epsilon + y[t - l] })
        .collect();
    let upper = |a: &[T], t: usize| a[t] >= c;
    let lower = |a: &[T], t: usize| a[t] <= T::zero();

    let mut iterations = 0;
    let mut converged = false;
    while iterations < max_iter {
        let mut gmax = T::neg_infinity();
        let mut i_sel = None;
        for t in 0..2 * l {
            if t < l {
                if !upper(&a, t) && -g[t] >= gmax {
                    gmax = -g[t];
                    i_sel = Some(t);
                }
            } else if !lower(&a, t) && g[t] >= gmax {
                gmax = g[t];
                i_sel = Some(t);
            }
        }
        let Some(i) = i_sel else {
            converged = true;
            break;
        };
        let yi = sign(i);
        let mut gmax2 = T::neg_infinity();
        let mut j_sel = None;
        let mut best = T::infinity();
        for t in 0..2 * l {
            let (grad_diff, quad) = if t < l {
                if lower(&a, t) {
                    continue;
                }
                gmax2 = gmax2.max(g[t]);
                (gmax + g[t], qd[i] + qd[t] - T::lit(2.0) * yi * q(i, t))
            } else {
                if upper(&a, t) {
                    continue;
                }
                gmax2 = gmax2.max(-g[t]);
                (gmax - g[t], qd[i] + qd[t] + T::lit(2.0) * yi * q(i, t))
            };
            if grad_diff > T::zero() {
                let obj = -(grad_diff * grad_diff) / if quad > T::zero() { quad } else { tau };
                if obj <= best {
                    best = obj;
                    j_sel = Some(t);
                }
            }
        }
        if gmax + gmax2 < tol {
            converged = true;
            break;
        }
        let Some(j) = j_sel else {
            converged = true;
            break;
        };
        iterations += 1;

        let (old_i, old_j) = (a[i], a[j]);
        let qij = q(i, j);
        if sign(i) != sign(j) {
            let mut quad = qd[i] + qd[j] + T::lit(2.0) * qij;
            if quad <= T::zero() {
                quad = tau;
            }
            let delta = (-g[i] - g[j]) / quad;
            let diff = a[i] - a[j];
            a[i] += delta;
            a[j] += delta;
            if diff > T::zero() {
                if a[j] < T::zero() {
                    a[j] = T::zero();
                    a[i] = diff;
                }
            } else if a[i] < T::zero() {
                a[i] = T::zero();
                a[j] = -diff;
            }
            if diff > T::zero() {
                if a[i] > c {
                    a[i] = c;
                    a[j] = c - diff;
                }
            } else if a[j] > c {
                a[j] = c;
                a[i] = c + diff;
            }
        } else {
            let mut quad = qd[i] + qd[j] - T::lit(2.0) * qij;
            if quad <= T::zero() {
                quad = tau;
            }
            let delta = (g[i] - g[j]) / quad;
            let sum = a[i] + a[j];
            a[i] -= delta;
            a[j] += delta;
            if sum > c {
                if a[i] > c {
                    a[i] = c;
                    a[j] = sum - c;
                }
            } else if a[j] < T::zero() {
                a[j] = T::zero();
                a[i] = sum;
            }
            if sum > c {
                if a[j] > c {
                    a[j] = c;
                    a[i] = sum - c;
                }
            } else if a[i] < T::zero() {
                a[i] = T::zero();
                a[j] = sum;
            }
        }
        let (di, dj) = (a[i] - old_i, a[j] - old_j);
        for (t, gt) in g.iter_mut().enumerate() {
            *gt += q(i, t) * di + q(j, t) * dj;
        }
    }

    // rho from free variables, or the midpoint of the feasible interval
    let (mut ub, mut lb) = (T::infinity(), T::neg_infinity());
    let (mut sum_free, mut n_free) = (T::zero(), 0usize);
    for t in 0..2 * l {
        let yg = sign(t) * g[t];
        let pos = t < l;
        if upper(&a, t) {
            if pos {
                lb = lb.max(yg);
            } else {
                ub = ub.min(yg);
            }
        } else if lower(&a, t) {
            if pos {
                ub = ub.min(yg);
            } else {
                lb = lb.max(yg);
            }
        } else {
            n_free += 1;
            sum_free += yg;
        }
    }
    let rho = if n_free > 0 {
        sum_free / T::from_usize_lossy(n_free)
    } else if ub.is_finite() && lb.is_finite() {
        (ub + lb) / T::lit(2.0)
    } else if ub.is_finite() {
        ub
    } else {
        lb
    };

    let dual: Vec<T> = (0..l).map(|i| a[i] - a[i + l]).collect();
    let keep: Vec<usize> = (0..l).filter(|&i| dual[i] != T::zero()).collect();
    let mut data = Vec::with_capacity(keep.len() * x.cols);
    for &i in &keep {
        data.extend_from_slice(x.row(i));
    }
    SvrFit {
        model: Svr {
            kernel,
            support: Mat::from_rows(keep.len(), x.cols, data),
            coef: keep.iter().map(|&i| dual[i]).collect(),
            rho,
            dual,
        },
        iterations,
        converged,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_svr_tracks_a_line() {
        let n = 30;
        let xs: Vec<f64> = (0..n).map(|i| i as f64 / 10.0).collect();
        let y: Vec<f64> = xs.iter().map(|v| 2.0 * v + 1.0).collect();
        let x = Mat::from_rows(n, 1, xs.clone());
        let fit = fit_svr(&x, &y, 100.0, 0.01, ResolvedKernel::Linear, 100_000, 1e-6);
        assert!(fit.converged);
        for i in 0..n {
            assert!((fit.model.predict_row(x.row(i)) - y[i]).abs() <= 0.01 + 1e-4);
        }
    }
}
