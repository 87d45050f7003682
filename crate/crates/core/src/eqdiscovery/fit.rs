use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::dims::{constraints, target_dimension, ConstraintForm, ConstraintSet, DimensionVector, QuantitySource, QuantityTable};
use crate::data::{Dataset, LabelKind, MaterialRegistry, PostProcessing, Subprocess};
use crate::error::{validation, Result};
use crate::evaluation::r2;
use crate::linalg::{lu_solve, Mat};
use crate::rng;

const START_STREAM: u64 = 0xE0;
const RANK_TOL: f64 = 1e-12;

/// Positive SI inputs (one column per quantity) and SI targets.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerLawData {
    pub x: Mat<f64>,
    pub y: Vec<f64>,
    /// dataset index of every row
    pub row_ids: Vec<usize>,
    pub condition: Option<String>,
}

/// Which records enter a fit.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RecordFilter {
    pub condition: Option<PostProcessing>,
    pub subprocess: Option<Subprocess>,
}

impl PowerLawData {
    pub fn new(x: Mat<f64>, y: Vec<f64>) -> Result<Self> {
        if x.rows != y.len() {
            return Err(validation!("{} targets for {} rows", y.len(), x.rows));
        }
        let d = PowerLawData { row_ids: (0..x.rows).collect(), x, y, condition: None };
        d.check_positive()?;
        Ok(d)
    }

    fn check_positive(&self) -> Result<()> {
        if let Some(p) = self.x.data.iter().position(|v| !(*v > 0.0 && v.is_finite())) {
            return Err(validation!(
                "power-law input at row {} column {} is {}; every quantity must be positive",
                self.row_ids[p / self.x.cols],
                p % self.x.cols,
                self.x.data[p]
            ));
        }
        if let Some(i) = self.y.iter().position(|v| !(*v > 0.0 && v.is_finite())) {
            return Err(validation!("power-law target at row {} is {}; targets must be positive", self.row_ids[i], self.y[i]));
        }
        Ok(())
    }

    /// Valid records carrying the label and all quantities, converted to SI.
    pub fn from_dataset(
        ds: &Dataset,
        registry: &MaterialRegistry,
        table: &QuantityTable,
        label: LabelKind,
        filter: &RecordFilter,
    ) -> Result<Self> {
        let (_, y_factor) = target_dimension(label)?;
        let mut data = Vec::new();
        let (mut y, mut ids) = (Vec::new(), Vec::new());
        'rows: for (i, r) in ds.records().iter().enumerate() {
            if !ds.status()[i].is_valid()
                || filter.condition.as_ref().is_some_and(|c| *c != r.post_processing)
                || filter.subprocess.is_some_and(|s| s != r.subprocess)
            {
                continue;
            }
            let Some(target) = r.label(label) else { continue };
            let Some(mat) = registry.get(&r.material) else { continue };
            let mut row = Vec::with_capacity(table.len());
            for q in &table.quantities {
                let raw = match q.source {
                    QuantitySource::Process(f) => match r.numeric(f) {
                        Some(v) => v,
                        None => continue 'rows,
                    },
                    QuantitySource::Material(p) => mat.property(p),
                    QuantitySource::MeltingDelta => mat.melting_temperature - table.t0,
                };
                row.push(raw * q.si_factor);
            }
            data.extend(row);
            y.push(target * y_factor);
            ids.push(i);
        }
        if y.is_empty() {
            return Err(validation!("no records carry {label} together with all {} power-law quantities", table.len()));
        }
        let d = PowerLawData {
            x: Mat::from_rows(y.len(), table.len(), data),
            y,
            row_ids: ids,
            condition: filter.condition.as_ref().map(|c| c.as_str().into_owned()),
        };
        d.check_positive()?;
        Ok(d)
    }

    pub fn len(&self) -> usize {
        self.y.len()
    }

    pub fn is_empty(&self) -> bool {
        self.y.is_empty()
    }

    fn log_x(&self) -> Mat<f64> {
        Mat { rows: self.x.rows, cols: self.x.cols, data: self.x.data.iter().map(|v| v.ln()).collect() }
    }
}

/// Solution of the log-space least-squares problem.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LogLinearFit {
    pub w0: f64,
    pub w: Vec<f64>,
    /// R² of log y
    pub log_r2: f64,
}

fn column_means(m: &Mat<f64>) -> Vec<f64> {
    (0..m.cols).map(|j| (0..m.rows).map(|i| m[(i, j)]).sum::<f64>() / m.rows as f64).collect()
}

/// Minimizes ‖log y − log w₀ − Σ wᵢ log xᵢ‖², subject to `cons` when given, by
/// solving the stationarity (KKT) system directly.
fn loglinear(data: &PowerLawData, cons: Option<&ConstraintSet>) -> Result<LogLinearFit> {
    data.check_positive()?;
    let lx = data.log_x();
    let ly: Vec<f64> = data.y.iter().map(|v| v.ln()).collect();
    let (n, p) = (lx.rows, lx.cols);
    let mu = column_means(&lx);
    let ly_mean = ly.iter().sum::<f64>() / n as f64;
    // centered design [1 | log x − μ]
    let z = |i: usize, j: usize| if j == 0 { 1.0 } else { lx[(i, j - 1)] - mu[j - 1] };
    let nc = cons.map_or(0, |c| c.a.rows);
    let dim = p + 1 + nc;
    let mut kkt = Mat::zeros(dim, dim);
    let mut rhs = vec![0.0; dim];
    for i in 0..n {
        for a in 0..=p {
            let za = z(i, a);
            rhs[a] += za * (ly[i] - ly_mean);
            for b in 0..=p {
                kkt[(a, b)] += za * z(i, b);
            }
        }
    }
    if let Some(c) = cons {
        if c.a.cols != p {
            return Err(validation!("constraints cover {} exponents, data has {p} quantities", c.a.cols));
        }
        for r in 0..nc {
            for j in 0..p {
                kkt[(p + 1 + r, 1 + j)] = c.a[(r, j)];
                kkt[(1 + j, p + 1 + r)] = c.a[(r, j)];
            }
            rhs[p + 1 + r] = c.b[r];
        }
    }
    let sol = lu_solve(&kkt, &rhs, RANK_TOL).ok_or_else(|| {
        validation!(
            "the constrained log-linear system is rank deficient; some quantities are collinear \
             (for example identical layer thickness and beam diameter columns) or too few distinct rows"
        )
    })?;
    let mut w: Vec<f64> = sol[1..=p].to_vec();
    if let Some(c) = cons {
        project(c, &mut w)?;
    }
    let log_c = ly_mean + sol[0] - w.iter().zip(&mu).map(|(a, b)| a * b).sum::<f64>();
    let fitted: Vec<f64> = (0..n).map(|i| log_c + (0..p).map(|j| w[j] * lx[(i, j)]).sum::<f64>()).collect();
    let log_r2 = if n >= 2 { r2(&ly, &fitted).unwrap_or(f64::NAN) } else { f64::NAN };
    Ok(LogLinearFit { w0: log_c.exp(), w, log_r2 })
}

pub fn fit_loglinear(data: &PowerLawData, cons: &ConstraintSet) -> Result<LogLinearFit> {
    loglinear(data, Some(cons))
}

pub fn fit_loglinear_unconstrained(data: &PowerLawData) -> Result<LogLinearFit> {
    loglinear(data, None)
}

/// Least-norm correction putting `w` exactly on `A w = b`.
fn project(c: &ConstraintSet, w: &mut [f64]) -> Result<()> {
    let aat = c.a.matmul(&c.a.transpose());
    let r = c.residuals(w);
    let lam = lu_solve(&aat, &r, RANK_TOL).ok_or_else(|| validation!("the constraint rows are linearly dependent"))?;
    for (j, wj) in w.iter_mut().enumerate() {
        *wj -= (0..c.a.rows).map(|k| c.a[(k, j)] * lam[k]).sum::<f64>();
    }
    Ok(())
}

/// Orthonormal basis of the null space of `A`, as columns.
fn null_space(a: &Mat<f64>) -> Result<Mat<f64>> {
    let p = a.cols;
    let aat = a.matmul(&a.transpose());
    let mut basis: Vec<Vec<f64>> = Vec::new();
    for j in 0..p {
        // projection of e_j onto null(A)
        let col: Vec<f64> = (0..a.rows).map(|k| a[(k, j)]).collect();
        let lam = lu_solve(&aat, &col, RANK_TOL).ok_or_else(|| validation!("the constraint rows are linearly dependent"))?;
        let mut v: Vec<f64> = (0..p).map(|i| if i == j { 1.0 } else { 0.0 }).collect();
        for (i, vi) in v.iter_mut().enumerate() {
            *vi -= (0..a.rows).map(|k| a[(k, i)] * lam[k]).sum::<f64>();
        }
        for _ in 0..2 {
            for b in &basis {
                let d: f64 = b.iter().zip(&v).map(|(x, y)| x * y).sum();
                v.iter_mut().zip(b).for_each(|(x, y)| *x -= d * y);
            }
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 1e-8 {
            basis.push(v.into_iter().map(|x| x / norm).collect());
        }
    }
    let mut n = Mat::zeros(p, basis.len());
    for (k, b) in basis.iter().enumerate() {
        for i in 0..p {
            n[(i, k)] = b[i];
        }
    }
    Ok(n)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PowerLawOptions {
    pub max_iter: usize,
    /// relative objective decrease below which a start stops
    pub tol: f64,
    pub n_starts: usize,
    /// standard deviation of the exponent perturbation for extra starts
    pub perturbation: f64,
    pub seed: u64,
    pub form: ConstraintForm,
}

impl Default for PowerLawOptions {
    fn default() -> Self {
        PowerLawOptions { max_iter: 500, tol: 1e-12, n_starts: 8, perturbation: 0.1, seed: 0, form: ConstraintForm::Derived }
    }
}

/// Identified power law `y = w₀ Π xᵢ^{wᵢ}` in SI units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerLawModel {
    pub label: LabelKind,
    pub symbols: Vec<String>,
    pub w0: f64,
    /// units of w0 implied by the exponents
    pub w0_units: String,
    pub w: Vec<f64>,
    pub condition: Option<String>,
    pub t0: f64,
    pub constraint_form: ConstraintForm,
    /// `A w − b` per base unit (kg, m, s, K)
    pub constraint_residuals: Vec<f64>,
    pub fit_r2: f64,
    pub loglinear_r2: f64,
    pub n_rows: usize,
    pub converged: bool,
    pub iterations: usize,
    pub start: usize,
    /// objective (sum of squared relative residuals) after each accepted step of the chosen start
    pub objective_trace: Vec<f64>,
    pub equation: String,
}

struct StartResult {
    w: Vec<f64>,
    log_c: f64,
    objective: f64,
    converged: bool,
    iterations: usize,
    trace: Vec<f64>,
}

/// Levenberg–Marquardt on (log w₀, z) with `w = w_init + N z`, so every iterate
/// satisfies the constraints exactly. Steps are accepted only if the objective drops.
fn refine(lx: &Mat<f64>, y: &[f64], nb: &Mat<f64>, w_init: &[f64], log_c0: f64, opts: &PowerLawOptions) -> StartResult {
    let (n, p, q) = (lx.rows, lx.cols, nb.cols);
    let scale = y.iter().sum::<f64>() / n as f64;
    // directions in log space: column 0 is the multiplier, the rest the null-space basis
    let mut dir = Mat::zeros(n, q + 1);
    for i in 0..n {
        dir[(i, 0)] = 1.0;
        for k in 0..q {
            dir[(i, k + 1)] = (0..p).map(|j| lx[(i, j)] * nb[(j, k)]).sum();
        }
    }
    let base: Vec<f64> = (0..n).map(|i| (0..p).map(|j| lx[(i, j)] * w_init[j]).sum()).collect();
    let eval = |theta: &[f64]| -> (Vec<f64>, f64) {
        let yhat: Vec<f64> =
            (0..n).map(|i| (base[i] + (0..=q).map(|k| dir[(i, k)] * theta[k]).sum::<f64>()).exp()).collect();
        let f = yhat.iter().zip(y).map(|(a, b)| ((a - b) / scale).powi(2)).sum::<f64>();
        (yhat, if f.is_finite() { f } else { f64::INFINITY })
    };
    let mut theta = vec![0.0; q + 1];
    theta[0] = log_c0;
    let (mut yhat, mut f) = eval(&theta);
    let mut trace = vec![f];
    let mut lambda = 1e-3;
    let mut converged = false;
    let mut iterations = 0;
    while iterations < opts.max_iter {
        iterations += 1;
        let mut jtj = Mat::zeros(q + 1, q + 1);
        let mut jtr = vec![0.0; q + 1];
        for i in 0..n {
            let r = (yhat[i] - y[i]) / scale;
            let g = yhat[i] / scale;
            for a in 0..=q {
                let ja = g * dir[(i, a)];
                jtr[a] += ja * r;
                for b in 0..=q {
                    jtj[(a, b)] += ja * g * dir[(i, b)];
                }
            }
        }
        let grad_norm = jtr.iter().map(|v| v * v).sum::<f64>().sqrt();
        if grad_norm <= 1e-14 * (1.0 + f) {
            converged = true;
            break;
        }
        let mut accepted = false;
        for _ in 0..40 {
            let mut m = jtj.clone();
            for a in 0..=q {
                m[(a, a)] += lambda * (jtj[(a, a)] + 1e-12);
            }
            let neg: Vec<f64> = jtr.iter().map(|v| -v).collect();
            let Some(step) = lu_solve(&m, &neg, 1e-300) else {
                lambda *= 10.0;
                continue;
            };
            let trial: Vec<f64> = theta.iter().zip(&step).map(|(a, b)| a + b).collect();
            let (yt, ft) = eval(&trial);
            if ft < f {
                let decrease = f - ft;
                theta = trial;
                yhat = yt;
                f = ft;
                trace.push(f);
                lambda = (lambda / 3.0).max(1e-12);
                accepted = true;
                if decrease <= opts.tol * f.max(1e-300) {
                    converged = true;
                }
                break;
            }
            lambda *= 4.0;
        }
        if !accepted {
            // no descent direction left at machine precision
            converged = true;
        }
        if converged {
            break;
        }
    }
    let w: Vec<f64> = (0..p).map(|j| w_init[j] + (0..q).map(|k| nb[(j, k)] * theta[k + 1]).sum::<f64>()).collect();
    StartResult { w, log_c: theta[0], objective: f, converged, iterations, trace }
}

/// Constrained original-space fit started from the log-linear solution plus
/// perturbed restarts; the lowest objective wins, ties going to the earlier start.
pub fn fit_powerlaw(
    data: &PowerLawData,
    table: &QuantityTable,
    label: LabelKind,
    opts: &PowerLawOptions,
) -> Result<PowerLawModel> {
    if data.x.cols != table.len() {
        return Err(validation!("data has {} quantities, the table {}", data.x.cols, table.len()));
    }
    let (target, _) = target_dimension(label)?;
    let cons = constraints(table, target, opts.form);
    let init = fit_loglinear(data, &cons)?;
    let nb = null_space(&cons.a)?;
    let lx = data.log_x();
    let starts: Vec<(Vec<f64>, f64)> = (0..opts.n_starts.max(1))
        .map(|s| {
            if s == 0 {
                return (init.w.clone(), init.w0.ln());
            }
            let mut r = rng::stream(opts.seed, rng::stream_id(&[START_STREAM, s as u64]));
            let normal = Normal::new(0.0, opts.perturbation.max(0.0)).expect("finite perturbation");
            let mut w = init.w.clone();
            for k in 0..nb.cols {
                let dz: f64 = normal.sample(&mut r);
                for (j, wj) in w.iter_mut().enumerate() {
                    *wj += nb[(j, k)] * dz;
                }
            }
            // best multiplier for these exponents in the original space
            let g: Vec<f64> = (0..lx.rows).map(|i| (0..lx.cols).map(|j| lx[(i, j)] * w[j]).sum::<f64>().exp()).collect();
            let c = g.iter().zip(&data.y).map(|(a, b)| a * b).sum::<f64>() / g.iter().map(|a| a * a).sum::<f64>();
            (w, if c > 0.0 && c.is_finite() { c.ln() } else { init.w0.ln() })
        })
        .collect();
    let results: Vec<StartResult> =
        starts.par_iter().map(|(w, c)| refine(&lx, &data.y, &nb, w, *c, opts)).collect();
    let (start, best) = results
        .into_iter()
        .enumerate()
        .reduce(|a, b| if b.1.objective < a.1.objective { b } else { a })
        .expect("at least one start");
    let mut w = best.w;
    project(&cons, &mut w)?;
    let mut model = PowerLawModel {
        label,
        symbols: table.symbols(),
        w0: best.log_c.exp(),
        w0_units: String::new(),
        constraint_residuals: cons.residuals(&w),
        w,
        condition: data.condition.clone(),
        t0: table.t0,
        constraint_form: opts.form,
        fit_r2: f64::NAN,
        loglinear_r2: init.log_r2,
        n_rows: data.len(),
        converged: best.converged,
        iterations: best.iterations,
        start,
        objective_trace: best.trace,
        equation: String::new(),
    };
    model.w0_units = w0_units(table, target, &model.w);
    model.fit_r2 = powerlaw_r2(&model, &data.x, &data.y)?;
    model.equation = super::format::render_equation(&model);
    Ok(model)
}

/// `target − Σ wᵢ dimᵢ`, rounded for display.
fn w0_units(table: &QuantityTable, target: DimensionVector, w: &[f64]) -> String {
    let d = table.product_dimension(w);
    let t = target.as_f64();
    let parts: Vec<String> = super::dims::BASE_UNITS
        .iter()
        .enumerate()
        .filter_map(|(u, name)| {
            let e = t[u] - d[u];
            (e.abs() > 1e-9).then(|| format!("{name}^{}", (e * 1e4).round() / 1e4))
        })
        .collect();
    if parts.is_empty() {
        "1".into()
    } else {
        parts.join(" ")
    }
}

/// `w₀ Π xᵢ^{wᵢ}` for every row of SI inputs.
pub fn evaluate_powerlaw(m: &PowerLawModel, x: &Mat<f64>) -> Result<Vec<f64>> {
    if x.cols != m.w.len() {
        return Err(validation!("input has {} quantities, the model {}", x.cols, m.w.len()));
    }
    if let Some(p) = x.data.iter().position(|v| !(*v > 0.0)) {
        return Err(validation!("non-positive power-law input at row {} column {}", p / x.cols, p % x.cols));
    }
    let lw0 = m.w0.ln();
    Ok((0..x.rows)
        .map(|i| (lw0 + x.row(i).iter().zip(&m.w).map(|(v, w)| w * v.ln()).sum::<f64>()).exp())
        .collect())
}

pub fn powerlaw_r2(m: &PowerLawModel, x: &Mat<f64>, y: &[f64]) -> Result<f64> {
    r2(y, &evaluate_powerlaw(m, x)?)
}
