//! Hyperparameter search maximizing an objective: grid, random and TPE.

mod builtin;
mod history;
mod search;
mod space;
mod tpe;

pub use builtin::{builtin_space, reference_optimum};
pub use history::{Trial, TrialHistory, TrialStatus};
pub use search::{grid_points, grid_search, random_search};
pub use space::{apply, Config, Domain, SearchSpace};
pub use tpe::{tpe_search, TpeOptions};

use crate::evaluation::cv_matrix;
use crate::features::FeatureMatrix;
use crate::learners::LearnerConfig;
use crate::Result;

/// Mean k-fold R² of `base` with the trial's assignment applied.
pub fn cv_objective<'a>(
    base: &'a LearnerConfig,
    x: &'a FeatureMatrix<f64>,
    y: &'a [f64],
    k: usize,
    seed: u64,
    standardize_onehot: bool,
) -> impl Fn(&Config) -> Result<f64> + Sync + 'a {
    move |c| {
        let cfg = apply(base, c)?;
        Ok(cv_matrix(&cfg, x, y, k, seed, standardize_onehot)?.mean_r2())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::LabelKind;
    use crate::learners::{ModelFamily, ParamValue};

    fn one(name: &str, d: Domain) -> SearchSpace {
        SearchSpace::new([(name.to_string(), d)]).unwrap()
    }

    #[test]
    fn grid_finds_the_exhaustive_max() {
        let s = one("x", Domain::Categorical { levels: vec![ParamValue::Int(1), ParamValue::Int(2), ParamValue::Int(3)] });
        let h = grid_search(&s, |c| Ok(-(c["x"].as_f64().unwrap() - 2.0).powi(2)), 10).unwrap();
        assert_eq!(h.len(), 3);
        assert_eq!(h.best().unwrap().config["x"], ParamValue::Int(2));
    }

    #[test]
    fn grid_order_is_deterministic() {
        let s = SearchSpace::new([
            ("a".to_string(), Domain::IntUniform { lo: 0, hi: 1 }),
            ("b".to_string(), Domain::IntUniform { lo: 5, hi: 6 }),
        ])
        .unwrap();
        let pts = grid_points(&s, 10).unwrap();
        let pairs: Vec<(f64, f64)> = pts.iter().map(|c| (c["a"].as_f64().unwrap(), c["b"].as_f64().unwrap())).collect();
        assert_eq!(pairs, vec![(0.0, 5.0), (0.0, 6.0), (1.0, 5.0), (1.0, 6.0)]);
    }

    #[test]
    fn conditional_degree_only_under_poly() {
        let s = builtin_space(LabelKind::Ys, ModelFamily::Svr).unwrap();
        let pts = grid_points(&s, 2).unwrap();
        // C at 2 points × (3 kernels + poly × 3 degrees)
        assert_eq!(pts.len(), 2 * 6);
        for p in &pts {
            assert_eq!(p.contains_key("degree"), p["kernel"] == ParamValue::Cat("poly".into()));
            assert!(s.admits(p));
        }
    }

    #[test]
    fn random_search_is_seeded() {
        let s = builtin_space(LabelKind::Rz, ModelFamily::Mlp).unwrap();
        let f = |c: &Config| Ok(c["alpha"].as_f64().unwrap());
        let a = random_search(&s, f, 5, 3).unwrap();
        let b = random_search(&s, f, 5, 3).unwrap();
        assert_eq!(a, b);
        assert_eq!(random_search(&s, f, 1, 3).unwrap().len(), 1);
        assert!(random_search(&s, f, 0, 3).is_err());
    }

    #[test]
    fn failed_trials_are_recorded_not_fatal() {
        let s = one("x", Domain::IntUniform { lo: 0, hi: 10 });
        let h = tpe_search(
            &s,
            |c| {
                let x = c["x"].as_f64().unwrap();
                if x < 5.0 {
                    Err(crate::Error::Convergence("boom".into()))
                } else {
                    Ok(x)
                }
            },
            15,
            0,
            TpeOptions::default(),
        )
        .unwrap();
        assert_eq!(h.len(), 15);
        assert!(h.trials().iter().any(|t| matches!(t.status, TrialStatus::Failed(_))));
    }

    #[test]
    fn apply_sets_svr_kernel_before_degree() {
        let base = ModelFamily::Svr.default_config();
        let cfg = apply(&base, &reference_optimum(LabelKind::Hrc, ModelFamily::Svr).unwrap()).unwrap();
        assert!(matches!(
            cfg,
            LearnerConfig::Svr { c, kernel: crate::learners::KernelSpec::Poly { degree: 3, .. }, .. } if c == 234.0
        ));
    }

    #[test]
    fn uncovered_family_is_an_error() {
        assert!(builtin_space(LabelKind::Ys, ModelFamily::Ridge).is_err());
    }
}
