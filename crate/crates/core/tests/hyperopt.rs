use mamprop::data::LabelKind;
use mamprop::hyperopt::*;
use mamprop::learners::{ModelFamily, ParamValue};
use mamprop::rng;
use proptest::prelude::*;

fn log_space() -> SearchSpace {
    SearchSpace::new([("alpha".to_string(), Domain::FloatLoguniform { lo: 1e-7, hi: 1e-1 })]).unwrap()
}

fn log_objective(c: &Config) -> mamprop::Result<f64> {
    let x = c["alpha"].as_f64().unwrap();
    Ok(-(x.log10() + 4.0).powi(2))
}

fn mixed_space() -> SearchSpace {
    SearchSpace::new([
        ("n".to_string(), Domain::IntUniform { lo: 1, hi: 50 }),
        ("alpha".to_string(), Domain::FloatLoguniform { lo: 1e-5, hi: 10.0 }),
        ("kernel".to_string(), Domain::Categorical { levels: ["a", "b", "poly"].map(|s| ParamValue::Cat(s.into())).to_vec() }),
        (
            "degree".to_string(),
            Domain::Conditional {
                parent: "kernel".into(),
                level: ParamValue::Cat("poly".into()),
                domain: Box::new(Domain::Categorical { levels: [2, 3, 4].map(ParamValue::Int).to_vec() }),
            },
        ),
    ])
    .unwrap()
}

fn mixed_objective(c: &Config) -> mamprop::Result<f64> {
    let n = c["n"].as_f64().unwrap();
    let a = c["alpha"].as_f64().unwrap().log10();
    let bonus = if c.get("degree") == Some(&ParamValue::Int(3)) { 1.0 } else { 0.0 };
    Ok(bonus - (n - 17.0).abs() / 10.0 - (a + 1.0).powi(2))
}

/// Kolmogorov–Smirnov distance between the sample and U(lo, hi).
fn ks_uniform(mut xs: Vec<f64>, lo: f64, hi: f64) -> f64 {
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    xs.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = (x - lo) / (hi - lo);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

#[test]
fn log_uniform_draws_are_uniform_in_log_space() {
    let d = Domain::FloatLoguniform { lo: 1e-7, hi: 1e-1 };
    let mut r = rng::stream(2024, 0);
    let logs: Vec<f64> = (0..10_000)
        .map(|_| {
            let v = d.sample(&mut r);
            assert!(d.contains(&v));
            v.as_f64().unwrap().log10()
        })
        .collect();
    let stat = ks_uniform(logs, -7.0, -1.0);
    // critical value at α = 0.01
    assert!(stat < 1.628 / 100.0, "KS statistic {stat}");
}

#[test]
fn tpe_finds_the_log_domain_optimum_in_most_seeds() {
    let hits = (0..10u64)
        .filter(|&seed| {
            let h = tpe_search(&log_space(), log_objective, 50, seed, TpeOptions::default()).unwrap();
            let best = h.best().unwrap().config["alpha"].as_f64().unwrap();
            (best.log10() + 4.0).abs() < 0.5
        })
        .count();
    assert!(hits >= 8, "optimum found in {hits}/10 seeds");
}

#[test]
fn one_trial_past_startup_is_the_only_guided_one() {
    let opts = TpeOptions::default();
    let h = tpe_search(&mixed_space(), mixed_objective, opts.n_startup + 1, 5, opts).unwrap();
    assert_eq!(h.len(), opts.n_startup + 1);
    let random = random_search(&mixed_space(), mixed_objective, opts.n_startup + 1, 5).unwrap();
    assert_eq!(h.trials()[..opts.n_startup], random.trials()[..opts.n_startup]);
    assert!(tpe_search(&mixed_space(), mixed_objective, opts.n_startup, 5, opts).is_err());
}

#[test]
fn single_random_trial() {
    assert_eq!(random_search(&log_space(), log_objective, 1, 0).unwrap().len(), 1);
}

#[test]
fn flat_objective_keeps_the_first_trial_as_best() {
    let h = tpe_search(&mixed_space(), |_: &Config| Ok(0.5), 30, 3, TpeOptions::default()).unwrap();
    assert_eq!(h.len(), 30);
    assert_eq!(h.best().unwrap().index, 0);
}

#[test]
fn failed_trials_are_recorded_and_skipped() {
    let mut calls = 0;
    let h = tpe_search(
        &log_space(),
        |c: &Config| {
            calls += 1;
            if calls % 3 == 0 {
                Err(mamprop::Error::Convergence("diverged".into()))
            } else {
                log_objective(c)
            }
        },
        25,
        1,
        TpeOptions::default(),
    )
    .unwrap();
    let failed = h.trials().iter().filter(|t| t.objective.is_none()).count();
    assert_eq!(failed, 8);
    assert!(h.best().unwrap().objective.is_some());
}

#[test]
fn grid_covers_every_active_combination() {
    let pts = grid_points(&mixed_space(), 3).unwrap();
    // n: 3, alpha: 3, kernel a/b: 2 + poly with 3 degrees
    assert_eq!(pts.len(), 3 * 3 * (2 + 3));
    assert!(pts.iter().all(|c| mixed_space().admits(c)));
}

#[test]
fn builtin_ranges_and_reference_optima() {
    let rf = builtin_space(LabelKind::Ys, ModelFamily::RandomForest).unwrap();
    assert_eq!(rf.params["n_estimators"], Domain::IntUniform { lo: 1, hi: 500 });
    let svr = builtin_space(LabelKind::Ys, ModelFamily::Svr).unwrap();
    assert_eq!(svr.params["C"], Domain::IntUniform { lo: 1, hi: 1000 });
    let mlp = builtin_space(LabelKind::Rz, ModelFamily::Mlp).unwrap();
    assert_eq!(mlp.params["alpha"], Domain::FloatLoguniform { lo: 1e-7, hi: 1e-1 });

    let hrc = reference_optimum(LabelKind::Hrc, ModelFamily::Svr).unwrap();
    assert_eq!(hrc["C"], ParamValue::Int(234));
    assert_eq!(hrc["kernel"], ParamValue::Cat("poly".into()));
    assert_eq!(hrc["degree"], ParamValue::Int(3));
    assert!(svr.admits(&hrc));
    assert_eq!(reference_optimum(LabelKind::Ys, ModelFamily::RandomForest).unwrap()["n_estimators"], ParamValue::Int(382));
    assert!(builtin_space(LabelKind::Ys, ModelFamily::Ridge).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn tpe_is_reproducible_and_stays_in_the_domain(seed in any::<u64>()) {
        let space = mixed_space();
        let a = tpe_search(&space, mixed_objective, 25, seed, TpeOptions::default()).unwrap();
        let b = tpe_search(&space, mixed_objective, 25, seed, TpeOptions::default()).unwrap();
        prop_assert_eq!(&a, &b);
        for t in a.trials() {
            prop_assert!(space.admits(&t.config), "{:?}", t.config);
            let poly = t.config["kernel"] == ParamValue::Cat("poly".into());
            prop_assert_eq!(t.config.contains_key("degree"), poly);
        }
    }

    #[test]
    fn best_is_the_running_maximum(values in proptest::collection::vec(prop_oneof![(-1e3f64..1e3), Just(f64::NAN)], 1..60)) {
        let mut h = TrialHistory::new();
        let mut running: Option<(usize, f64)> = None;
        for (i, &v) in values.iter().enumerate() {
            h.push(Config::new(), Ok(v));
            if v.is_finite() && running.is_none_or(|(_, b)| v > b) {
                running = Some((i, v));
            }
            prop_assert_eq!(h.best().map(|t| (t.index, t.objective.unwrap())), running);
        }
    }
}
