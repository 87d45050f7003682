use super::space::{Config, Domain, SearchSpace};
use crate::data::LabelKind;
use crate::error::{validation, Result};
use crate::learners::{ModelFamily, ParamValue};

const KERNELS: [&str; 4] = ["linear", "poly", "rbf", "sigmoid"];
const WIDTHS: [i64; 5] = [32, 64, 128, 256, 512];

fn cat(levels: impl IntoIterator<Item = ParamValue>) -> Domain {
    Domain::Categorical { levels: levels.into_iter().collect() }
}

/// Search ranges studied for each task; they are the same for every task.
pub fn builtin_space(task: LabelKind, family: ModelFamily) -> Result<SearchSpace> {
    let _ = task;
    let params: Vec<(String, Domain)> = match family {
        ModelFamily::RandomForest | ModelFamily::GradientBoosting => {
            vec![("n_estimators".into(), Domain::IntUniform { lo: 1, hi: 500 })]
        }
        ModelFamily::Svr => vec![
            ("C".into(), Domain::IntUniform { lo: 1, hi: 1000 }),
            ("kernel".into(), cat(KERNELS.map(|k| ParamValue::Cat(k.into())))),
            (
                "degree".into(),
                Domain::Conditional {
                    parent: "kernel".into(),
                    level: ParamValue::Cat("poly".into()),
                    domain: Box::new(cat([2, 3, 4].map(ParamValue::Int))),
                },
            ),
        ],
        ModelFamily::Mlp => {
            let mut p: Vec<(String, Domain)> =
                (1..=3).map(|k| (format!("neurons_{k}"), cat(WIDTHS.map(ParamValue::Int)))).collect();
            p.push(("alpha".into(), Domain::FloatLoguniform { lo: 1e-7, hi: 1e-1 }));
            p
        }
        other => return Err(validation!("no built-in search space for {other} models")),
    };
    SearchSpace::new(params)
}

/// Best configuration reported for each (task, family) pair.
pub fn reference_optimum(task: LabelKind, family: ModelFamily) -> Option<Config> {
    use LabelKind::*;
    let int = |v: i64| ParamValue::Int(v);
    let mut c = Config::new();
    match family {
        ModelFamily::RandomForest => {
            let n = match task {
                Ys => 382,
                Uts => 500,
                EMod => 43,
                Elongation => 463,
                Hv => 492,
                Hrc => 297,
                Rz => 42,
            };
            c.insert("n_estimators".into(), int(n));
        }
        ModelFamily::GradientBoosting => {
            let n = match task {
                Ys => 500,
                Uts => 500,
                EMod => 316,
                Elongation => 462,
                Hv => 192,
                Hrc => 235,
                Rz => 42,
            };
            c.insert("n_estimators".into(), int(n));
        }
        ModelFamily::Svr => {
            let (cost, kernel, degree) = match task {
                Ys => (698, "poly", Some(2)),
                Uts => (982, "rbf", None),
                EMod => (43, "rbf", None),
                Elongation => (982, "rbf", None),
                Hv => (975, "rbf", None),
                Hrc => (234, "poly", Some(3)),
                Rz => (42, "rbf", None),
            };
            c.insert("C".into(), int(cost));
            c.insert("kernel".into(), ParamValue::Cat(kernel.into()));
            if let Some(d) = degree {
                c.insert("degree".into(), int(d));
            }
        }
        ModelFamily::Mlp => {
            let (widths, alpha) = match task {
                Ys => ([128, 256, 32], 0.04943663345976882),
                Uts => ([256, 256, 512], 0.04030067181655384),
                EMod => ([32, 512, 256], 0.041329503263237435),
                Elongation => ([128, 32, 64], 0.04074280425105631),
                Hv => ([32, 256, 32], 0.04925337472160725),
                Hrc => ([32, 128, 128], 0.06155030321486836),
                Rz => ([512, 32, 128], 0.06833260439770075),
            };
            for (k, w) in widths.iter().enumerate() {
                c.insert(format!("neurons_{}", k + 1), int(*w));
            }
            c.insert("alpha".into(), ParamValue::Float(alpha));
        }
        _ => return None,
    }
    Some(c)
}
