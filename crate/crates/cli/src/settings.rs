//! Run settings: one table per option group, readable from a TOML file and
//! overridable key by key from the command line.

use std::path::{Path, PathBuf};

use clap::Args;
use serde::{Deserialize, Serialize};

use crate::fail::{CliError, CliResult};

macro_rules! group {
    (
        $(#[$meta:meta])*
        $name:ident {
            $( $(#[$fmeta:meta])* $field:ident : $ty:ty ),* $(,)?
        }
    ) => {
        $(#[$meta])*
        #[derive(Debug, Clone, Default, PartialEq, Args, Serialize, Deserialize)]
        #[serde(default, deny_unknown_fields)]
        pub struct $name {
            $(
                $(#[$fmeta])*
                #[serde(skip_serializing_if = "Option::is_none")]
                pub $field: Option<$ty>,
            )*
        }

        impl $name {
            /// Keys set in `over` replace those in `self`.
            pub fn merge(self, over: Self) -> Self {
                Self { $( $field: over.$field.or(self.$field), )* }
            }
        }
    };
}

group! {
    /// Input tables.
    DataOpts {
        /// directory holding materials.csv, elements.csv and records.csv [env: MAMPROP_DATA_DIR]
        #[arg(long)]
        data_dir: PathBuf,
        #[arg(long)]
        materials: PathBuf,
        #[arg(long)]
        elements: PathBuf,
        #[arg(long)]
        records: PathBuf,
        /// plausibility warnings and invalid records become errors
        #[arg(long, num_args = 0..=1, default_missing_value = "true")]
        strict: bool,
        /// unrecognised post-processing levels: reject | other
        #[arg(long)]
        unknown_levels: String,
    }
}

group! {
    /// Seed, parallelism and output location.
    RunOpts {
        /// master seed; a random one is drawn and printed when omitted
        #[arg(long)]
        seed: u64,
        /// worker threads
        #[arg(long)]
        #[serde(skip_serializing)]
        jobs: usize,
        /// output directory, or a .json file for the primary report
        #[arg(long)]
        #[serde(skip_serializing)]
        out: PathBuf,
    }
}

group! {
    /// Task, learner and featurization.
    ModelOpts {
        /// ys | uts | e_mod | elongation | hv | hrc | rz
        #[arg(long)]
        task: String,
        /// rf | gb | xgb | svr | nn | gpr | ridge | lasso | tree | mean
        #[arg(long)]
        model: String,
        /// baseline | composition | elemental
        #[arg(long)]
        featurization: String,
        /// extra process columns: scan_speed, beam_diameter
        #[arg(long, value_delimiter = ',')]
        extra: Vec<String>,
        /// also standardize one-hot columns
        #[arg(long, num_args = 0..=1, default_missing_value = "true")]
        standardize_onehot: bool,
        /// best-config file written by `tune`
        #[arg(long)]
        params: PathBuf,
        /// hyperparameter override, name=value; repeatable
        #[arg(long = "set", value_name = "NAME=VALUE")]
        set: Vec<String>,
        /// number of folds
        #[arg(long)]
        k: usize,
    }
}

group! {
    /// Hyperparameter search.
    TuneOpts {
        /// tpe | random | grid
        #[arg(long)]
        method: String,
        #[arg(long)]
        trials: usize,
        /// grid points per numeric axis
        #[arg(long)]
        resolution: usize,
    }
}

group! {
    /// Feature importance.
    ImportanceOpts {
        /// drop | gain | shap
        #[arg(long)]
        method: String,
    }
}

group! {
    /// SHAP attributions for a trained model.
    ShapOpts {
        /// model file written by `train`
        #[arg(long)]
        model: PathBuf,
        /// records to explain; defaults to the configured record table
        #[arg(long)]
        data: PathBuf,
        /// background rows
        #[arg(long)]
        background: usize,
        /// rows explained
        #[arg(long)]
        instances: usize,
        /// also report one-hot groups summed
        #[arg(long, num_args = 0..=1, default_missing_value = "true")]
        group: bool,
    }
}

group! {
    /// Power-law discovery.
    DiscoverOpts {
        /// ys | uts | e_mod
        #[arg(long)]
        label: String,
        /// post-processing condition; "any" disables the filter
        #[arg(long)]
        condition: String,
        #[arg(long)]
        subprocess: String,
        /// reference temperature in °C
        #[arg(long)]
        t0: f64,
        /// use the constraint rows as printed instead of the derived ones
        #[arg(long, num_args = 0..=1, default_missing_value = "true")]
        paper_constraints: bool,
        /// multistart count
        #[arg(long)]
        starts: usize,
    }
}

group! {
    /// Learning curves.
    CurveOpts {
        #[arg(long, value_delimiter = ',')]
        fractions: Vec<f64>,
        #[arg(long)]
        repeats: usize,
    }
}

group! {
    /// Label correlations.
    CorrOpts {
        /// restrict to one material
        #[arg(long)]
        material: String,
        #[arg(long, value_delimiter = ',')]
        labels: Vec<String>,
    }
}

group! {
    /// Summary statistics.
    StatsOpts {
        #[arg(long)]
        bins: usize,
    }
}

group! {
    /// Aggregation of stored reports.
    ReportOpts {
        /// cv report files or directories containing them
        #[arg(long, value_delimiter = ',')]
        inputs: Vec<PathBuf>,
    }
}

group! {
    /// Synthetic record generation.
    SynthOpts {
        /// sample | oracle | as-built-ys
        #[arg(long)]
        kind: String,
        /// number of records
        #[arg(long)]
        n: usize,
        /// alloys drawn from, for power-law kinds
        #[arg(long)]
        n_materials: usize,
        /// relative multiplicative noise, for power-law kinds
        #[arg(long)]
        noise: f64,
        #[arg(long)]
        t0: f64,
    }
}

/// Everything a config file may contain.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FileConfig {
    pub data: DataOpts,
    pub run: RunOpts,
    pub model: ModelOpts,
    pub tune: TuneOpts,
    pub importance: ImportanceOpts,
    pub shap: ShapOpts,
    pub discover: DiscoverOpts,
    pub curve: CurveOpts,
    pub corr: CorrOpts,
    pub stats: StatsOpts,
    pub report: ReportOpts,
    pub synth: SynthOpts,
}

impl FileConfig {
    pub fn load(path: Option<&Path>) -> CliResult<Self> {
        let Some(path) = path else {
            return Ok(Self::default());
        };
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        toml::from_str(&text).map_err(|e| CliError::validation(format!("config {}: {}", path.display(), e.message())))
    }
}

/// Config-file path accepted by every subcommand.
#[derive(Debug, Clone, Default, Args)]
pub struct ConfigArg {
    /// TOML file with [data], [run], [model], ... tables; flags take precedence
    #[arg(long)]
    pub config: Option<PathBuf>,
}
