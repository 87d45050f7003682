//! Per-invocation state: merged settings, loaded inputs with their digests,
//! and the buffered output set that is committed at the end.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use mamprop::data::{Dataset, ElementTable, LoadOptions, MaterialRegistry, UnknownLevelPolicy};
use mamprop::{bundled, ErrorKind};
use serde::Serialize;
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use crate::fail::{CliError, CliResult};
use crate::settings::{ConfigArg, DataOpts, FileConfig, RunOpts};

pub const FORMAT_VERSION: u64 = 1;
pub const DATA_DIR_ENV: &str = "MAMPROP_DATA_DIR";

/// Where an input table came from, and its content hash.
#[derive(Debug, Clone, Serialize)]
pub struct InputDigest {
    pub source: String,
    pub sha256: String,
    pub bytes: usize,
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    Sha256::digest(bytes).iter().map(|b| format!("{b:02x}")).collect()
}

pub struct Session {
    pub command: &'static str,
    pub file: FileConfig,
    pub seed: u64,
    run: RunOpts,
    embedded: Map<String, Value>,
    digests: BTreeMap<String, InputDigest>,
    outputs: Vec<(PathBuf, Vec<u8>)>,
}

impl Session {
    /// Loads the config file, merges the run flags, sizes the thread pool and fixes the seed.
    pub fn start(command: &'static str, config: &ConfigArg, run: RunOpts) -> CliResult<Self> {
        let file = FileConfig::load(config.config.as_deref())?;
        let mut run = file.run.clone().merge(run);
        if let Some(jobs) = run.jobs {
            if jobs == 0 {
                return Err(CliError::validation("--jobs must be at least 1"));
            }
            // a second call in the same process keeps the first pool
            let _ = rayon::ThreadPoolBuilder::new().num_threads(jobs).build_global();
        }
        let seed = match run.seed {
            Some(s) => s,
            None => {
                let s = rand::random::<u64>();
                eprintln!("seed: {s}");
                s
            }
        };
        run.seed = Some(seed);
        let mut s = Session {
            command,
            file,
            seed,
            run,
            embedded: Map::new(),
            digests: BTreeMap::new(),
            outputs: Vec::new(),
        };
        s.embed("run", &s.run.clone());
        Ok(s)
    }

    /// Records a resolved option group in the report provenance.
    pub fn embed(&mut self, group: &str, value: &impl Serialize) {
        let v = serde_json::to_value(value).expect("settings serialize");
        self.embedded.insert(group.to_string(), v);
    }

    pub fn layout(&self, default_stem: &str) -> Layout {
        Layout::new(self.run.out.as_deref(), default_stem)
    }

    fn read(&mut self, key: &str, explicit: Option<&Path>, data: &DataOpts, bundled: &'static [u8]) -> CliResult<Vec<u8>> {
        let dir = data.data_dir.clone().or_else(|| std::env::var_os(DATA_DIR_ENV).map(PathBuf::from));
        let path = explicit.map(Path::to_path_buf).or_else(|| dir.map(|d| d.join(format!("{key}.csv"))));
        let (source, bytes) = match path {
            Some(p) => {
                let bytes = std::fs::read(&p).map_err(|e| CliError::io(&p, e))?;
                (p.display().to_string(), bytes)
            }
            None => (format!("bundled:{key}.csv"), bundled.to_vec()),
        };
        self.add_digest(key, source, &bytes);
        Ok(bytes)
    }

    pub fn add_digest(&mut self, key: &str, source: String, bytes: &[u8]) {
        self.digests
            .insert(key.to_string(), InputDigest { source, sha256: sha256_hex(bytes), bytes: bytes.len() });
    }

    pub fn registry(&mut self, data: &DataOpts) -> CliResult<MaterialRegistry> {
        let bytes = self.read("materials", data.materials.as_deref(), data, bundled::MATERIALS_CSV)?;
        let reg = MaterialRegistry::from_csv_bytes(&bytes, data.strict.unwrap_or(false))?;
        if !reg.warnings().is_empty() {
            eprintln!("warning: {} plausibility warnings in the material table (listed by `ingest`)", reg.warnings().len());
        }
        Ok(reg)
    }

    pub fn elements(&mut self, data: &DataOpts) -> CliResult<ElementTable> {
        let bytes = self.read("elements", data.elements.as_deref(), data, bundled::ELEMENTS_CSV)?;
        Ok(ElementTable::from_csv_bytes(&bytes)?)
    }

    pub fn records(&mut self, data: &DataOpts, registry: &MaterialRegistry) -> CliResult<Dataset> {
        let bytes = self.read("records", data.records.as_deref(), data, bundled::RECORDS_CSV)?;
        Ok(Dataset::from_csv_bytes(&bytes, registry, load_options(data)?)?)
    }

    /// Records from an explicit file, bypassing the data directory.
    pub fn records_from(&mut self, path: &Path, data: &DataOpts, registry: &MaterialRegistry) -> CliResult<Dataset> {
        let bytes = std::fs::read(path).map_err(|e| CliError::io(path, e))?;
        self.add_digest("records", path.display().to_string(), &bytes);
        Ok(Dataset::from_csv_bytes(&bytes, registry, load_options(data)?)?)
    }

    /// Report envelope: version, command, provenance and the payload.
    pub fn envelope(&self, result: &impl Serialize) -> Value {
        json!({
            "format_version": FORMAT_VERSION,
            "command": self.command,
            "run_config": Value::Object(self.embedded.clone()),
            "inputs": serde_json::to_value(&self.digests).expect("digests serialize"),
            "result": serde_json::to_value(result).map_err(|e| e.to_string()).expect("report serializes"),
        })
    }

    pub fn write_json(&mut self, path: PathBuf, value: &Value) {
        let mut bytes = serde_json::to_vec_pretty(value).expect("json serializes");
        bytes.push(b'\n');
        self.outputs.push((path, bytes));
    }

    pub fn write_report(&mut self, path: PathBuf, result: &impl Serialize) {
        let v = self.envelope(result);
        self.write_json(path, &v);
    }

    pub fn write_bytes(&mut self, path: PathBuf, bytes: Vec<u8>) {
        self.outputs.push((path, bytes));
    }

    /// Writes every buffered file to a temporary sibling, then renames them all into place.
    pub fn commit(self) -> CliResult<()> {
        let mut staged = Vec::with_capacity(self.outputs.len());
        let cleanup = |staged: &[(PathBuf, PathBuf)]| {
            for (tmp, _) in staged {
                let _ = std::fs::remove_file(tmp);
            }
        };
        for (path, bytes) in &self.outputs {
            if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
                if let Err(e) = std::fs::create_dir_all(dir) {
                    cleanup(&staged);
                    return Err(CliError::io(dir, e));
                }
            }
            let mut tmp = path.as_os_str().to_owned();
            tmp.push(".partial");
            let tmp = PathBuf::from(tmp);
            if let Err(e) = std::fs::write(&tmp, bytes) {
                cleanup(&staged);
                return Err(CliError::io(&tmp, e));
            }
            staged.push((tmp, path.clone()));
        }
        for (tmp, path) in &staged {
            std::fs::rename(tmp, path).map_err(|e| CliError::io(path, e))?;
            println!("{}", path.display());
        }
        Ok(())
    }
}

fn load_options(data: &DataOpts) -> CliResult<LoadOptions> {
    let unknown_levels = match data.unknown_levels.as_deref().map(str::to_ascii_lowercase).as_deref() {
        None | Some("reject") => UnknownLevelPolicy::Reject,
        Some("other") => UnknownLevelPolicy::MapToOther,
        Some(s) => return Err(CliError::validation(format!("unknown_levels must be reject or other, got '{s}'"))),
    };
    Ok(LoadOptions { strict: data.strict.unwrap_or(false), unknown_levels })
}

/// Output file naming: a directory with default names, or an explicit `.json` path
/// whose stem names the sibling files.
#[derive(Debug, Clone)]
pub struct Layout {
    pub dir: PathBuf,
    pub stem: String,
}

impl Layout {
    pub fn new(out: Option<&Path>, default_stem: &str) -> Self {
        match out {
            Some(p) if p.extension().is_some_and(|e| e == "json" || e == "csv") => Layout {
                dir: p.parent().map(Path::to_path_buf).unwrap_or_default(),
                stem: p.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| default_stem.into()),
            },
            Some(p) => Layout { dir: p.to_path_buf(), stem: default_stem.into() },
            None => Layout { dir: PathBuf::new(), stem: default_stem.into() },
        }
    }

    /// `<dir>/<stem><suffix>.<ext>`
    pub fn file(&self, suffix: &str, ext: &str) -> PathBuf {
        self.dir.join(format!("{}{suffix}.{ext}", self.stem))
    }

    pub fn named(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }
}

/// Serializes rows through the csv writer.
pub fn csv_bytes<S: AsRef<str>>(header: &[&str], rows: impl IntoIterator<Item = Vec<S>>) -> Vec<u8> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory csv");
    for r in rows {
        w.write_record(r.iter().map(AsRef::as_ref)).expect("in-memory csv");
    }
    w.into_inner().expect("in-memory csv")
}

pub fn fmt_f64(v: f64) -> String {
    if v.is_finite() {
        format!("{v}")
    } else {
        String::new()
    }
}

pub fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_default()
}

pub fn convergence(msg: impl Into<String>) -> CliError {
    CliError { kind: ErrorKind::Convergence, msg: msg.into() }
}
