#![allow(dead_code)]

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

pub fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_mamprop"));
    c.env_remove("MAMPROP_DATA_DIR");
    c
}

pub fn data_file(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data").join(name)
}

/// Runs `mamprop <args> --out <out>` and panics with stderr on failure.
pub fn run_ok(args: &[&str], out: &Path) -> Output {
    let o = bin().args(args).arg("--out").arg(out).output().expect("binary runs");
    assert!(o.status.success(), "mamprop {args:?} failed:\n{}", String::from_utf8_lossy(&o.stderr));
    o
}

/// Every file in `dir`, by name.
pub fn snapshot(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    let mut out = BTreeMap::new();
    for e in std::fs::read_dir(dir).expect("output directory exists") {
        let p = e.unwrap().path();
        if p.is_file() {
            out.insert(p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).unwrap());
        }
    }
    out
}

pub fn read_json(path: &Path) -> serde_json::Value {
    serde_json::from_slice(&std::fs::read(path).unwrap()).unwrap()
}
