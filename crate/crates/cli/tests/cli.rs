mod common;

use common::{bin, data_file, read_json, run_ok, snapshot};

const CV: [&str; 9] = ["cv", "--task", "ys", "--model", "rf", "--featurization", "baseline", "--seed", "7"];

fn stderr(o: &std::process::Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn cv_reports_are_byte_identical_across_runs_and_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    let c = dir.path().join("c");
    run_ok(&CV, &a);
    run_ok(&[&CV[..], &["--jobs", "4"]].concat(), &c);
    run_ok(&[&CV[..], &["--jobs", "1"]].concat(), &b);
    let first = snapshot(&a);
    assert_eq!(first.keys().collect::<Vec<_>>(), ["cv_ys_rf.csv", "cv_ys_rf.json"]);
    assert_eq!(first, snapshot(&b));
    assert_eq!(first, snapshot(&c));
}

#[test]
fn report_envelope_carries_version_settings_and_digests() {
    let dir = tempfile::tempdir().unwrap();
    run_ok(&CV, dir.path());
    let v = read_json(&dir.path().join("cv_ys_rf.json"));
    assert_eq!(v["format_version"], 1);
    assert_eq!(v["command"], "cv");
    assert_eq!(v["run_config"]["run"]["seed"], 7);
    assert_eq!(v["run_config"]["model"]["model"], "rf");
    assert!(v["run_config"]["run"].get("jobs").is_none());
    let bundled = std::fs::read(data_file("records.csv")).unwrap();
    let records = &v["inputs"]["records"];
    assert_eq!(records["source"], "bundled:records.csv");
    assert_eq!(records["bytes"], bundled.len());
    assert_eq!(records["sha256"].as_str().unwrap().len(), 64);
    let folds = v["result"]["fold_r2"].as_array().unwrap();
    assert_eq!(folds.len(), 5);
}

#[test]
fn missing_input_file_is_an_io_error() {
    let o = bin().args(["cv", "--task", "ys", "--seed", "1", "--records", "/nonexistent/records.csv"]).output().unwrap();
    assert_eq!(o.status.code(), Some(2));
    let e = stderr(&o);
    let last = e.lines().last().unwrap();
    assert!(last.starts_with("error: code=E_IO msg="), "{e}");
    assert_eq!(e.lines().filter(|l| l.starts_with("error:")).count(), 1);
}

#[test]
fn malformed_table_is_a_schema_error() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("records.csv");
    std::fs::write(&bad, "foo,bar\n1,2\n").unwrap();
    let o = bin().args(["ingest", "--seed", "1", "--records"]).arg(&bad).output().unwrap();
    assert_eq!(o.status.code(), Some(3), "{}", stderr(&o));
    assert!(stderr(&o).lines().last().unwrap().starts_with("error: code=E_SCHEMA msg="));
}

#[test]
fn bad_arguments_are_validation_errors() {
    for args in [
        vec!["cv", "--task", "ys", "--k", "1", "--seed", "1"],
        vec!["cv", "--task", "strength", "--seed", "1"],
        vec!["cv", "--task", "ys", "--no-such-flag"],
        vec!["cv", "--task", "ys", "--jobs", "0", "--seed", "1"],
        vec!["tune", "--task", "ys", "--model", "ridge", "--seed", "1"],
    ] {
        let o = bin().args(&args).output().unwrap();
        assert_eq!(o.status.code(), Some(4), "{args:?}: {}", stderr(&o));
        assert!(stderr(&o).contains("error: code=E_VALIDATION msg="), "{args:?}");
    }
    let help = bin().args(["cv", "--help"]).output().unwrap();
    assert_eq!(help.status.code(), Some(0));
}

#[test]
fn failed_runs_leave_no_files_behind() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("out");
    let o = bin().args(["cv", "--task", "ys", "--k", "1", "--seed", "1", "--out"]).arg(&out).output().unwrap();
    assert!(!o.status.success());
    assert!(!out.exists());

    run_ok(&["corr", "--seed", "1"], &out);
    let names: Vec<String> = snapshot(&out).into_keys().collect();
    assert!(names.iter().all(|n| !n.ends_with(".partial")), "{names:?}");
    assert_eq!(names, ["corr.csv", "corr.json"]);
}

#[test]
fn config_file_is_merged_under_the_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(&cfg, "[run]\nseed = 3\n\n[model]\ntask = \"ys\"\nmodel = \"ridge\"\nk = 4\n").unwrap();
    let out = dir.path().join("out");
    let o = bin().args(["cv", "--model", "tree", "--config"]).arg(&cfg).arg("--out").arg(&out).output().unwrap();
    assert!(o.status.success(), "{}", stderr(&o));
    let v = read_json(&out.join("cv_ys_tree.json"));
    assert_eq!(v["run_config"]["run"]["seed"], 3);
    assert_eq!(v["run_config"]["model"]["model"], "tree");
    assert_eq!(v["run_config"]["model"]["k"], 4);
    assert_eq!(v["result"]["fold_r2"].as_array().unwrap().len(), 4);

    std::fs::write(&cfg, "[model]\nunknown_key = 1\n").unwrap();
    let o = bin().args(["cv", "--config"]).arg(&cfg).output().unwrap();
    assert_eq!(o.status.code(), Some(4), "{}", stderr(&o));
}

#[test]
fn data_directory_can_come_from_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("data");
    std::fs::create_dir(&data).unwrap();
    for name in ["materials.csv", "elements.csv"] {
        std::fs::copy(data_file(name), data.join(name)).unwrap();
    }
    std::fs::copy(data_file("oracle_records.csv"), data.join("records.csv")).unwrap();
    let out = dir.path().join("out");
    let o = bin()
        .env("MAMPROP_DATA_DIR", &data)
        .args(["ingest", "--seed", "1", "--out"])
        .arg(&out)
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", stderr(&o));
    let v = read_json(&out.join("ingest.json"));
    let source = v["inputs"]["records"]["source"].as_str().unwrap();
    assert!(source.ends_with("records.csv") && source.contains(data.to_str().unwrap()), "{source}");
    assert_eq!(v["result"]["records"], 200);
}

#[test]
fn omitted_seed_is_drawn_and_printed() {
    let dir = tempfile::tempdir().unwrap();
    let o = bin().args(["cv", "--task", "ys", "--model", "ridge", "--out"]).arg(dir.path()).output().unwrap();
    assert!(o.status.success(), "{}", stderr(&o));
    let line = stderr(&o).lines().find(|l| l.starts_with("seed: ")).map(str::to_string).expect("seed line");
    let seed: u64 = line["seed: ".len()..].parse().unwrap();
    let v = read_json(&dir.path().join("cv_ys_ridge.json"));
    assert_eq!(v["run_config"]["run"]["seed"], seed);
}

#[test]
fn discover_on_oracle_records_satisfies_the_constraints() {
    let dir = tempfile::tempdir().unwrap();
    let records = data_file("oracle_records.csv");
    run_ok(&["discover", "--label", "ys", "--condition", "as-built", "--seed", "1", "--records", records.to_str().unwrap()], dir.path());
    let v = read_json(&dir.path().join("powerlaw_ys.json"));
    let m = &v["result"];
    let residuals = m["constraint_residuals"].as_array().unwrap();
    assert_eq!(residuals.len(), 4);
    assert!(residuals.iter().all(|r| r.as_f64().unwrap().abs() <= 1e-9), "{residuals:?}");
    assert!((m["w0"].as_f64().unwrap() / 2.0 - 1.0).abs() < 0.05);
    assert!(m["fit_r2"].as_f64().unwrap() > 0.99);
}

#[test]
fn report_is_rederived_from_the_stored_cv_reports() {
    let dir = tempfile::tempdir().unwrap();
    let cvs = dir.path().join("cvs");
    for model in ["ridge", "tree"] {
        run_ok(&["cv", "--task", "ys", "--model", model, "--seed", "2"], &cvs);
    }
    run_ok(&["cv", "--task", "uts", "--model", "ridge", "--seed", "2"], &cvs);
    let out = dir.path().join("report");
    run_ok(&["report", "--seed", "0", "--inputs", cvs.to_str().unwrap()], &out);

    let r2 = |name: &str| read_json(&cvs.join(name))["result"]["mean_r2"].as_f64().unwrap();
    let best_ys = r2("cv_ys_ridge.json").max(r2("cv_ys_tree.json"));
    let csv = std::fs::read_to_string(out.join("overview.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("category,metric,best_model,value,unit"));
    let ys_r2 = csv.lines().find(|l| l.starts_with("Yield strength,R2,")).unwrap();
    assert!(ys_r2.ends_with(&format!(",{best_ys:.4},")), "{ys_r2}");
    assert_eq!(csv.lines().count(), 1 + 4);

    let again = dir.path().join("again");
    run_ok(&["report", "--seed", "0", "--inputs", cvs.to_str().unwrap()], &again);
    assert_eq!(snapshot(&out), snapshot(&again));
}

#[test]
fn explicit_json_path_names_the_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let target = dir.path().join("nested").join("mine.json");
    run_ok(&["stats", "--seed", "1"], &target);
    let names: Vec<String> = snapshot(&dir.path().join("nested")).into_keys().collect();
    assert!(names.contains(&"mine.json".to_string()), "{names:?}");
    assert!(names.iter().any(|n| n.starts_with("mine_") && n.ends_with(".csv")), "{names:?}");
}
