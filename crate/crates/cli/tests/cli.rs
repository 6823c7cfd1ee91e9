use std::fs::File;
use std::path::Path;
use std::process::Command;

use mpcgs::data_io::{read_trace, write_libsvm, TraceFormat};
use mpcgs::problems::make_classification;
use mpcgs_cli::{bound_table, run, RunConfig, Verdict};

fn cli(dir: &Path, config: &str) -> std::process::Output {
    let path = dir.join("run.cfg");
    std::fs::write(&path, config).unwrap();
    Command::new(env!("CARGO_BIN_EXE_mpcgs-cli"))
        .current_dir(dir)
        .args(["run", "run.cfg"])
        .output()
        .unwrap()
}

#[test]
fn synthetic_run_writes_bounded_trace_and_manifest() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("trace.csv");
    let cfg = RunConfig::parse(&format!(
        "solver=mpcgs problem=synthetic dx=8 dy=4 kappa=4 iters=6 seed=1 out={}",
        out.display()
    ))
    .unwrap();
    let outcome = run(&cfg).unwrap();
    let records = read_trace(File::open(&out).unwrap(), TraceFormat::Csv).unwrap();
    assert_eq!(records.len(), 6);
    assert!(records.iter().all(|r| r.theory_bound.is_some()));
    assert_eq!(bound_table(&records).verdict, Verdict::Pass { checked: 6 });
    let manifest: serde_json::Value =
        serde_json::from_reader(File::open(&outcome.manifest_path).unwrap()).unwrap();
    assert_eq!(manifest["schedule"]["solver"], "mpcgs");
    assert_eq!(manifest["constants"]["mu"], 1.0);
    assert_eq!(manifest["config"]["seed"], 1);
}

#[test]
fn robust_mc_lambda_auto_and_label_mapping() {
    let dir = tempfile::tempdir().unwrap();
    let data = make_classification(4, 30, 6, 3).unwrap();
    write_libsvm(&data, File::create(dir.path().join("train.libsvm")).unwrap()).unwrap();
    let o = cli(
        dir.path(),
        "solver=mpscgs problem=robust_mc data=train.libsvm tau=100 lambda=auto iters=2 scale=0.001 out=t.json\n",
    );
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let manifest: serde_json::Value =
        serde_json::from_reader(File::open(dir.path().join("t.json.manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["dataset"]["lambda"], 1.0 / 30.0);
    assert_eq!(manifest["dataset"]["label_mapping"], serde_json::json!([1.0, 2.0, 3.0]));
    assert_eq!(manifest["constants_source"], "estimated");
    assert!(manifest["deviations"][0].as_str().unwrap().starts_with("scale=0.001"));
    let records = read_trace(File::open(dir.path().join("t.json")).unwrap(), TraceFormat::Json).unwrap();
    assert_eq!(records.len(), 2);
}

#[test]
fn failures_exit_nonzero_with_distinct_diagnostics() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        ("solver=newton problem=synthetic", 2, "valid solvers: mpcgs, mpscgs, spfw"),
        ("solver=mpcgs problem=synthetic step=3", 2, "unknown key `step`"),
        ("solver=mpcgs problem=synthetic kappa=0.5", 2, "kappa must be at least 1"),
        ("solver=mpcgs problem=robust_mc data=missing.libsvm", 3, "does not exist"),
    ];
    for (config, code, needle) in cases {
        let o = cli(dir.path(), config);
        let err = String::from_utf8_lossy(&o.stderr);
        assert_eq!(o.status.code(), Some(code), "{config}: {err}");
        assert!(err.contains(needle), "{config}: {err}");
    }
}

#[test]
fn bound_table_without_bound() {
    let dir = tempfile::tempdir().unwrap();
    let o = cli(dir.path(), "solver=spfw problem=synthetic iters=4 out=spfw.csv");
    assert!(o.status.success());
    let o = Command::new(env!("CARGO_BIN_EXE_mpcgs-cli"))
        .current_dir(dir.path())
        .args(["bound-table", "spfw.csv"])
        .output()
        .unwrap();
    assert!(o.status.success());
    assert_eq!(String::from_utf8_lossy(&o.stdout), "no bound recorded\n");
}
