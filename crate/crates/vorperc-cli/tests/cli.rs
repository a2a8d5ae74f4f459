//! End-to-end runs of the `vorperc` binary.

use std::path::Path;
use std::process::{Command, Output};

fn vorperc(args: &[&str], threads: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_vorperc")).args(args).env("VORPERC_THREADS", threads).output().unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn crossing_reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let mut outs = Vec::new();
    for (k, threads) in ["1", "4"].iter().enumerate() {
        let out = dir.path().join(format!("c{k}.csv"));
        let cfg = format!(
            r#"{{"schema":1,"estimator":"crossing","params":{{"n":16}},"seed":7,"replicas":10000,"out":"{}"}}"#,
            out.display()
        );
        let path = write(dir.path(), &format!("c{k}.json"), &cfg);
        let o = vorperc(&["run", &path], threads);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
        outs.push(std::fs::read(&out).unwrap());
    }
    assert_eq!(outs[0], outs[1]);
    let text = String::from_utf8(outs[0].clone()).unwrap();
    assert!(text.starts_with("experiment,estimator,params,value,stderr,n_effective,n_discarded,seed,csv_version\n"));
    assert!(text.contains("crossing.duality_violations"));
}

#[test]
fn malformed_configs_name_the_field() {
    let dir = tempfile::tempdir().unwrap();
    let cases = [
        (r#"{"estimator":"crossing","params":{"n":"sixteen"}}"#, "params.n"),
        (r#"{"estimator":"crossing","params":{"m":3}}"#, "params.m"),
        (r#"{"estimator":"frobnicate"}"#, "estimator"),
        (r#"{"params":{}}"#, "estimator"),
        (r#"{"estimator":"crossing","seed":-1}"#, "seed"),
        (r#"{"estimator":"crossing","schema":7}"#, "schema"),
        (r#"{"estimator":"crossing","colour":1}"#, "colour"),
        (r#"{"estimator":"noise","params":{"dynamics":{"kind":"sliding"}}}"#, "params.dynamics.kind"),
        (r#"{"estimator":"qm","params":{"r1":8,"r2":4}}"#, "params.r1"),
        ("[1,2", "$"),
    ];
    for (k, (cfg, field)) in cases.iter().enumerate() {
        let path = write(dir.path(), &format!("bad{k}.json"), cfg);
        let o = vorperc(&["run", &path], "1");
        assert_eq!(o.status.code(), Some(2), "{cfg}");
        let err: serde_json::Value = serde_json::from_slice(&o.stderr).unwrap();
        assert_eq!(err["field"], *field, "{cfg}: {err}");
    }
}

#[test]
fn manifest_lists_every_subcommand() {
    let o = vorperc(&["list-experiments"], "1");
    let text = String::from_utf8(o.stdout).unwrap();
    for entry in ["crossing → §1.5 duality", "cov-identity → Lemma 2.3", "halfplane-fourarm → Appendix D"] {
        assert!(text.contains(entry), "{entry}");
    }
    assert_eq!(text.lines().count(), vorperc_cli::Experiment::NAMES.len());
    for name in vorperc_cli::Experiment::NAMES {
        assert!(text.lines().any(|l| l.starts_with(&format!("{name} → "))));
    }
}

#[test]
fn smoke_suite_writes_every_artifact() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("suite.csv");
    let o = vorperc(&["suite", "--scale", "0.002", "--seed", "3", "--out", out.to_str().unwrap()], "2");
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = std::fs::read_to_string(&out).unwrap();
    for name in vorperc_cli::Experiment::NAMES.iter().filter(|&&n| n != "suite") {
        assert!(csv.lines().any(|l| l.starts_with(&format!("{name},"))), "{name} missing");
    }
    let names: Vec<String> =
        std::fs::read_dir(dir.path()).unwrap().map(|e| e.unwrap().file_name().to_string_lossy().into_owned()).collect();
    assert!(names.iter().any(|n| n.ends_with(".gp")));
    assert!(names.contains(&"suite.json".to_string()));
    assert!(names.contains(&"suite.spectral-tabulate.spectrum.bin".to_string()));
    assert!(names.iter().all(|n| n.starts_with("suite.")), "stray files: {names:?}");
}

#[test]
fn unwritable_output_fails_cleanly() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = dir.path().join("file");
    std::fs::write(&blocker, "x").unwrap();
    let out = blocker.join("sub").join("r.csv");
    let o = vorperc(&["sample", "--out", out.to_str().unwrap()], "1");
    assert_eq!(o.status.code(), Some(3));
    assert!(!out.exists());
}

#[test]
fn subcommand_flags_match_config_defaults() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let o = vorperc(&["tessellate", "--seed", "5", "--out", a.to_str().unwrap()], "1");
    assert!(o.status.success());
    let cfg = format!(r#"{{"estimator":"tessellate","seed":5,"id":"tessellate","out":"{}"}}"#, b.display());
    let path = write(dir.path(), "t.json", &cfg);
    assert!(vorperc(&["run", &path], "1").status.success());
    assert_eq!(std::fs::read(a).unwrap(), std::fs::read(b).unwrap());
}
