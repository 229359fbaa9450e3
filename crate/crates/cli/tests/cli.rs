use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn bandlab(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bandlab"))
        .args(args)
        .env("BANDLAB_OUT", out)
        .output()
        .expect("spawn bandlab")
}

fn write_config(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn unknown_subcommand_is_usage_error() {
    let tmp = tempfile::tempdir().unwrap();
    let o = bandlab(&["frobnicate"], tmp.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn curves_default_run_succeeds_and_writes_manifest() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("run");
    let o = bandlab(&["curves"], &out);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    for f in ["curves.csv", "sigma_d.csv", "crossings.csv", "curves.svg", "report.json", "config.json", "manifest.json"] {
        assert!(out.join(f).is_file(), "missing {f}");
    }
    let m = bandlab::experiments::verify_manifest(&out).unwrap();
    assert!(m.passed);
    assert_eq!(m.outputs.len(), 6);
}

#[test]
fn rerun_is_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = write_config(tmp.path(), "q.json", r#"{"ws": [8, 16], "n_samples": 3}"#);
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    for d in [&a, &b] {
        let o = bandlab(&["que", "--config", &cfg, "--seed", "9", "--out", d.to_str().unwrap()], tmp.path());
        assert!(o.status.code() == Some(0) || o.status.code() == Some(1));
    }
    for f in ["que_decay.csv", "report.json", "config.json"] {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap(), "{f} differs");
    }
    let seed_line = fs::read_to_string(a.join("config.json")).unwrap();
    assert!(seed_line.contains("\"seed\": 9"));
}

#[test]
fn unstable_flow_step_names_the_bound() {
    let tmp = tempfile::tempdir().unwrap();
    let o = bandlab(&["flow", "--set", "dt=1.0"], tmp.path());
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("0.1*N*min s_ij"), "{err}");
    assert!(!tmp.path().join("manifest.json").exists());
}

#[test]
fn config_errors_exit_two() {
    let tmp = tempfile::tempdir().unwrap();
    let bad = write_config(tmp.path(), "bad.json", "{\"w\": 3,\n \"e_steps\": }");
    let o = bandlab(&["curves", "--config", &bad], tmp.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));

    let unknown = write_config(tmp.path(), "unknown.json", r#"{"bogus": 1}"#);
    let o = bandlab(&["curves", "--config", &unknown], tmp.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("bogus"));

    let o = bandlab(&["curves", "--set", "e_steps=0"], tmp.path());
    assert_eq!(o.status.code(), Some(2));
    let o = bandlab(&["gaps", "--set", "n_samples=0"], tmp.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn failing_check_exits_one() {
    let tmp = tempfile::tempdir().unwrap();
    // A KS threshold of zero cannot be met.
    let o = bandlab(&["flow", "--set", "ks_threshold=0", "--set", "n_paths=50", "--set", "var_paths=50", "--set", "var_times=[0.1]"], tmp.path());
    assert_eq!(o.status.code(), Some(1), "{}", String::from_utf8_lossy(&o.stderr));
    let m = bandlab::experiments::verify_manifest(tmp.path()).unwrap();
    assert!(!m.passed);
}
