use std::path::Path;
use std::process::{Command, Output};

fn bin(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_aniso-lp"))
        .args(args)
        .current_dir(dir)
        .env_remove("ANISO_LP_REPORT_DIR")
        .env("RUST_LOG", "warn")
        .output()
        .unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

const SMALL: &str = r#"{
  "grid": [8, 8, 8],
  "params": { "eps": 0.1, "alpha": 0.1, "beta": 0.5, "gamma": 0.02 },
  "delta": 0.5,
  "lambda": 1.0,
  "dt": 0.01,
  "t_end": 0.03,
  "a0": { "kind": "random", "amplitude": 0.1, "envelope": 1.0 },
  "v0": { "kind": "random", "amplitude": 0.05, "envelope": 1.0 }
}"#;

fn small_config(dir: &Path) -> String {
    let p = dir.join("base.json");
    std::fs::write(&p, SMALL).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn bony_suite_exits_zero() {
    let d = tempfile::tempdir().unwrap();
    let o = bin(d.path(), &["verify", "--suite", "bony_reconstruction", "--grid", "16", "--seed", "1", "--trials", "2"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    assert!(d.path().join("out/reports/bony_reconstruction.json").exists());
    assert!(d.path().join("out/reports/index.json").exists());
}

#[test]
fn report_dir_env_overrides_out() {
    let d = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_aniso-lp"))
        .args(["verify", "--suite", "damping", "--trials", "3"])
        .current_dir(d.path())
        .env("ANISO_LP_REPORT_DIR", d.path().join("elsewhere"))
        .output()
        .unwrap();
    assert_eq!(code(&o), 0);
    assert!(d.path().join("elsewhere/reports/damping.json").exists());
}

#[test]
fn missing_config_exits_two() {
    let d = tempfile::tempdir().unwrap();
    assert_eq!(code(&bin(d.path(), &["run", "--config", "missing.json"])), 2);
}

#[test]
fn unknown_suite_and_bad_flags_exit_two() {
    let d = tempfile::tempdir().unwrap();
    assert_eq!(code(&bin(d.path(), &["verify", "--suite", "nope"])), 2);
    assert_eq!(code(&bin(d.path(), &["frobnicate"])), 2);
}

#[test]
fn unknown_override_key_exits_two() {
    let d = tempfile::tempdir().unwrap();
    let c = small_config(d.path());
    assert_eq!(code(&bin(d.path(), &["run", "--config", &c, "--set", "params.zeta=1"])), 2);
    assert_eq!(code(&bin(d.path(), &["run", "--config", &c, "--set", "dt=-1"])), 2);
}

#[test]
fn unknown_file_key_exits_two() {
    let d = tempfile::tempdir().unwrap();
    let p = d.path().join("bad.json");
    std::fs::write(&p, SMALL.replace("\"dt\"", "\"bogus\": 1, \"dt\"")).unwrap();
    assert_eq!(code(&bin(d.path(), &["run", "--config", p.to_str().unwrap()])), 2);
}

#[test]
fn run_echoes_resolved_config_and_reproduces() {
    let d = tempfile::tempdir().unwrap();
    let c = small_config(d.path());
    let o = bin(d.path(), &["run", "--config", &c, "--set", "t_end=0.02", "--seed", "7", "--out", "a"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let echoed: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(d.path().join("a/config.json")).unwrap()).unwrap();
    assert_eq!(echoed["t_end"], 0.02);
    assert_eq!(echoed["seed"], 7);

    let again = d.path().join("a/config.json");
    let o = bin(d.path(), &["run", "--config", again.to_str().unwrap(), "--out", "b"]);
    assert_eq!(code(&o), 0);
    for f in ["diagnostics.csv", "cl_v1.csv", "pressure.csv"] {
        let x = std::fs::read(d.path().join("a").join(f)).unwrap();
        let y = std::fs::read(d.path().join("b").join(f)).unwrap();
        assert_eq!(x, y, "{f}");
    }
}

#[test]
fn strict_run_exits_three_on_halt() {
    let d = tempfile::tempdir().unwrap();
    let c = small_config(d.path());
    let args = ["run", "--config", &c, "--set", "lambda=1000", "--out", "h"];
    assert_eq!(code(&bin(d.path(), &args)), 0);
    let mut strict = args.to_vec();
    strict.push("--strict");
    assert_eq!(code(&bin(d.path(), &strict)), 3);
}

#[test]
fn sweep_writes_report_with_slope() {
    let d = tempfile::tempdir().unwrap();
    let c = small_config(d.path());
    let o = bin(d.path(), &["sweep", "--eps", "0.2,0.1,0.05", "--config", &c, "--jobs", "1"]);
    assert!(code(&o) <= 1, "{}", String::from_utf8_lossy(&o.stderr));
    let r: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(d.path().join("out/reports/sweep.json")).unwrap()).unwrap();
    assert!(r["slope"].is_f64());
    assert_eq!(r["runs"].as_array().unwrap().len(), 3);
    assert!(d.path().join("out/sweep/eps_0.1/verdict.json").exists());
}

#[test]
fn norms_and_pressure_check_write_json() {
    let d = tempfile::tempdir().unwrap();
    let c = small_config(d.path());
    assert_eq!(code(&bin(d.path(), &["norms", "--config", &c])), 0);
    let n: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(d.path().join("out/norms.json")).unwrap()).unwrap();
    assert!(n["x_norms"]["x2"].as_f64().unwrap() > 0.0);

    assert_eq!(code(&bin(d.path(), &["pressure-check", "--config", &c])), 0);
    let p: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(d.path().join("out/pressure_check.json")).unwrap()).unwrap();
    assert!(p["residual"].as_f64().unwrap() < 1e-10);
    assert!(p["reconstruction_error"].as_f64().unwrap() < 1e-8 * p["q_l2"].as_f64().unwrap());
}
