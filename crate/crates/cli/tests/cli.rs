use std::process::{Command, Output};

use ring_dynamics::search::PeriodicOrbit;
use ring_dynamics::verify::Report;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ring-dynamics"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn value(out: &str, key: &str) -> Option<String> {
    out.lines().find_map(|l| l.strip_prefix(&format!("{key} = ")).map(str::to_string))
}

#[test]
fn eval_on_axis() {
    let o = run(&["eval", "--at", "0,0,1"]);
    assert!(o.status.success());
    assert_eq!(value(&stdout(&o), "V").unwrap(), "-0.7071067811865476");
}

#[test]
fn eval_on_source_is_usage_error() {
    let o = run(&["eval", "--at", "1,0,0"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("point on source"));
}

#[test]
fn eval_oracle_agrees() {
    let o = run(&["eval", "--at", "2,0,0", "--oracle"]);
    assert!(o.status.success());
    let d: f64 = value(&stdout(&o), "rel_diff_V").unwrap().parse().unwrap();
    assert!(d <= 1e-10);
}

#[test]
fn eval_rejects_bad_point() {
    assert_eq!(run(&["eval", "--at", "1,2"]).status.code(), Some(2));
    assert_eq!(run(&["eval", "--at", "a,0,0"]).status.code(), Some(2));
    assert_eq!(run(&["--mass", "-1", "eval", "--at", "0,0,1"]).status.code(), Some(2));
}

#[test]
fn spiral_zero_momentum_is_usage_error() {
    let o = run(&["search", "spiral", "--K", "0"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("K must be nonzero"));
}

#[test]
fn far_search_writes_roundtrip_json() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().to_str().unwrap();
    let o = run(&["search", "far", "--eps", "0.1", "--out", out]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(dir.path().join("far.json")).unwrap();
    let orbit = PeriodicOrbit::from_json(&text).unwrap();
    assert_eq!(orbit.to_json() + "\n", text);
    assert!(orbit.closure_error <= 1e-8);
    assert!(dir.path().join("far.csv").exists() && dir.path().join("far.dat").exists());
}

#[test]
fn search_output_is_deterministic() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    for d in [&a, &b] {
        let o = run(&["search", "near", "--eps", "0.05", "--formats", "json,csv", "--out", d.path().to_str().unwrap()]);
        assert!(o.status.success());
    }
    for f in ["near.json", "near.csv"] {
        assert_eq!(std::fs::read(a.path().join(f)).unwrap(), std::fs::read(b.path().join(f)).unwrap());
    }
    assert!(!a.path().join("near.dat").exists());
}

#[test]
fn config_file_and_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "# unit ring\nsystem.rho = 2\nsystem.mass = 1\n").unwrap();
    let o = run(&["--config", cfg.to_str().unwrap(), "eval", "--at", "0,0,0"]);
    assert_eq!(value(&stdout(&o), "V").unwrap(), "-0.5");
    let o = run(&["--config", cfg.to_str().unwrap(), "--rho", "1", "eval", "--at", "0,0,0"]);
    assert_eq!(value(&stdout(&o), "V").unwrap(), "-1");
    std::fs::write(&cfg, "system.radius = 2\n").unwrap();
    assert_eq!(run(&["--config", cfg.to_str().unwrap(), "eval", "--at", "0,0,0"]).status.code(), Some(2));
}

#[test]
fn integrate_until_event_writes_trace() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("fall.csv");
    let o = run(&["integrate", "--init", "2,1,0,0", "--until", "event:z-cross-down", "--out", path.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let out = stdout(&o);
    assert_eq!(value(&out, "termination").unwrap(), "event z-cross-down");
    let drift: f64 = value(&out, "energy_drift").unwrap().parse().unwrap();
    assert!(drift <= 1e-9);
    assert!(path.exists());
    assert_eq!(run(&["integrate", "--init", "2,1,0,0", "--until", "event:nope"]).status.code(), Some(2));
}

#[test]
fn verify_lemmas_json() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("lemmas.json");
    let o = run(&["verify", "lemmas", "--json", path.to_str().unwrap()]);
    assert!(o.status.success());
    let rep = Report::from_json(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert!(rep.pass && rep.violations.is_empty());
}

#[test]
fn verify_hill_needs_negative_energy() {
    assert_eq!(run(&["verify", "hill", "--delta", "0.1"]).status.code(), Some(2));
    let o = run(&["--euler", "verify", "hill", "--delta", "-1"]);
    assert!(o.status.success());
    let r: f64 = value(&stdout(&o), "R_delta").unwrap().parse().unwrap();
    assert!(r <= 3.0);
}

#[test]
fn verify_pointing_passes() {
    let o = run(&["verify", "pointing"]);
    assert!(o.status.success(), "{}", stdout(&o));
    assert!(stdout(&o).contains("pointing PASS"));
}

#[test]
fn verify_wire_states_verdict() {
    let o = run(&["verify", "wire"]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.contains("measured limit constant") && (out.contains("agrees") || out.contains("DISAGREES")));
}
