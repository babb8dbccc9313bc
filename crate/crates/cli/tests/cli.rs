use std::path::PathBuf;
use std::process::{Command, Output};

fn workdir(name: &str) -> PathBuf {
    let d = std::env::temp_dir().join(format!("schubart-cli-{}-{name}", std::process::id()));
    let _ = std::fs::remove_dir_all(&d);
    std::fs::create_dir_all(&d).unwrap();
    d
}

fn run(dir: &PathBuf, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_schubart")).current_dir(dir).args(args).output().unwrap()
}

fn read_json(path: PathBuf) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn shoot_writes_orbit_and_report_reproducibly() {
    let d = workdir("shoot");
    let out = run(&d, &["shoot", "--m", "0.3333333333", "--h", "-1"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report = read_json(d.join("report.json"));
    assert!(report["closure_error"].as_f64().unwrap() <= 1e-5);
    assert!(report["nu_exit"].as_f64().unwrap().abs() <= 1e-8);
    assert_eq!(report["config"]["m"], 0.3333333333);
    assert!(!report["bisection_trace"].as_array().unwrap().is_empty());
    let csv = std::fs::read_to_string(d.join("orbit.csv")).unwrap();
    let mut lines = csv.lines();
    assert!(lines.next().unwrap().starts_with("# {\"command\":\"shoot\""));
    assert_eq!(lines.next().unwrap(), "sigma,t_phys,r,nu,u,gamma,theta,x1,x2,phi1,phi2,phi3,energy_residual");

    let first = std::fs::read(d.join("report.json")).unwrap();
    assert!(run(&d, &["shoot", "--m", "0.3333333333", "--h", "-1"]).status.success());
    assert_eq!(first, std::fs::read(d.join("report.json")).unwrap());
    assert_eq!(csv, std::fs::read_to_string(d.join("orbit.csv")).unwrap());
}

#[test]
fn claims_pass_for_half() {
    let d = workdir("claims");
    let out = run(&d, &["claims", "--m", "0.5"]);
    assert!(out.status.success());
    let report = read_json(d.join("claims.json"));
    let claims = report["claims"].as_array().unwrap();
    assert_eq!(claims.len(), 6);
    assert!(claims.iter().all(|c| c["status"] == "pass"));
}

#[test]
fn zvc_crosses_the_axis() {
    let d = workdir("zvc");
    assert!(run(&d, &["zvc", "--m", "0.3333333333", "--h", "-1", "--region", "I"]).status.success());
    let text = std::fs::read_to_string(d.join("zvc.csv")).unwrap();
    let pts: Vec<(f64, f64)> = text
        .lines()
        .skip(2)
        .map(|l| {
            let f: Vec<&str> = l.split(',').collect();
            (f[2].parse().unwrap(), f[3].parse().unwrap())
        })
        .collect();
    let hit = pts
        .windows(2)
        .find(|w| w[0].1 * w[1].1 <= 0.0)
        .map(|w| w[0].0 + (w[1].0 - w[0].0) * w[0].1 / (w[0].1 - w[1].1))
        .unwrap();
    assert!((hit - 0.534).abs() < 1e-3, "{hit}");
}

#[test]
fn simulate_and_wazewski_emit_csv() {
    let d = workdir("sim");
    let out = run(&d, &["simulate", "--r0", "0.15", "--u0", "0.2", "--gamma-from-energy", "--until", "u=1.5707963267948966"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let summary: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(summary["max_energy_residual"].as_f64().unwrap() <= 1e-9);
    assert!(std::fs::read_to_string(d.join("traj.csv")).unwrap().lines().count() > 3);

    let out = run(&d, &["wazewski", "--scan-r0", "0.05:0.2:6"]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(d.join("exits.csv")).unwrap();
    assert_eq!(text.lines().nth(1).unwrap(), "r0,face,exit_r,exit_nu,exit_u,exit_gamma,sigma");
    assert_eq!(text.lines().count(), 8);
}

#[test]
fn homothetic_table_and_linearize() {
    let d = workdir("homothetic");
    let out = run(&d, &["homothetic", "--m", "0.2", "--h", "0.2", "--scan-m", "0.05:0.25:5"]);
    assert!(out.status.success());
    let table = String::from_utf8(out.stdout).unwrap();
    assert!(table.contains("0.05,BelowNinth,,,CollisionAntipodal"));
    assert!(table.contains("0.2,AboveNinth,4.71238898038469,"));

    let out = run(&d, &["linearize"]);
    let eq: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let l3 = eq["eigenvalues"][2].as_f64().unwrap();
    assert!((l3 - 0.695_133_728_317_333_7).abs() < 1e-9);
}

#[test]
fn config_file_supplies_defaults() {
    let d = workdir("config");
    std::fs::write(d.join("c.json"), r#"{"m": 0.2, "h": -2}"#).unwrap();
    let out = run(&d, &["linearize", "--config", "c.json"]);
    let eq: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(eq["config"]["m"], 0.2);
    assert_eq!(eq["config"]["h"], -2.0);
    // flags win over the file
    let out = run(&d, &["linearize", "--config", "c.json", "--m", "0.5"]);
    let eq: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(eq["config"]["m"], 0.5);
}

#[test]
fn exit_codes() {
    let d = workdir("codes");
    let usage = |args: &[&str]| run(&d, args).status.code();
    assert_eq!(usage(&["shoot", "--h", "-0.5"]), Some(2));
    assert_eq!(usage(&["claims", "--m", "1.5"]), Some(2));
    assert_eq!(usage(&["zvc", "--region", "V"]), Some(2));
    assert_eq!(usage(&["wazewski", "--scan-r0", "1:2"]), Some(2));
    assert_eq!(usage(&["frobnicate"]), Some(2));
    assert_eq!(usage(&["linearize", "--config", "missing.json"]), Some(2));

    let out = run(&d, &["simulate", "--r0", "0.3"]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.starts_with("error[ImaginaryGamma]"));
    assert_eq!(err.trim_end().lines().count(), 1);
}
