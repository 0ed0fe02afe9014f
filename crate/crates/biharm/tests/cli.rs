use std::path::Path;
use std::process::{Command, Output};

use biharm::cert::{CertStatus, Certificate};
use biharm::manifest::{RunManifest, MANIFEST_FILE};

fn biharm(args: &[&str], threads: Option<&str>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_biharm"));
    cmd.args(args);
    match threads {
        Some(t) => cmd.env("BIHARM_THREADS", t),
        None => cmd.env_remove("BIHARM_THREADS"),
    };
    cmd.output().expect("binary runs")
}

fn code(args: &[&str]) -> i32 {
    biharm(args, None).status.code().unwrap()
}

fn manifest(dir: &Path) -> RunManifest {
    let m = RunManifest::read(&dir.join(MANIFEST_FILE)).unwrap();
    for f in &m.outputs {
        assert!(dir.join(f).exists(), "{f} listed but missing");
    }
    m
}

fn csv_header(path: &Path) -> Vec<String> {
    let mut r = csv::Reader::from_path(path).unwrap();
    let h = r.headers().unwrap().iter().map(String::from).collect();
    assert!(r.records().all(|x| x.is_ok()));
    h
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn verify_exit_codes_and_schema() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("v");
    assert_eq!(code(&["verify", "--task", "all", "--out", s(&out)]), 0);
    let m = manifest(&out);
    assert_eq!(m.outputs.len(), 10);
    for id in 1..=9 {
        let c: Certificate = serde_json::from_slice(&std::fs::read(out.join(format!("certificate_V{id}.json"))).unwrap()).unwrap();
        assert_eq!(c.status, CertStatus::Proved);
    }
    let other = dir.path().join("x");
    assert_eq!(code(&["verify", "--task", "V2", "--min-width", "10", "--out", s(&other)]), 2);
    assert_eq!(code(&["verify", "--task", "V10", "--out", s(&other)]), 64);
    assert_eq!(code(&["verify", "--task", "V1", "--min-width", "0", "--out", s(&other)]), 64);
}

#[test]
fn replay_reproduces_statuses() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a");
    assert_eq!(code(&["verify", "--task", "V5", "--out", s(&a)]), 0);
    let m = manifest(&a);
    let b = dir.path().join("b");
    let mut argv = m.argv.clone();
    let i = argv.iter().position(|x| x == "--out").unwrap();
    argv[i + 1] = b.display().to_string();
    let args: Vec<&str> = argv.iter().map(String::as_str).collect();
    assert_eq!(code(&args), 0);
    assert_eq!(manifest(&b).summary, m.summary);

    let c = dir.path().join("c");
    assert_eq!(code(&["classify", "--grid", "30", "--out", s(&c)]), 0);
    let m = manifest(&c);
    let d = dir.path().join("d");
    let mut argv = m.argv.clone();
    let i = argv.iter().position(|x| x == "--out").unwrap();
    argv[i + 1] = d.display().to_string();
    let args: Vec<&str> = argv.iter().map(String::as_str).collect();
    assert_eq!(code(&args), 0);
    assert_eq!(manifest(&d).summary, m.summary);
    assert_eq!(std::fs::read(c.join("grid.csv")).unwrap(), std::fs::read(d.join("grid.csv")).unwrap());
}

#[test]
fn shoot_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("s");
    assert_eq!(code(&["shoot", "--out", s(&out)]), 0);
    let m = manifest(&out);
    assert!(m.summary["end_distance"].as_f64().unwrap() < 1e-3);
    let h: serde_json::Value = serde_json::from_slice(&std::fs::read(out.join("theta_star.json")).unwrap()).unwrap();
    assert_eq!(h["classification"]["outcome"], "HeteroclinicCandidate");
    assert_eq!(csv_header(&out.join("orbit.csv")), ["s", "phi", "dphi", "d2phi", "d3phi", "energy_total", "energy_rate"]);
    assert_eq!(code(&["shoot", "--theta-tol", "1e-14", "--out", s(&out)]), 0);
    assert!(manifest(&out).summary["width"].as_f64().unwrap() < 1e-14);
    assert_eq!(code(&["shoot", "--d", "6", "--out", s(&out)]), 64);
    assert_eq!(code(&["shoot", "--bracket", "1.45:1.5", "--out", s(&out)]), 1);
}

#[test]
fn classify_grids() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("c");
    assert_eq!(code(&["classify", "--grid", "200", "--theta-range=-pi/2:theta0", "--out", s(&out)]), 0);
    assert_eq!(manifest(&out).summary["sign_changes"], 1);
    assert_eq!(csv_header(&out.join("grid.csv")), ["theta", "outcome", "g", "tau", "end_s", "phi", "dphi", "d2phi", "d3phi"]);
    assert_eq!(code(&["classify", "--grid", "50", "--theta-range", "theta0+0.01:pi/2", "--out", s(&out)]), 0);
    let mut r = csv::Reader::from_path(out.join("grid.csv")).unwrap();
    let gs: Vec<String> = r.records().map(|x| x.unwrap()[2].to_string()).collect();
    assert_eq!(gs.len(), 50);
    assert!(gs.iter().all(|g| g == "1"));
    assert_eq!(code(&["classify", "--grid", "1", "--out", s(&out)]), 64);
    assert_eq!(code(&["classify", "--theta-range", "2:1", "--out", s(&out)]), 64);
    assert_eq!(code(&["classify", "--theta-range", "a:b", "--out", s(&out)]), 64);
}

#[test]
fn wind_energy_spectrum() {
    let dir = tempfile::tempdir().unwrap();
    let w = dir.path().join("w");
    assert_eq!(code(&["wind", "--out", s(&w)]), 0);
    manifest(&w);
    assert_eq!(csv_header(&w.join("profile.csv")), ["r", "psi", "dpsi", "d2psi", "L0f0", "L1f1"]);
    let rep: serde_json::Value = serde_json::from_slice(&std::fs::read(w.join("winding.json")).unwrap()).unwrap();
    for key in ["s_f_estimate", "crossings", "winding_count", "seed"] {
        assert!(rep.get(key).is_some(), "{key}");
    }
    assert_eq!(code(&["wind", "--max-span", "1", "--out", s(&w)]), 1);

    let e = dir.path().join("e");
    assert_eq!(code(&["energy", "--d", "4", "--mode", "conservation", "--out", s(&e)]), 0);
    assert!(manifest(&e).summary["worst"].as_f64().unwrap() < 1e-7);
    assert_eq!(code(&["energy", "--d", "5", "--out", s(&e)]), 0);
    assert_eq!(code(&["energy", "--d", "5", "--mode", "conservation", "--out", s(&e)]), 64);

    let out = biharm(&["spectrum", "--d", "5", "--parity", "even"], None);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    for l in ["eigenvalue    3", "eigenvalue    1", "eigenvalue   -4", "eigenvalue   -2"] {
        assert!(text.contains(l), "{text}");
    }
    let sp = dir.path().join("sp");
    assert_eq!(code(&["spectrum", "--d", "6", "--parity", "odd", "--out", s(&sp)]), 0);
    manifest(&sp);
    assert_eq!(code(&["spectrum", "--d", "3"]), 64);
    assert_eq!(code(&["spectrum", "--parity", "sideways"]), 64);
}

#[test]
fn usage_threads_and_config() {
    assert_eq!(code(&["frobnicate"]), 64);
    assert_eq!(code(&["--help"]), 0);
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("t");
    assert_eq!(biharm(&["spectrum"], Some("zero")).status.code(), Some(64));
    let a = biharm(&["verify", "--task", "V9", "--out", s(&out)], Some("1"));
    let b = biharm(&["verify", "--task", "V9", "--out", s(&out)], Some("16"));
    assert_eq!((a.status.code(), b.status.code()), (Some(0), Some(0)));

    let cfg = dir.path().join("over.toml");
    std::fs::write(&cfg, "[classify]\ngrid = 12\n").unwrap();
    assert_eq!(code(&["--config", s(&cfg), "classify", "--out", s(&out)]), 0);
    assert_eq!(csv::Reader::from_path(out.join("grid.csv")).unwrap().records().count(), 12);
    std::fs::write(&cfg, "[classify]\ngird = 12\n").unwrap();
    assert_eq!(code(&["--config", s(&cfg), "classify", "--out", s(&out)]), 64);
}
