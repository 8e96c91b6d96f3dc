use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_phaserate")).args(args).output().expect("binary runs")
}

fn rate_json(args: &[&str]) -> (Value, i32) {
    let out = run(args);
    let code = out.status.code().unwrap();
    let v = serde_json::from_slice(&out.stdout).unwrap_or(Value::Null);
    (v, code)
}

fn rate_of(v: &Value) -> f64 {
    v["rate_nats"].as_f64().unwrap()
}

#[test]
fn capacity_point() {
    let (v, code) = rate_json(&["rate", "--scheme", "capacity", "--m", "2", "--energy", "2"]);
    assert_eq!(code, 0);
    assert!((rate_of(&v) - 2.7725887222).abs() < 1e-10);
    assert_eq!(v["converged"], Value::Bool(true));
}

#[test]
fn room_below_coherent_bound() {
    let (room, c1) = rate_json(&["rate", "--scheme", "room-coherent", "--m", "1", "--energy", "0.1"]);
    let (upper, c2) = rate_json(&["rate", "--scheme", "coherent-upper", "--m", "1", "--energy", "0.1"]);
    assert_eq!((c1, c2), (0, 0));
    assert!(rate_of(&room) <= rate_of(&upper));
    assert!(room["params"]["p"].as_f64().unwrap() > 0.0);
}

#[test]
fn loss_equals_lower_energy() {
    let (lossy, _) = rate_json(&["rate", "--scheme", "room-coherent", "--energy", "1", "--eta", "0.5"]);
    let (ideal, _) = rate_json(&["rate", "--scheme", "room-coherent", "--energy", "0.5"]);
    assert!((rate_of(&lossy) - rate_of(&ideal)).abs() < 1e-10);
}

#[test]
fn bits_flag() {
    let (nats, _) = rate_json(&["rate", "--scheme", "capacity", "--energy", "1"]);
    let (bits, _) = rate_json(&["rate", "--scheme", "capacity", "--energy", "1", "--bits"]);
    assert_eq!(bits["unit"], "bits");
    assert!((rate_of(&bits) - rate_of(&nats) / 2f64.ln()).abs() < 1e-10);
}

#[test]
fn argument_errors_exit_2() {
    assert_eq!(run(&["rate", "--scheme", "nope", "--energy", "1"]).status.code(), Some(2));
    assert_eq!(run(&["rate", "--scheme", "capacity"]).status.code(), Some(2));
    assert_eq!(run(&["rate", "--scheme", "capacity", "--energy", "1", "--eta", "1.5"]).status.code(), Some(2));
    assert_eq!(run(&["rate", "--energy", "1", "--bogus"]).status.code(), Some(2));
    assert_eq!(
        run(&["rate", "--scheme", "fock-truncated-1", "--energy", "1", "--eta", "0.9", "--n-th", "0.1"]).status.code(),
        Some(2)
    );
}

#[test]
fn degenerate_optimum_exits_3_with_record() {
    let (v, code) = rate_json(&["rate", "--scheme", "ternary-squeezed", "--m", "2", "--energy", "0.01"]);
    assert_eq!(code, 3);
    assert_eq!(v["converged"], Value::Bool(false));
    assert!(rate_of(&v) > 0.0);
}

fn sweep_args<'a>(out: &'a str, extra: &[&'a str]) -> Vec<&'a str> {
    let mut a = vec![
        "sweep",
        "--scheme",
        "room-coherent,capacity",
        "--emin",
        "0.01",
        "--emax",
        "1",
        "--points",
        "4",
        "--log",
        "--out",
        out,
    ];
    a.extend_from_slice(extra);
    a
}

#[test]
fn sweep_csv_is_ordered_and_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    assert_eq!(run(&sweep_args(a.to_str().unwrap(), &["--jobs", "2"])).status.code(), Some(0));
    assert_eq!(run(&sweep_args(b.to_str().unwrap(), &["--jobs", "1"])).status.code(), Some(0));
    let ta = std::fs::read(&a).unwrap();
    assert_eq!(ta, std::fs::read(&b).unwrap());
    let text = String::from_utf8(ta).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "# rate unit: nats");
    assert_eq!(
        lines[1],
        "energy,m,eta,n_th,scheme,rate_nats,rate_over_capacity,params,truncation_n,tail_mass,converged"
    );
    assert_eq!(lines.len(), 2 + 8);
    let schemes: Vec<&str> = lines[2..].iter().map(|l| l.split(',').nth(4).unwrap()).collect();
    assert_eq!(schemes, [["room-coherent"; 4], ["capacity"; 4]].concat());
    let energies: Vec<f64> = lines[2..6].iter().map(|l| l.split(',').next().unwrap().parse().unwrap()).collect();
    assert!(energies.windows(2).all(|w| w[0] < w[1]));
    for l in &lines[2..] {
        let ratio: f64 = l.split(',').nth(6).unwrap().parse().unwrap();
        assert!(ratio <= 1.0 + 1e-9);
        let mantissa = l.split(',').next().unwrap().split('e').next().unwrap();
        assert_eq!(mantissa.split('.').nth(1).unwrap().len(), 11);
    }
    assert!(lines[2].contains("p=") && lines[2].contains(";s="));
}

#[test]
fn sweep_jsonl_and_config() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"schemes": ["capacity"], "m": 4, "emin": 0.5, "emax": 2, "points": 3, "format": "jsonl"}"#).unwrap();
    let out = dir.path().join("o.jsonl");
    let status = run(&["sweep", "--config", cfg.to_str().unwrap(), "--m", "2", "--out", out.to_str().unwrap()]);
    assert_eq!(status.status.code(), Some(0));
    let text = std::fs::read_to_string(&out).unwrap();
    let recs: Vec<Value> = text.lines().map(|l| serde_json::from_str(l).unwrap()).collect();
    assert_eq!(recs.len(), 3);
    // flag beats config
    assert!(recs.iter().all(|r| r["m"] == 2));
    assert_eq!(recs[1]["energy"].as_f64().unwrap(), 1.25);
}

#[test]
fn bad_config_and_io_errors() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"mode": 3}"#).unwrap();
    assert_eq!(
        run(&["rate", "--scheme", "capacity", "--energy", "1", "--config", cfg.to_str().unwrap()]).status.code(),
        Some(2)
    );
    let missing = dir.path().join("no/such/dir/out.csv");
    assert_eq!(run(&sweep_args(missing.to_str().unwrap(), &[])).status.code(), Some(1));
}

#[test]
fn validate_suites() {
    let out = run(&["validate", "--suite", "identities"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("ROOM = OOP"));
    assert!(text.contains("Gamma-Poisson = thermal"));
    let out = run(&["validate", "--suite", "oracles"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8(out.stdout).unwrap().contains("Kraus"));
    assert_eq!(run(&["validate", "--suite", "everything"]).status.code(), Some(2));
}
