use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn dispersim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dispersim"))
        .args(args)
        .env_remove("DISPERSIM_THREADS")
        .output()
        .expect("binary runs")
}

fn json_body(text: &str) -> Value {
    serde_json::from_str(text).expect("valid JSON")
}

fn csv_body(text: &str) -> &str {
    let start = text.find('\n').unwrap() + 1;
    &text[start..]
}

#[test]
fn check_on_townes_succeeds() {
    let out = dispersim(&["check", "--n", "16"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json_body(&String::from_utf8(out.stdout).unwrap());
    assert_eq!(v["command"], "check");
    assert_eq!(v["config_hash"].as_str().unwrap().len(), 64);
    assert_eq!(v["result"]["a1_ok"], true);
    assert_eq!(v["result"]["a2_ok"], true);
}

#[test]
fn malformed_config_exits_2_without_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    let target = dir.path().join("out.csv");
    std::fs::write(&cfg, format!("{{\"setup\": {{\"gamma\": 1.0}}, \"output\": {:?}}}", target)).unwrap();
    let out = dispersim(&["run", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!target.exists());
    assert_eq!(std::fs::read_dir(dir.path()).unwrap().count(), 1);

    let out = dispersim(&["check", "--n", "3"]);
    assert_eq!(out.status.code(), Some(2));
    let out = dispersim(&["check", "--bogus-flag"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn thread_cap_must_be_positive() {
    let out = Command::new(env!("CARGO_BIN_EXE_dispersim"))
        .args(["groundstate"])
        .env("DISPERSIM_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
    let out = Command::new(env!("CARGO_BIN_EXE_dispersim"))
        .args(["groundstate", "--gs-tol", "1e-3"])
        .env("DISPERSIM_THREADS", "2")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn groundstate_csv_header() {
    let out = dispersim(&["groundstate", "--gs-tol", "1e-3"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let first = text.lines().next().unwrap();
    let header = json_body(first.trim_start_matches("# "));
    for key in ["gamma", "mu", "phi0", "decay_rate", "config_hash"] {
        assert!(header.get(key).is_some(), "{key}");
    }
    assert!((header["phi0"].as_f64().unwrap() - 2.206).abs() < 0.01);
    assert_eq!(text.lines().nth(1).unwrap(), "r,phi");
}

fn write_evolution_config(dir: &Path) -> std::path::PathBuf {
    let path = dir.join("evolution.json");
    let cfg = serde_json::json!({
        "mu": 1.0,
        "t_list": [3.0, 6.0, 12.0, 24.0],
        "lambda_high": 20.0,
        "quad_points_per_osc": 8,
        "x_samples": [0, 40, 80],
        "y_samples": [0, 40, 80],
        "weight_power": 2.0,
        "alpha": 0.5
    });
    std::fs::write(&path, cfg.to_string()).unwrap();
    path
}

#[test]
fn decay_report_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_evolution_config(dir.path());
    let run = |prefix: &str| {
        let p = dir.path().join(prefix);
        let out = dispersim(&[
            "decay-report",
            "--epsilon",
            "0",
            "--extent",
            "3",
            "--n",
            "9",
            "--config",
            cfg.to_str().unwrap(),
            "--output",
            p.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
        (
            std::fs::read_to_string(p.with_extension("csv")).unwrap(),
            std::fs::read_to_string(p.with_extension("json")).unwrap(),
        )
    };
    let (a_csv, a_json) = run("a");
    let (b_csv, _) = run("b");
    assert_eq!(csv_body(&a_csv), csv_body(&b_csv));
    let v = json_body(&a_json);
    let slope = v["result"]["fitted_exponent_unweighted"].as_f64().unwrap();
    assert!((slope + 1.0).abs() < 0.03, "{slope}");
    let header = csv_body(&a_csv).lines().next().unwrap();
    assert!(header.starts_with("t,sup_norm,weighted_sup,t_sup,t_log2_weighted"));
}

#[test]
fn decay_report_rejects_unknown_keys() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("evolution.json");
    std::fs::write(&path, r#"{"mu": 1.0, "t_list": [3.0], "lambda_high": 10.0, "quad_points_per_osc": 8, "weight_power": 2.0, "alpha": 0.5, "extra": 1}"#).unwrap();
    let out = dispersim(&["decay-report", "--config", path.to_str().unwrap(), "--output", dir.path().join("r").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!dir.path().join("r.csv").exists());
}

#[test]
fn exported_potential_reproduces_regularity() {
    let dir = tempfile::tempdir().unwrap();
    let pot = dir.path().join("pot.csv");
    let report = dir.path().join("check.json");
    let common = ["--extent", "6", "--n", "12"];
    let mut args = vec!["check", "--epsilon", "0.1", "--save-potential", pot.to_str().unwrap(), "--output", report.to_str().unwrap()];
    args.extend(common);
    assert_eq!(dispersim(&args).status.code(), Some(0));

    let sweep = |extra: &[&str]| -> f64 {
        let mut a = vec!["resolvent-sweep", "--lambda-min", "0.01", "--lambda-max", "0.01", "--points", "1"];
        a.extend(common);
        a.extend(extra);
        let out = dispersim(&a);
        assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
        json_body(&String::from_utf8(out.stdout).unwrap())["result"][0]["qtq_min_sv"].as_f64().unwrap()
    };
    let direct = sweep(&["--epsilon", "0.1"]);
    let loaded = sweep(&["--potential", pot.to_str().unwrap()]);
    assert!((direct - loaded).abs() <= 1e-10, "{direct} vs {loaded}");
}

#[test]
fn a1_violation_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let pot = dir.path().join("pot.csv");
    let mut args = vec!["check", "--extent", "6", "--n", "12", "--save-potential", pot.to_str().unwrap(), "--output"];
    let report = dir.path().join("r.json");
    args.push(report.to_str().unwrap());
    assert_eq!(dispersim(&args).status.code(), Some(0));
    let text = std::fs::read_to_string(&pot).unwrap();
    let mut lines: Vec<String> = text.lines().map(String::from).collect();
    let row = lines.iter().position(|l| l.starts_with("x,")).unwrap() + 5;
    let fields: Vec<&str> = lines[row].split(',').collect();
    lines[row] = format!("{},{},0.5,2.0", fields[0], fields[1]);
    std::fs::write(&pot, lines.join("\n")).unwrap();
    let out = dispersim(&["check", "--extent", "6", "--n", "12", "--potential", pot.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("node 4"));
}

#[test]
fn spectrum_and_evolve_outputs() {
    let out = dispersim(&["spectrum", "--n", "12", "--extent", "6", "--epsilon", "0.5"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().nth(1).unwrap(), "re,im,class,multiplicity");
    assert_eq!(text.lines().count(), 2 + 2 * 100);

    let out = dispersim(&["evolve", "--epsilon", "0", "--extent", "3", "--n", "9", "--t", "2", "--x", "0,0", "--y", "0.75,0", "--lambda-high", "40"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let v = json_body(&String::from_utf8(out.stdout).unwrap());
    let k = &v["result"]["kernel"];
    let m = |i: usize, j: usize| k[i][j][0].as_f64().unwrap().hypot(k[i][j][1].as_f64().unwrap());
    let exact = 1.0 / (8.0 * std::f64::consts::PI);
    assert!((m(0, 0) / exact - 1.0).abs() < 0.02);
    assert!((m(1, 1) / exact - 1.0).abs() < 0.02);
    assert!(m(0, 1) < 1e-12);
}

#[test]
fn print_config_round_trips() {
    let out = dispersim(&["--print-config", "resolvent-sweep", "--lambda-min", "0.001", "--lambda-max", "0.1", "--points", "3"]);
    assert_eq!(out.status.code(), Some(0));
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("run.json");
    std::fs::write(&p, &out.stdout).unwrap();
    let again = dispersim(&["--print-config", "run", "--config", p.to_str().unwrap()]);
    assert_eq!(again.status.code(), Some(0));
    assert_eq!(out.stdout, again.stdout);
}
