use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

const BIN: &str = env!("CARGO_BIN_EXE_ddmor");
const DIAG: &str = "0.7071067811865476";

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

fn circuit_points(extra: &str) -> String {
    format!(r#"{{"points": [{{"re": {DIAG}, "im": {DIAG}}}, {{"re": 0.5, "k": 1}}]{extra}}}"#)
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn check_reports_verdicts() {
    let cfg = format!(r#"{{"points": [{{"re": {DIAG}, "im": {DIAG}}}, {{"re": 0}}]}}"#);
    let out = run(&["check", "rl-circuit", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    assert_eq!(v["system_identification"]["verdict"], false);
    assert_eq!(v["points"][0]["informative"], true);
    assert_eq!(v["points"][1]["informative"], false);
    assert_eq!(v["points"][1]["failed_order"], 0);
    assert_eq!(v["tolerances"]["rank_mode"], "relative");
    let ranks = &v["points"][1]["orders"][0]["ranks"];
    let r: Vec<u64> = ranks
        .as_array()
        .unwrap()
        .iter()
        .map(|x| x["rank"].as_u64().unwrap())
        .collect();
    assert_eq!(r, vec![8, 9, 10]);
}

#[test]
fn check_rejects_order_too_large_for_data() {
    let out = run(&[
        "check",
        "rl-circuit",
        "--config",
        r#"{"n": 25, "points": []}"#,
    ]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn csv_data_and_config_file() {
    let dir = tempfile::tempdir().unwrap();
    let mut csv = String::from("t,u,y\n");
    let (u, y) = (
        ddmor::trajectory::fixtures::CIRCUIT_U,
        ddmor::trajectory::fixtures::CIRCUIT_Y,
    );
    for t in 0..u.len() {
        csv.push_str(&format!("{t},{},{}\n", u[t], y[t]));
    }
    let data = write(dir.path(), "data.csv", &csv);
    let cfg = write(
        dir.path(),
        "job.json",
        r#"{"n": 4, "points": [{"re": 0.5, "k": 1}]}"#,
    );
    let out_path = dir.path().join("moments.json");
    let out = run(&[
        "moments",
        &data,
        "--config",
        &cfg,
        "--output",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(out_path).unwrap()).unwrap();
    let m = &v["points"][0]["moments"];
    assert!((m[0]["re"].as_f64().unwrap() - 0.0827).abs() < 5e-5);
    assert!((m[1]["re"].as_f64().unwrap() + 1.7247).abs() < 5e-5);

    let no_n = write(dir.path(), "no_n.json", r#"{"points": []}"#);
    assert_eq!(
        run(&["check", &data, "--config", &no_n]).status.code(),
        Some(2)
    );
    let bad = write(dir.path(), "bad.csv", "t,u,y\n0,1,x\n");
    assert_eq!(
        run(&["check", &bad, "--config", &cfg]).status.code(),
        Some(2)
    );
    assert_eq!(
        run(&["check", &data, "--config", "missing.json"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn moments_record_values_and_failures() {
    let cfg = format!(r#"{{"points": [{{"re": {DIAG}, "im": {DIAG}}}, {{"re": 0, "k": 2}}]}}"#);
    let out = run(&["moments", "rl-circuit", "--config", &cfg]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let m0 = &v["points"][0]["moments"][0];
    assert!((m0["re"].as_f64().unwrap() - 0.0031).abs() < 5e-5);
    assert!((m0["im"].as_f64().unwrap() + 0.1417).abs() < 5e-5);
    assert_eq!(v["points"][1]["failed_order"], 0);
    assert_eq!(v["points"][1]["moments"].as_array().unwrap().len(), 0);
}

#[test]
fn reduce_exit_codes() {
    let out = run(&[
        "reduce",
        "rl-circuit",
        "--config",
        &circuit_points(r#", "r": 1"#),
    ]);
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains('3') && err.contains('4'), "{err}");

    let cfg = r#"{"points": [{"re": 0}, {"re": 0.5}], "r": 2}"#;
    let out = run(&["reduce", "rl-circuit", "--config", cfg]);
    assert_eq!(out.status.code(), Some(4));
    assert!(String::from_utf8_lossy(&out.stderr).contains("sigma = 0"));

    let out = run(&[
        "reduce",
        "rl-circuit",
        "--config",
        &circuit_points(r#", "r": 2, "r_max": 3"#),
    ]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&[
        "reduce",
        "rl-circuit",
        "--config",
        &circuit_points(r#", "prescribed_poles": [1, 0]"#),
    ]);
    assert_eq!(out.status.code(), Some(3));
    let out = run(&[
        "reduce",
        "rl-circuit",
        "--config",
        &circuit_points(r#", "r_max": 1"#),
    ]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn reduce_prescribed_poles() {
    let out = run(&[
        "reduce",
        "rl-circuit",
        "--config",
        &circuit_points(r#", "prescribed_poles": [1, 0, 1], "r": 3"#),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json(&out);
    let q: Vec<f64> = v["q"]
        .as_array()
        .unwrap()
        .iter()
        .map(|x| x.as_f64().unwrap())
        .collect();
    for (a, b) in q.iter().zip([2.1235, -6.8636, 7.7895, -4.2037]) {
        assert!((a - b).abs() < 5e-4, "{q:?}");
    }
    assert_eq!(v["prescribed_poles"], true);
}

#[test]
fn reduced_model_feeds_simulate_and_bode() {
    let dir = tempfile::tempdir().unwrap();
    let model = dir.path().join("rom.json");
    let model_s = model.to_str().unwrap();
    let out = run(&[
        "reduce",
        "rl-circuit",
        "--config",
        &circuit_points(r#", "r_max": 4"#),
        "--output",
        model_s,
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&model).unwrap()).unwrap();
    assert_eq!(v["r"], 2);
    assert!(v["residual"].as_f64().unwrap() <= 1e-9);
    assert_eq!(v["feasibility"].as_array().unwrap().len(), 2);

    let input = write(dir.path(), "u.csv", "t,u\n0,1\n1,0\n2,0\n3,0\n");
    let out = run(&["simulate", model_s, &input]);
    assert_eq!(out.status.code(), Some(0));
    let s = ddmor::trajectory::read_samples(out.stdout.as_slice(), true).unwrap();
    assert_eq!(s.u, vec![1.0, 0.0, 0.0, 0.0]);
    assert_eq!(s.y.unwrap().len(), 4);

    let w = std::f64::consts::FRAC_PI_4.to_string();
    let rom = run(&["bode", model_s, "--omega", &w]);
    let truth = run(&["bode", "rl-circuit", "--omega", &w]);
    assert_eq!(rom.status.code(), Some(0));
    let field = |o: &Output, i: usize| -> f64 {
        let text = String::from_utf8_lossy(&o.stdout).to_string();
        text.lines()
            .nth(1)
            .unwrap()
            .split(',')
            .nth(i)
            .unwrap()
            .parse()
            .unwrap()
    };
    assert!((field(&rom, 1) - field(&truth, 1)).abs() < 1e-2);
    assert!((field(&rom, 3) - field(&truth, 3)).abs() < 1e-2);
}

#[test]
fn simulate_builtin_reproduces_fixture() {
    let dir = tempfile::tempdir().unwrap();
    let mut csv = String::from("t,u\n");
    for (t, u) in ddmor::trajectory::fixtures::CIRCUIT_U.iter().enumerate() {
        csv.push_str(&format!("{t},{u}\n"));
    }
    let input = write(dir.path(), "u.csv", &csv);
    let out_path = dir.path().join("y.csv");
    let out = run(&[
        "simulate",
        "rl-circuit",
        &input,
        "--output",
        out_path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let s = ddmor::trajectory::read_samples(std::fs::File::open(out_path).unwrap(), true).unwrap();
    for (a, b) in
        s.y.unwrap()
            .iter()
            .zip(ddmor::trajectory::fixtures::CIRCUIT_Y_ROUNDED)
    {
        assert!((a - b).abs() < 1e-4);
    }
}

#[test]
fn simulate_unit_delay_and_bad_input() {
    let dir = tempfile::tempdir().unwrap();
    let model = write(
        dir.path(),
        "delay.json",
        r#"{"r": 1, "p": [0], "q": [1, 0]}"#,
    );
    let input = write(dir.path(), "u.csv", "t,u\n0,1\n1,0\n2,0\n");
    let out = run(&["simulate", &model, &input]);
    assert_eq!(out.status.code(), Some(0));
    let s = ddmor::trajectory::read_samples(out.stdout.as_slice(), true).unwrap();
    assert_eq!(s.y.unwrap(), vec![0.0, 1.0, 0.0]);

    let out = run(&["simulate", &model, &input, "--initial", "-2"]);
    let s = ddmor::trajectory::read_samples(out.stdout.as_slice(), true).unwrap();
    assert_eq!(s.y.unwrap(), vec![-2.0, 1.0, 0.0]);

    let empty = write(dir.path(), "empty.csv", "");
    assert_eq!(run(&["simulate", &model, &empty]).status.code(), Some(2));
    let header_only = write(dir.path(), "header.csv", "t,u\n");
    assert_eq!(
        run(&["simulate", &model, &header_only]).status.code(),
        Some(2)
    );
    assert_eq!(
        run(&["simulate", &model, &input, "--initial", "1,2"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn bode_grids_and_poles() {
    let dir = tempfile::tempdir().unwrap();
    let flat = write(
        dir.path(),
        "flat.json",
        r#"{"r": 1, "p": [0], "q": [0, 1]}"#,
    );
    let out = run(&["bode", &flat, "--grid", "lin:0:3:4"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8_lossy(&out.stdout).to_string();
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("omega,magnitude,magnitude_db,phase_rad,status")
    );
    for line in lines {
        let f: Vec<&str> = line.split(',').collect();
        assert_eq!(f[1].parse::<f64>().unwrap(), 1.0);
        assert_eq!(f[3].parse::<f64>().unwrap(), 0.0);
        assert_eq!(f[4], "ok");
    }
    let integrator = write(
        dir.path(),
        "int.json",
        r#"{"r": 1, "p": [-1], "q": [1, 0]}"#,
    );
    let out = run(&["bode", &integrator, "--omega", "0,1"]);
    let text = String::from_utf8_lossy(&out.stdout).to_string();
    assert!(text.lines().nth(1).unwrap().ends_with("pole"));
    assert!(text.lines().nth(2).unwrap().ends_with("ok"));
    assert_eq!(
        run(&["bode", &flat, "--grid", "log:0:1:3"]).status.code(),
        Some(2)
    );
}

#[test]
fn tolerance_override_is_recorded() {
    let cfg = r#"{"points": [{"re": 0.5}], "tolerance": 1e-3}"#;
    let v = json(&run(&["check", "rl-circuit", "--config", cfg]));
    assert_eq!(v["tolerances"]["rank_mode"], "absolute");
    assert_eq!(v["tolerances"]["rank_value"], 1e-3);
    let v = json(&run(&[
        "check",
        "rl-circuit",
        "--config",
        cfg,
        "--tol",
        "1e-6",
    ]));
    assert_eq!(v["tolerances"]["rank_value"], 1e-6);
    assert_eq!(
        run(&["check", "rl-circuit", "--config", cfg, "--tol", "-1"])
            .status
            .code(),
        Some(2)
    );
}
