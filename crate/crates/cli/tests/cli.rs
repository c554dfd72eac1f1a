use std::f64::consts::PI;
use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use majorant_cli::{emit_grid, load_grid};
use majorant_core::grid::{DiskGrid, GridFunction};
use serde_json::Value;

fn majorant(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_majorant"))
        .args(args)
        .arg("--output")
        .arg(dir)
        .output()
        .expect("binary runs")
}

fn report(dir: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(dir.join("report.json")).unwrap()).unwrap()
}

fn measured(report: &Value, name: &str) -> f64 {
    report["measurements"][name]["value"].as_f64().unwrap()
}

fn write_grid(dir: &Path, name: &str, grid: DiskGrid, f: impl Fn(num_complex::Complex64) -> f64) -> String {
    let path = dir.join(name);
    emit_grid(&GridFunction::from_fn(grid, f).unwrap(), &path).unwrap();
    path.display().to_string()
}

#[test]
fn dyadic_build_on_the_depth_one_example() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("data.txt");
    fs::write(&data, "depth 1\n0 0 1\n1 0 3\n").unwrap();
    let out = majorant(dir.path(), &["dyadic-build", data.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let measure = fs::read_to_string(dir.path().join("measure.csv")).unwrap();
    let leaves: Vec<f64> = measure
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    assert_eq!(leaves.len(), 2);
    assert!((leaves[0] - 3.0 * PI).abs() < 1e-12 && leaves[1] == 0.0);
    let r = report(dir.path());
    assert_eq!(r["verdict"], "audit PASS");
    assert!((measured(&r, "packing") - 3.0 * PI).abs() < 1e-12);
    assert!(dir.path().join("density.csv").exists());
}

#[test]
fn reduce_of_zero_converges_to_zero() {
    let dir = tempfile::tempdir().unwrap();
    let grid = DiskGrid::new(0.1, 20, 32).unwrap();
    let input = write_grid(dir.path(), "zero.csv", grid, |_| 0.0);
    let out = majorant(dir.path(), &["reduce", &input]);
    assert_eq!(out.status.code(), Some(0));
    let r = report(dir.path());
    assert_eq!(r["verdict"], "converged after 1 sweeps");
    let reduced = load_grid(&dir.path().join("reduced.csv")).unwrap();
    assert!(reduced.values().iter().all(|v| *v == 0.0));
    assert!(dir.path().join("trace.csv").exists());
}

#[test]
fn unbounded_input_gives_no_evidence_and_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let grid = DiskGrid::covering(8.0, 0.1, 32).unwrap();
    let input = write_grid(dir.path(), "phi.csv", grid, |z| 1.0 / (1.0 - z.norm()));
    let out = majorant(dir.path(), &["test-majorant", "--grid", &input]);
    assert_eq!(out.status.code(), Some(2), "{}", String::from_utf8_lossy(&out.stderr));
    assert_eq!(report(dir.path())["verdict"], "NO-EVIDENCE");
}

#[test]
fn zero_set_input_yields_a_witness_and_a_harmonic_majorant() {
    let dir = tempfile::tempdir().unwrap();
    let zeros = dir.path().join("zeros.txt");
    fs::write(&zeros, "# two zeros\n0.3 0.1\n-0.4 0.45\n").unwrap();
    let out = majorant(
        dir.path(),
        &["test-majorant", "--zeros", zeros.to_str().unwrap(), "--r-max", "2.5", "--n-theta", "192"],
    );
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = report(dir.path());
    assert_eq!(r["verdict"], "YES");
    let checks = r["checks"].as_array().unwrap();
    assert!(checks.iter().all(|c| c["passed"] == true), "{checks:?}");
    for file in ["phi.csv", "envelope.csv", "witness.csv", "majorant.txt"] {
        assert!(dir.path().join(file).exists(), "{file}");
    }
}

#[test]
fn flags_override_the_config_file_and_defaults_are_echoed() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.toml");
    fs::write(&config, "[operator]\nc = 3.0\n[operator.reduce]\nmax_iter = 9\ntol = 0.01\n").unwrap();
    let grid = DiskGrid::new(0.1, 10, 16).unwrap();
    let input = write_grid(dir.path(), "one.csv", grid, |_| 1.0);
    let out = majorant(
        dir.path(),
        &["reduce", &input, "--config", config.to_str().unwrap(), "--max-iter", "4", "--set", "operator.reduce.cap=100.0"],
    );
    assert_eq!(out.status.code(), Some(0));
    let echo = &report(dir.path())["config"];
    assert_eq!(echo["operator"]["c"], 3.0);
    assert_eq!(echo["operator"]["reduce"]["max_iter"], 4);
    assert_eq!(echo["operator"]["reduce"]["tol"], 0.01);
    assert_eq!(echo["operator"]["reduce"]["cap"], 100.0);
    assert_eq!(echo["rnotlip"]["eps"], 0.01);
    assert!(echo["operator"]["reduce"]["radii"].as_array().unwrap().len() > 3);
}

#[test]
fn identical_runs_write_identical_reports() {
    let grid = DiskGrid::new(0.1, 15, 24).unwrap();
    let mut texts = Vec::new();
    for _ in 0..2 {
        let dir = tempfile::tempdir().unwrap();
        let input = write_grid(dir.path(), "phi.csv", grid, |z| (1.0 - z.norm_sqr()) * (1.0 + z.re));
        let out = majorant(dir.path(), &["envelope", &input, "--c", "2.5"]);
        assert_eq!(out.status.code(), Some(0));
        let r = report(dir.path());
        assert!(measured(&r, "log_lipschitz_defect") <= 1e-12);
        let mut body = r.clone();
        body["config"]["output"] = Value::Null;
        body["inputs"] = Value::Null;
        texts.push((body, fs::read(dir.path().join("envelope.csv")).unwrap()));
    }
    assert_eq!(texts[0], texts[1]);
}

#[test]
fn rnotlip_report_carries_the_target_gradient() {
    let dir = tempfile::tempdir().unwrap();
    let out = majorant(
        dir.path(),
        &[
            "experiment", "rnotlip", "--gamma", "1", "--delta", "0.1", "--eps", "0.01",
            "--set", "rnotlip.options.d_rho=0.1", "--set", "rnotlip.options.n_theta=32",
            "--set", "rnotlip.options.circle_nodes=128", "--set", "rnotlip.options.reduce.max_iter=3",
        ],
    );
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let r = report(dir.path());
    assert_eq!(r["command"], "experiment rnotlip");
    assert!((measured(&r, "log_gradient_target") - 2.0 * 0.9 / 0.99).abs() < 1e-12);
    assert!(dir.path().join("radial_profile.csv").exists());
}

#[test]
fn operational_failures_exit_with_one() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.txt");
    fs::write(&bad, "depth 1\n0 0 -1\n").unwrap();
    let out = majorant(dir.path(), &["dyadic-build", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("error"));

    let missing = majorant(dir.path(), &["reduce", "does-not-exist.csv"]);
    assert_eq!(missing.status.code(), Some(1));
    let unknown = majorant(dir.path(), &["experiment", "rnotlip", "--set", "rnotlip.epsilon=0.1"]);
    assert_eq!(unknown.status.code(), Some(1));
    let usage = majorant(dir.path(), &["frobnicate"]);
    assert_eq!(usage.status.code(), Some(1));
    let precondition = majorant(dir.path(), &["experiment", "rnotlip", "--eps", "0.2"]);
    assert_eq!(precondition.status.code(), Some(1));
}

#[test]
fn thread_count_comes_from_the_environment() {
    let dir = tempfile::tempdir().unwrap();
    let data = dir.path().join("data.txt");
    fs::write(&data, "depth 2\n1 1 2\n").unwrap();
    let run = |threads: &str| {
        Command::new(env!("CARGO_BIN_EXE_majorant"))
            .args(["dyadic-build", data.to_str().unwrap(), "--output"])
            .arg(dir.path())
            .env("MAJORANT_THREADS", threads)
            .output()
            .unwrap()
    };
    assert_eq!(run("2").status.code(), Some(0));
    assert_eq!(run("0").status.code(), Some(1));
    assert_eq!(run("many").status.code(), Some(1));
}

#[test]
fn emitted_grids_reload_bitwise_with_the_infinite_sentinel() {
    let dir = tempfile::tempdir().unwrap();
    let grid = DiskGrid::new(0.2, 5, 8).unwrap();
    let constant = dir.path().join("c.csv");
    emit_grid(&GridFunction::constant(grid, 0.7).unwrap(), &constant).unwrap();
    let text = fs::read_to_string(&constant).unwrap();
    assert!(text.lines().filter(|l| !l.starts_with('#') && !l.starts_with('x')).all(|l| l.ends_with(",0.7")));

    let mut values: Vec<f64> = (0..grid.len()).map(|i| (i as f64).sqrt() / 7.0).collect();
    values[3] = f64::INFINITY;
    let f = GridFunction::new(grid, values).unwrap();
    let path = dir.path().join("f.csv");
    emit_grid(&f, &path).unwrap();
    assert!(fs::read_to_string(&path).unwrap().contains(",inf\n"));
    let back = load_grid(&path).unwrap();
    assert!(back.values().iter().zip(f.values()).all(|(a, b)| a.to_bits() == b.to_bits()));
}
