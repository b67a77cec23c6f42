//! End-to-end runs of the `lattice-cavity` binary.

use std::fs;
use std::path::PathBuf;
use std::process::{Command, Output};

const MINIMAL: &str = "lambda = -9e-4\nn_sites = 1000\nr1_intensity = 0.99\nr2_intensity = 0.99\n";

fn scratch_dir(name: &str) -> PathBuf {
    let dir = PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name);
    fs::create_dir_all(&dir).unwrap();
    dir
}

fn write_config(name: &str, text: &str) -> PathBuf {
    let path = scratch_dir("configs").join(name);
    fs::write(&path, text).unwrap();
    path
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_lattice-cavity"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn header_value<'a>(text: &'a str, key: &str) -> Option<&'a str> {
    let prefix = format!("# {key} = ");
    text.lines().find_map(|l| l.strip_prefix(prefix.as_str()))
}

fn data_rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .filter(|l| !l.starts_with('#'))
        .skip(1)
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

#[test]
fn coeffs_reports_both_methods() {
    let out = run(&["coeffs"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert_eq!(header_value(&text, "lambda"), Some("-9.00000000000e-4"));
    assert_eq!(header_value(&text, "source"), Some("dimensionless"));
    let rows = data_rows(&text);
    assert_eq!(rows.len(), 2);
    assert_eq!(rows[0][0], "closed_form");
    assert_eq!(rows[1][0], "transfer_matrix");
    let r2: f64 = rows[0][9].parse().unwrap();
    assert!((r2 - 0.447).abs() < 0.005);
    let dev: f64 = rows[0][12].parse().unwrap();
    assert!(dev < 1e-9);
}

#[test]
fn zero_coupling_gives_identity_coefficients() {
    let cfg = write_config(
        "empty.cfg",
        "lambda = 0\nn_sites = 50\nr1_intensity = 0.99\nr2_intensity = 0.99\n",
    );
    let out = run(&["coeffs", "--config", cfg.to_str().unwrap()]);
    assert!(out.status.success());
    for row in data_rows(&stdout(&out)) {
        let v: Vec<f64> = row[3..9].iter().map(|c| c.parse().unwrap()).collect();
        // r_fwd, r_bwd vanish and t = 1; the matrix product carries phase rounding
        let tol = if row[0] == "closed_form" { 0.0 } else { 1e-12 };
        let expect = [0.0, 0.0, 0.0, 0.0, 1.0, 0.0];
        assert!(
            v.iter().zip(expect).all(|(a, b)| (a - b).abs() <= tol),
            "{row:?}"
        );
    }
}

#[test]
fn output_is_deterministic_and_out_matches_stdout() {
    let cfg = write_config("minimal.cfg", MINIMAL);
    let args = [
        "det-scan",
        "--config",
        cfg.to_str().unwrap(),
        "--n-u",
        "20",
        "--n-chi",
        "7",
    ];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(data_rows(&stdout(&a)).len(), 140);

    let path = scratch_dir("out").join("scan.csv");
    let mut with_out = args.to_vec();
    with_out.extend(["--out", path.to_str().unwrap()]);
    let c = run(&with_out);
    assert!(c.status.success());
    assert!(c.stdout.is_empty());
    assert_eq!(fs::read(&path).unwrap(), a.stdout);
}

#[test]
fn physical_parameters_are_echoed() {
    let cfg = write_config(
        "physical.cfg",
        "n_sites = 1000\nr1_intensity = 0.99\nr2_intensity = 0.99\ndipole_moment = 2.32e-29\n\
         wavelength = 800e-9\ndetuning = -1e9\noverlap_a = 3.5e8\natoms_per_site = 1000\n",
    );
    let out = run(&["spacing", "--config", cfg.to_str().unwrap()]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert_eq!(header_value(&text, "source"), Some("physical"));
    let per_atom: f64 = header_value(&text, "lambda_per_atom")
        .unwrap()
        .parse()
        .unwrap();
    assert!((per_atom / -9e-7 - 1.0).abs() < 0.2);
}

#[test]
fn uniform_gas_mode_has_the_empty_linewidth() {
    let out = run(&["resonances", "--mode", "uniform-gas"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert_eq!(header_value(&text, "mode"), Some("uniform-gas"));
    let rows = data_rows(&text);
    assert_eq!(rows.len(), 1);
    let gamma: f64 = rows[0][2].parse().unwrap();
    assert!((gamma + 0.99f64.ln() / std::f64::consts::PI).abs() < 1e-12);
}

#[test]
fn linewidth_inset_columns() {
    let out = run(&["linewidth-inset", "--n-track", "64"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let rows = data_rows(&text);
    assert_eq!(rows.len(), 64);
    let dashed: Vec<f64> = rows.iter().map(|r| r[2].parse().unwrap()).collect();
    assert!(dashed.iter().all(|g| (g - dashed[0]).abs() < 1e-12));
    let empty: f64 = header_value(&text, "gamma_empty").unwrap().parse().unwrap();
    let solid: Vec<f64> = rows.iter().map(|r| r[1].parse().unwrap()).collect();
    assert!(solid.iter().any(|&g| g < empty) && solid.iter().any(|&g| g > empty));
}

#[test]
fn envelope_on_a_branch() {
    let out = run(&[
        "envelope",
        "--u",
        "-0.5",
        "--branch",
        "1",
        "--n-track",
        "128",
        "--samples-per-segment",
        "4",
    ]);
    assert!(
        out.status.success(),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    let text = stdout(&out);
    assert_eq!(header_value(&text, "branches_available"), Some("2"));
    let closure: f64 = header_value(&text, "closure_error")
        .unwrap()
        .parse()
        .unwrap();
    assert!(closure < 1e-9);
    // free region, 999 gaps, free region, closing row
    assert_eq!(data_rows(&text).len(), 1002);
}

#[test]
fn numerical_failures_exit_with_3() {
    let out = run(&["envelope", "--u", "0.0", "--n-track", "64"]);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("error:"));
    let out = run(&[
        "envelope",
        "--u",
        "-0.5",
        "--branch",
        "5",
        "--n-track",
        "64",
    ]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn config_errors_exit_with_2_and_name_the_key() {
    let cases = [
        ("unknown.cfg", format!("{MINIMAL}colour = red\n"), "colour"),
        (
            "duplicate.cfg",
            format!("{MINIMAL}n_sites = 5\n"),
            "n_sites",
        ),
        ("missing.cfg", "lambda = -9e-4\n".to_string(), "n_sites"),
        (
            "range.cfg",
            MINIMAL.replace("0.99\n", "1.5\n"),
            "r1_intensity",
        ),
        (
            "both.cfg",
            format!("{MINIMAL}detuning = -1e9\n"),
            "detuning",
        ),
    ];
    for (name, text, key) in cases {
        let cfg = write_config(name, &text);
        let out = run(&["coeffs", "--config", cfg.to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(2), "{name}");
        let err = String::from_utf8_lossy(&out.stderr);
        assert!(err.contains(key), "{name}: {err}");
    }
    let out = run(&["coeffs", "--config", "/nonexistent/path.cfg"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["det-scan", "--n-u", "1"]);
    assert_eq!(out.status.code(), Some(2));
}
