//! End-to-end tests of the `snb` binary: documented outputs, determinism
//! across parallelism degrees, config-file handling and error reporting.

use std::path::PathBuf;
use std::process::{Command, Output};

fn snb(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_snb"))
        .args(args)
        .env_remove("SNB_JOBS")
        .output()
        .expect("binary runs")
}

fn stdout_of(out: &Output) -> String {
    assert!(
        out.status.success(),
        "command failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout.clone()).expect("utf8 output")
}

fn temp_path(name: &str) -> PathBuf {
    let mut p = std::env::temp_dir();
    p.push(format!("snb-test-{}-{name}", std::process::id()));
    p
}

#[test]
fn multiplicity_examples_from_the_interface_contract() {
    let out = stdout_of(&snb(&[
        "multiplicity",
        "--model",
        "--rho",
        "0",
        "--nu",
        "0",
        "--x0",
        "1",
    ]));
    let v: serde_json::Value = serde_json::from_str(out.trim()).expect("valid json");
    assert_eq!(v["vanish_count"], 2);
    assert_eq!(v["agree"], true);

    let out = stdout_of(&snb(&[
        "multiplicity",
        "--model",
        "--rho",
        "0",
        "--nu",
        "0.01",
        "--x0",
        "1",
    ]));
    let v: serde_json::Value = serde_json::from_str(out.trim()).expect("valid json");
    assert_eq!(v["vanish_count"], 1);
    assert_eq!(v["jet_vanish_count"], 1);
}

#[test]
fn multiplicity_generic_field() {
    let out = stdout_of(&snb(&[
        "multiplicity",
        "--field-expr",
        "-x^2+nu+0.1*x^3",
        "--nu",
        "0.01",
        "--x0",
        "1",
        "--eps-min",
        "1e-8",
        "--eps-max",
        "1e-3",
        "--eps-per-decade",
        "10",
    ]));
    let v: serde_json::Value = serde_json::from_str(out.trim()).expect("valid json");
    assert_eq!(v["vanish_count"], 1);
    assert_eq!(v["agree"], true);
}

#[test]
fn lengths_columns_and_determinism_across_jobs() {
    let args = [
        "lengths",
        "--model",
        "--rho",
        "0",
        "--nu",
        "0.01",
        "--x0",
        "1",
        "--eps-min",
        "1e-6",
        "--eps-max",
        "1e-3",
        "--eps-per-decade",
        "10",
    ];
    let serial = snb(&[&args[..], &["--jobs", "1"]].concat());
    let parallel = snb(&[&args[..], &["--jobs", "4"]].concat());
    let s = stdout_of(&serial);
    let p = stdout_of(&parallel);
    assert_eq!(s, p, "outputs differ across parallelism degrees");
    let mut lines = s.lines();
    assert_eq!(
        lines.next().unwrap(),
        "epsilon,nu,n_discrete,tau,tail_discrete,tail_continuous,total_length"
    );
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 31);
    for row in rows {
        assert_eq!(row.split(',').count(), 7);
    }
}

#[test]
fn fit_json_and_sample_dump() {
    let dump = temp_path("samples.csv");
    let out = stdout_of(&snb(&[
        "fit",
        "--model",
        "--rho",
        "0",
        "--nu",
        "0.01",
        "--x0",
        "1",
        "--degree",
        "2",
        "--eps-min",
        "1e-8",
        "--eps-max",
        "1e-3",
        "--dump-samples",
        dump.to_str().unwrap(),
    ]));
    let v: serde_json::Value = serde_json::from_str(out.trim()).expect("valid json");
    assert_eq!(v["degree"], 2);
    let coeffs = v["coefficients"].as_array().unwrap();
    assert_eq!(coeffs.len(), 3);
    let c1 = coeffs[1].as_f64().unwrap();
    let expected = 1.0 - (-0.2f64).exp();
    assert!(((c1 - expected) / expected).abs() < 1e-3, "c1 = {c1}");
    assert!(v["residual_rms"].as_f64().unwrap() >= 0.0);
    assert!(v["condition"].as_f64().unwrap() >= 1.0);

    let dumped = std::fs::read_to_string(&dump).expect("dump file written");
    assert!(dumped.starts_with("epsilon,eta,i_value,ell_c\n"));
    assert!(dumped.lines().count() > 100);
    std::fs::remove_file(&dump).ok();
}

#[test]
fn validate_all_exits_zero() {
    let out = snb(&["validate", "all"]);
    assert!(
        out.status.success(),
        "validate all failed: {}",
        String::from_utf8_lossy(&out.stdout)
    );
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("identity,grid,max_err,tolerance,pass"));
    assert!(text.contains("abel_equation"));
    assert!(!text.contains(",false"));
}

#[test]
fn validate_rejects_unknown_suite() {
    let out = snb(&["validate", "nonsense"]);
    assert!(!out.status.success());
}

#[test]
fn orbit_csv() {
    let out = stdout_of(&snb(&[
        "orbit",
        "--model",
        "--rho",
        "0",
        "--nu",
        "0",
        "--x0",
        "1",
        "--eps-min",
        "1e-4",
    ]));
    let mut lines = out.lines();
    assert_eq!(lines.next().unwrap(), "n,x");
    let first: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(first[0], "0");
    assert!(first[1].starts_with("1.0000000000000000e0"));
}

#[test]
fn boxdim_rows() {
    let out = stdout_of(&snb(&[
        "boxdim",
        "--model",
        "--rho",
        "0",
        "--nu",
        "0.01",
        "--x0",
        "1",
        "--eps-min",
        "1e-8",
        "--eps-max",
        "1e-5",
        "--eps-per-decade",
        "15",
    ]));
    let mut lines = out.lines();
    assert_eq!(lines.next().unwrap(), "nu,slope,dim_estimate");
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    assert_eq!(row.len(), 3);
    let dim: f64 = row[2].parse().unwrap();
    assert!(dim < 0.2, "hyperbolic dimension estimate {dim}");
}

#[test]
fn sweep_medians_increase_toward_bifurcation() {
    let out = stdout_of(&snb(&[
        "sweep",
        "--model",
        "--rho",
        "0",
        "--x0",
        "1",
        "--nu-grid",
        "1e-4,1e-2,3",
        "--eps-min",
        "1e-8",
        "--eps-max",
        "1e-7",
        "--eps-per-decade",
        "10",
    ]));
    let mut lines = out.lines();
    assert_eq!(lines.next().unwrap(), "nu,median_content");
    let medians: Vec<f64> = lines
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    assert_eq!(medians.len(), 3);
    // nu ascending in the output; content grows toward nu = 0.
    assert!(medians[0] > medians[1] && medians[1] > medians[2]);
}

#[test]
fn config_file_with_flag_override() {
    let cfg_path = temp_path("run.cfg");
    std::fs::write(
        &cfg_path,
        "# run configuration\nmodel = true\nrho = 0\nnu = 0.01\nx0 = 1\neps_per_decade = 20\n",
    )
    .unwrap();

    // Config alone: hyperbolic, one vanishing coefficient.
    let out = stdout_of(&snb(&[
        "multiplicity",
        "--config",
        cfg_path.to_str().unwrap(),
    ]));
    let v: serde_json::Value = serde_json::from_str(out.trim()).unwrap();
    assert_eq!(v["vanish_count"], 1);

    // Flag overrides the file's nu: parabolic, two vanishing coefficients.
    let out = stdout_of(&snb(&[
        "multiplicity",
        "--config",
        cfg_path.to_str().unwrap(),
        "--nu",
        "0",
    ]));
    let v: serde_json::Value = serde_json::from_str(out.trim()).unwrap();
    assert_eq!(v["vanish_count"], 2);
    std::fs::remove_file(&cfg_path).ok();
}

#[test]
fn config_errors_are_field_level() {
    // eps_max beyond the displacement range at x0.
    let out = snb(&[
        "lengths",
        "--model",
        "--rho",
        "0",
        "--nu",
        "0",
        "--x0",
        "1",
        "--eps-max",
        "0.4",
    ]);
    assert!(!out.status.success());
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("eps_max"), "stderr: {err}");

    // Missing field specification.
    let out = snb(&["lengths", "--nu", "0"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("field"));

    // Malformed expression reports a position.
    let out = snb(&["fit", "--field-expr", "-x^2 + mu", "--nu", "0"]);
    assert!(!out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown identifier"));
}

#[test]
fn snb_jobs_environment_default() {
    let out = Command::new(env!("CARGO_BIN_EXE_snb"))
        .args([
            "lengths",
            "--model",
            "--rho",
            "0",
            "--nu",
            "0.01",
            "--x0",
            "1",
            "--eps-min",
            "1e-5",
            "--eps-max",
            "1e-3",
            "--eps-per-decade",
            "10",
        ])
        .env("SNB_JOBS", "2")
        .output()
        .expect("binary runs");
    let with_env = stdout_of(&out);
    let without = stdout_of(&snb(&[
        "lengths",
        "--model",
        "--rho",
        "0",
        "--nu",
        "0.01",
        "--x0",
        "1",
        "--eps-min",
        "1e-5",
        "--eps-max",
        "1e-3",
        "--eps-per-decade",
        "10",
    ]));
    assert_eq!(with_env, without);
}
