//! End-to-end runs of the compiled binary: CSV schemas, determinism,
//! exit codes and plot-script emission.

use std::path::{Path, PathBuf};
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ncplane"))
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("ncplane-test-{}-{name}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    dir
}

fn read(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

#[test]
fn lambda_phase_at_zero_traces_unit_circle() {
    let out = scratch("phase0");
    let status = bin()
        .args(["lambda-phase", "--lambda", "0"])
        .args(["--out", out.to_str().unwrap()])
        .status()
        .unwrap();
    assert!(status.success());
    let csv = read(&out.join("lambda_phase.csv"));
    let mut lines = csv.lines();
    assert_eq!(lines.next().unwrap(), "t,re_zeta,im_zeta,abs_zeta");
    let mut rows = 0;
    for line in lines {
        let fields: Vec<f64> = line.split(',').map(|f| f.parse().unwrap()).collect();
        assert_eq!(fields.len(), 4);
        assert!(
            (fields[3] - 1.0).abs() < 1e-12,
            "|zeta| = {} at t = {}",
            fields[3],
            fields[0]
        );
        rows += 1;
    }
    assert!(rows >= 1000);
    // fig3 script uses an equal aspect ratio
    let script = read(&out.join("fig3.gp"));
    assert!(script.contains("set size ratio -1"));
}

#[test]
fn identical_config_and_seed_give_identical_bytes() {
    let conf = scratch("det-conf");
    std::fs::create_dir_all(&conf).unwrap();
    let conf_path = conf.join("run.conf");
    std::fs::write(
        &conf_path,
        "lambda = 0:2:0.5\nzeta_re = 1.0\nt_samples = 2000\nseed = 42\n",
    )
    .unwrap();
    let run = |tag: &str| {
        let out = scratch(tag);
        let status = bin()
            .args(["lambda-radius", "--config", conf_path.to_str().unwrap()])
            .args(["--out", out.to_str().unwrap()])
            .status()
            .unwrap();
        assert!(status.success());
        std::fs::read(out.join("lambda_radius.csv")).unwrap()
    };
    let first = run("det-a");
    let second = run("det-b");
    assert_eq!(first, second, "CSV bytes differ between identical runs");
}

#[test]
fn quantize_verify_reports_small_errors() {
    let out = scratch("qv");
    let status = bin()
        .args(["quantize-verify", "--lambda", "2", "--N", "10", "--seed", "7"])
        .args(["--out", out.to_str().unwrap()])
        .status()
        .unwrap();
    assert!(status.success());
    let csv = read(&out.join("quantize_verify.csv"));
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "identity,N,lambda,max_abs_err,trust_band"
    );
    let mut seen = 0;
    for line in lines {
        let fields: Vec<&str> = line.split(',').collect();
        let err: f64 = fields[3].parse().unwrap();
        assert!(err < 1e-6, "{line}");
        seen += 1;
    }
    assert!(seen >= 7);
}

#[test]
fn exit_codes_follow_the_contract() {
    // unknown key: validation failure, code 1, machine-readable record
    let conf = scratch("codes");
    std::fs::create_dir_all(&conf).unwrap();
    let bad = conf.join("bad.conf");
    std::fs::write(&bad, "no_such_key = 1\n").unwrap();
    let output = bin()
        .args(["spectrum", "--config", bad.to_str().unwrap()])
        .args(["--out", conf.join("o1").to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(1));
    let err = String::from_utf8_lossy(&output.stderr);
    assert!(err.contains("\"exit\":1") && err.contains("\"kind\":\"validation\""), "{err}");

    // spectrum at the critical theta: parameter validation, code 1
    let crit = conf.join("crit.conf");
    std::fs::write(&crit, "B = 1.0\ntheta = 4.0\n").unwrap();
    let output = bin()
        .args(["spectrum", "--config", crit.to_str().unwrap()])
        .args(["--out", conf.join("o2").to_str().unwrap()])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(1));
}

#[test]
fn flags_override_config_file() {
    let conf = scratch("override");
    std::fs::create_dir_all(&conf).unwrap();
    let conf_path = conf.join("run.conf");
    std::fs::write(&conf_path, "lambda = 5.0\nt_samples = 1500\n").unwrap();
    let out = scratch("override-out");
    let status = bin()
        .args(["lambda-phase", "--config", conf_path.to_str().unwrap()])
        .args(["--lambda", "0", "--out", out.to_str().unwrap()])
        .status()
        .unwrap();
    assert!(status.success());
    // the flag value lambda = 0 wins: the trajectory is the unit circle
    let csv = read(&out.join("lambda_phase.csv"));
    for line in csv.lines().skip(1).take(50) {
        let fields: Vec<f64> = line.split(',').map(|f| f.parse().unwrap()).collect();
        assert!((fields[3] - 1.0).abs() < 1e-12);
    }
}

#[test]
fn lambda_error_schema_and_fig_scripts() {
    // fig-1 style: lambda sweep
    let out = scratch("err1");
    let status = bin()
        .args(["lambda-error", "--lambda", "0:6:0.5"])
        .args(["--out", out.to_str().unwrap()])
        .status()
        .unwrap();
    assert!(status.success());
    let csv = read(&out.join("lambda_error.csv"));
    assert!(csv.starts_with("lambda,l,zeta_abs,error\n"));
    let fig1 = read(&out.join("fig1.gp"));
    assert!(fig1.contains("set xlabel \"lambda\"") && fig1.contains("set ylabel \"e\""));

    // fig-2 style: l sweep for several lambda
    let out2 = scratch("err2");
    let status = bin()
        .args(["lambda-error", "--lambda", "2:6:2", "--l", "1.5:5.5:0.5"])
        .args(["--out", out2.to_str().unwrap()])
        .status()
        .unwrap();
    assert!(status.success());
    let fig2 = read(&out2.join("fig2.gp"));
    assert!(fig2.contains("set xlabel \"l\""));
    assert!(fig2.matches("lambda=").count() >= 3);
}

#[test]
fn trajectory_csv_schema() {
    let conf = scratch("traj-conf");
    std::fs::create_dir_all(&conf).unwrap();
    let conf_path = conf.join("run.conf");
    std::fs::write(
        &conf_path,
        "gauge = landau\ntheta = 0.5\nB = 1.0\nt_max = 6.283185307179586\nt_samples = 256\n",
    )
    .unwrap();
    let out = scratch("traj-out");
    let status = bin()
        .args(["classical-traj", "--config", conf_path.to_str().unwrap()])
        .args(["--out", out.to_str().unwrap()])
        .status()
        .unwrap();
    assert!(status.success());
    let csv = read(&out.join("trajectory.csv"));
    assert!(csv.starts_with("t,q1,q2,x1,x2,p1,p2\n"));
    assert_eq!(csv.lines().count(), 257);
    // q and x agree through the theta map on every row
    for line in csv.lines().skip(1) {
        let f: Vec<f64> = line.split(',').map(|v| v.parse().unwrap()).collect();
        let half = 0.5 / 1.0 * 0.5; // theta/(2 hbar)
        assert!((f[1] - (f[3] - half * f[6])).abs() < 1e-12);
        assert!((f[2] - (f[4] + half * f[5])).abs() < 1e-12);
    }
}
