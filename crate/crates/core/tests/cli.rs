//! End-to-end runs of the `mcflow` binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn config(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs").join(name)
}

fn mcflow(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mcflow")).args(args).output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn run_in(dir: &Path, file: &str, extra: &[&str]) -> Output {
    let cfg = config(file);
    let mut args = vec!["run", cfg.to_str().unwrap(), "--out", dir.to_str().unwrap()];
    args.extend_from_slice(extra);
    mcflow(&args)
}

fn summary(dir: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(dir.join("summary.json")).unwrap()).unwrap()
}

#[test]
fn check_reports_each_condition() {
    let ok = mcflow(&["check", config("product_flow.toml").to_str().unwrap()]);
    assert_eq!(code(&ok), 0);
    let text = String::from_utf8(ok.stdout).unwrap();
    for name in ["lower_barrier", "upper_barrier", "g_nonincreasing"] {
        assert!(text.contains(name), "{text}");
    }
    let bad = mcflow(&["check", config("check_failing.toml").to_str().unwrap()]);
    assert_eq!(code(&bad), 1);
    assert_eq!(String::from_utf8(bad.stdout).unwrap().matches("FAIL").count(), 3);
    let warped = mcflow(&["check", config("weighted_cosh.toml").to_str().unwrap()]);
    assert_eq!(code(&warped), 0);
    assert!(String::from_utf8(warped.stdout).unwrap().contains("critical_point"));
}

#[test]
fn converged_run_writes_the_run_directory() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), "product_flow.toml", &["--set", "grid.resolution=[32]"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stdout));
    let s = summary(dir.path());
    assert_eq!(s["status"], "converged");
    assert_eq!(s["termination"], "stationary");
    assert!(s["final_sup_ut"].as_f64().unwrap() < 1e-8);
    let trace = std::fs::read_to_string(dir.path().join("trace.csv")).unwrap();
    let mut lines = trace.lines();
    assert_eq!(lines.next(), Some("t,sup_ut,sup_omega,min_u,max_u,energy,cumulative_dissipation"));
    let row: Vec<f64> = lines.next().unwrap().split(',').map(|v| v.parse().unwrap()).collect();
    assert_eq!(row.len(), 7);
    assert_eq!(row[0], 0.0);
    let initial = std::fs::read_to_string(dir.path().join("initial.csv")).unwrap();
    assert_eq!(initial.lines().count(), 33);
    assert!(initial.starts_with("x1,u\n0,0.3\n"), "{initial}");
    assert!(std::fs::read_to_string(dir.path().join("report.txt")).unwrap().contains("exit: 0"));
}

#[test]
fn failing_hypotheses_exit_five_unless_skipped() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), "check_failing.toml", &[]);
    assert_eq!(code(&out), 5);
    assert_eq!(summary(dir.path())["status"], "condition_failure");
    assert!(!dir.path().join("trace.csv").exists());

    let out = run_in(dir.path(), "check_failing.toml", &["--skip-check", "--set", "integrator.t_max=0.5"]);
    assert_eq!(code(&out), 2);
    assert!(dir.path().join("trace.csv").exists());
}

#[test]
fn blow_up_exits_three() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(
        dir.path(),
        "check_failing.toml",
        &["--skip-check", "--set", "data.h=u^3", "--set", "data.g=0", "--set", "data.u_init=2 + 0.1*sin(x1)", "--set", "data.slab=[-10.0, 10.0]"],
    );
    assert_eq!(code(&out), 3, "{}", String::from_utf8_lossy(&out.stdout));
    let s = summary(dir.path());
    assert_eq!(s["termination"], "diverged");
    assert!(s["divergence"].is_string());
}

#[test]
fn coarse_grid_fails_a_monitor() {
    // on a 16x16 grid the discrete energy identity is off by a factor of a few
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), "product_flow_2d.toml", &["--set", "grid.resolution=[16, 16]"]);
    assert_eq!(code(&out), 4);
    let s = summary(dir.path());
    let failed: Vec<_> = s["monitors"]["entries"]
        .as_array()
        .unwrap()
        .iter()
        .filter(|e| e["pass"] == false)
        .map(|e| e["name"].as_str().unwrap().to_string())
        .collect();
    assert_eq!(failed, ["dissipation_identity"]);
}

#[test]
fn weighted_run_reports_the_critical_height() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), "weighted_cosh.toml", &["--set", "grid.resolution=[32]"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stdout));
    let s = summary(dir.path());
    assert_eq!(s["metrics"]["critical_height"].as_f64(), Some(0.0));
    assert!(s["metrics"]["distance_to_critical_height"].as_f64().unwrap() < 1e-7);
}

#[test]
fn slice_ode_matches_closed_form() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = config("slice_cosh.toml");
    let out = mcflow(&["slice-ode", cfg.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    // r' = -sinh r integrates to tanh(r/2) = tanh(r0/2) e^{-t}
    let exact = 2.0 * (0.25f64.tanh() * (-2.0f64).exp()).atanh();
    let s = summary(dir.path());
    assert!((s["final_height"].as_f64().unwrap() - exact).abs() < 1e-10);
    let rows = std::fs::read_to_string(dir.path().join("trajectory.csv")).unwrap();
    assert_eq!(rows.lines().count(), 2002);
}

#[test]
fn config_errors_exit_one_with_a_location() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    let text = std::fs::read_to_string(config("product_flow.toml")).unwrap();
    std::fs::write(&path, text.replace("h = \"-u\"", "h = \"-u * (1 +\"")).unwrap();
    let out = mcflow(&["check", path.to_str().unwrap()]);
    assert_eq!(code(&out), 1);
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("line 9, column 15"), "{err}");

    std::fs::write(&path, text.replace("slab = [-1.0, 1.0]\n", "")).unwrap();
    let out = mcflow(&["run", path.to_str().unwrap(), "--out", dir.path().to_str().unwrap()]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8(out.stderr).unwrap().contains("data.slab"));

    assert_eq!(code(&mcflow(&["check", "/nonexistent.toml"])), 1);
    assert_eq!(code(&mcflow(&["run"])), 1);
    assert_eq!(code(&mcflow(&["--help"])), 0);
    let cfg = config("product_flow.toml");
    assert_eq!(code(&mcflow(&["check", cfg.to_str().unwrap(), "--set", "oops"])), 1);
    let slice = config("slice_cosh.toml");
    assert_eq!(code(&mcflow(&["run", slice.to_str().unwrap()])), 1);
}

#[test]
fn stationary_start_stops_at_the_first_sample() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_in(dir.path(), "weighted_cosh.toml", &["--set", "data.u_init=0", "--set", "grid.resolution=[32]"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stdout));
    let trace = std::fs::read_to_string(dir.path().join("trace.csv")).unwrap();
    assert_eq!(trace.lines().count(), 2, "{trace}");
    assert_eq!(summary(dir.path())["steps"], 0);
}
