use std::path::Path;
use std::process::{Command, Output};

const Q1_GDN: &str = r#"
schema_version = 1

[problem]
name = "quadratic"
params = { a = [[4.0]], b = [[-2.0]], c = [[2.0]] }

[solver]
algorithm = "GDN"
alpha_L = 0.1

[init]
x0 = [1.0]
y0 = [1.0]

[run]
max_iter = 200
grad_tol = 1e-10
"#;

fn minimax(args: &[&str], out_dir_env: Option<&Path>) -> Output {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_minimax"));
    cmd.args(args).env_remove("MINIMAX_OUT_DIR");
    if let Some(dir) = out_dir_env {
        cmd.env("MINIMAX_OUT_DIR", dir);
    }
    cmd.output().expect("binary runs")
}

fn json(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stdout)))
}

#[test]
fn run_writes_trace_and_report() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("q1.toml");
    std::fs::write(&cfg, Q1_GDN).unwrap();
    let out_dir = dir.path().join("out");
    let out = minimax(&["run", "--config", cfg.to_str().unwrap(), "--out-dir", out_dir.to_str().unwrap()], None);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let report = json(&out);
    assert_eq!(report["termination"], "grad_tol");
    assert_eq!(report["rates"]["rows"][0]["status"], "pass");
    let csv = std::fs::read_to_string(out_dir.join("trace.csv")).unwrap();
    assert!(csv.starts_with("iter,wall_time_s,f,grad_x_norm,grad_y_norm,dist_x,dist_y,cg_iters_x,cg_iters_y\n"));
}

#[test]
fn out_dir_defaults_to_environment() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("q1.toml");
    std::fs::write(&cfg, Q1_GDN.replace("max_iter = 200", "max_iter = 3")).unwrap();
    let out = minimax(&["run", "--config", cfg.to_str().unwrap()], Some(dir.path()));
    // max_iter reached: exit status 1
    assert_eq!(out.status.code(), Some(1));
    assert!(dir.path().join("trace.csv").exists());
    assert!(dir.path().join("report.json").exists());
}

#[test]
fn config_errors_exit_with_message() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    std::fs::write(&cfg, Q1_GDN.replace("alpha_L = 0.1", "alpha_L = -1.0")).unwrap();
    let out = minimax(&["run", "--config", cfg.to_str().unwrap(), "--out-dir", dir.path().to_str().unwrap()], None);
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("solver.alpha_L"));
    let missing = minimax(&["run", "--config", "/nonexistent/x.toml"], None);
    assert_eq!(missing.status.code(), Some(3));
}

#[test]
fn compare_aligns_runs() {
    let dir = tempfile::tempdir().unwrap();
    let gdn = dir.path().join("gdn.toml");
    let cn = dir.path().join("cn.toml");
    std::fs::write(&gdn, Q1_GDN).unwrap();
    std::fs::write(&cn, Q1_GDN.replace("\"GDN\"", "\"CN\"")).unwrap();
    let out = minimax(&["compare", "--configs", gdn.to_str().unwrap(), cn.to_str().unwrap(), "--out-dir", dir.path().to_str().unwrap()], None);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let summary = json(&out);
    assert_eq!(summary["runs"].as_array().unwrap().len(), 2);
    let csv = std::fs::read_to_string(dir.path().join("compare.csv")).unwrap();
    assert!(csv.lines().next().unwrap().starts_with("iter,GDN.wall_time_s"));

    let other = dir.path().join("other.toml");
    std::fs::write(&other, Q1_GDN.replace("x0 = [1.0]", "x0 = [2.0]")).unwrap();
    let out = minimax(&["compare", "--configs", gdn.to_str().unwrap(), other.to_str().unwrap(), "--out-dir", dir.path().to_str().unwrap()], None);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn classify_reports_flags() {
    let out = minimax(&["classify", "--problem", "cubic_example", "--point", "0,0"], None);
    assert!(out.status.success());
    let c = json(&out);
    assert_eq!(c["is_slmm"], true);
    assert_eq!(c["is_strict_local_nash"], false);

    let out = minimax(&["classify", "--problem", "sin_product", "--point", "0,-1.5707963267948966"], None);
    let c = json(&out);
    assert_eq!(c["is_stationary"], true);
    assert_eq!(c["is_slmm"], false);

    let out = minimax(&["classify", "--problem", "cubic_example", "--point", "0"], None);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn rates_use_known_solution() {
    let out = minimax(
        &["rates", "--problem", "quadratic", "--param", "a=[[4.0]]", "--param", "b=[[-2.0]]", "--param", "c=[[2.0]]", "--alpha-l", "0.1", "--alpha-f", "0.1"],
        None,
    );
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let r = json(&out);
    assert!((r["rho_l"].as_f64().unwrap() - 0.4).abs() < 1e-12);
    assert!((r["jacobian_spectral_radius"]["GDN/alternating"].as_f64().unwrap() - 0.4).abs() < 1e-6);

    let out = minimax(&["rates", "--problem", "bilinear", "--alpha-l", "0.1", "--alpha-f", "0.1"], None);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn check_derivatives_passes_for_sampled_problem() {
    let out = minimax(&["check-derivatives", "--problem", "gaussian_mean", "--param", "sigma=ill", "--param", "n_samples=500", "--seed", "4"], None);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let r = json(&out);
    assert!(r["max_relative_error"].as_f64().unwrap() < 1e-5);
    assert_eq!(r["points"].as_array().unwrap().len(), 5);
}
