use super::*;
use crate::solvers::{Algorithm, Termination};

const MINIMAL: &str = r#"
schema_version = 1

[problem]
name = "quadratic"
params = { a = [[4.0]], b = [[-2.0]], c = [[2.0]] }

[solver]
algorithm = "GDN"
alpha_L = 0.1

[run]
max_iter = 60
"#;

const QUARTIC_CN: &str = r#"
schema_version = 1

[problem]
name = "synthetic_quartic"

[solver]
algorithm = "CN"

[init]
x0 = [0.02, 0.04]
y0 = [0.03, 0.05]

[run]
max_iter = 10
dist_tol = 1e-8
"#;

fn with_init(doc: &str, x0: &str, y0: &str) -> String {
    format!("{doc}\n[init]\nx0 = {x0}\ny0 = {y0}\n")
}

fn range_errors(doc: &str) -> Vec<String> {
    match parse_config(doc) {
        Err(crate::Error::ConfigRanges(errs)) => errs,
        other => panic!("expected range errors, got {other:?}"),
    }
}

#[test]
fn minimal_document_gets_defaults() {
    let c = parse_config(MINIMAL).unwrap();
    assert_eq!(c.problem.seed, 0);
    assert_eq!(c.init, InitConfig::default());
    assert_eq!(c.run.grad_tol, None);
    assert_eq!(c.run.burn_in, 5);
    assert_eq!(c.output, OutputConfig::default());
    assert_eq!(c.solver.k, 1);
    assert_eq!(c.solver.gamma_x, 1.0);
    assert_eq!(c.solver.cg, crate::CgBudget::default());
    assert_eq!(c.solver.mode(), crate::Mode::Alternating);
}

#[test]
fn range_errors_name_their_keys() {
    let errs = range_errors(&MINIMAL.replace("alpha_L = 0.1", "alpha_L = -1.0"));
    assert!(errs.iter().any(|e| e.starts_with("solver.alpha_L")), "{errs:?}");

    let doc = MINIMAL.replace("alpha_L = 0.1", "alpha_L = -1.0\nbeta = 2.0\ngamma_y = 0.0").replace("max_iter = 60", "max_iter = 60\ngrad_tol = -1.0")
        + "\n[output]\nfloat_precision = 40\n";
    let errs = range_errors(&doc);
    for key in ["solver.alpha_L", "solver.beta", "solver.gamma_y", "run.grad_tol", "output.float_precision"] {
        assert!(errs.iter().any(|e| e.starts_with(key)), "{key} missing from {errs:?}");
    }
    assert!(range_errors(&MINIMAL.replace("schema_version = 1", "schema_version = 2"))[0].starts_with("schema_version"));
}

#[test]
fn parse_errors_carry_paths() {
    let err = parse_config(&MINIMAL.replace("alpha_L = 0.1", "alpha_L = 0.1\nalpah_F = 0.2")).unwrap_err();
    assert!(matches!(&err, crate::Error::Config { path, .. } if path == "solver.alpah_F"), "{err}");
    let err = parse_config(&MINIMAL.replace("max_iter = 60", "max_iter = \"many\"")).unwrap_err();
    assert!(matches!(&err, crate::Error::Config { path, .. } if path == "run.max_iter"), "{err}");
    let err = parse_config(&MINIMAL.replace("algorithm = \"GDN\"", "algorithm = \"SGD\"")).unwrap_err();
    assert!(matches!(&err, crate::Error::Config { path, .. } if path == "solver.algorithm"), "{err}");
    assert!(matches!(parse_config("schema_version = ").unwrap_err(), crate::Error::Config { .. }));
    let errs = range_errors(&MINIMAL.replace("\"quadratic\"", "\"nope\""));
    assert!(errs[0].starts_with("problem.name"), "{errs:?}");
    let errs = range_errors(&with_init(MINIMAL, "[1.0, 2.0]", "[0.0]"));
    assert!(errs[0].starts_with("init.x0"), "{errs:?}");
    let errs = range_errors(&(MINIMAL.to_string() + "\n[init]\nmode = \"seeded_gaussian\"\n"));
    assert!(errs[0].starts_with("init.stddev"), "{errs:?}");
}

#[test]
fn quartic_document_round_trips() {
    let c = parse_config(QUARTIC_CN).unwrap();
    assert_eq!(c.init.x0.as_deref(), Some(&[0.02, 0.04][..]));
    let text = c.to_toml().unwrap();
    let again = parse_config(&text).unwrap();
    assert_eq!(again, c);
    assert_eq!(again.to_toml().unwrap(), text);

    let c = parse_config(MINIMAL).unwrap();
    assert_eq!(parse_config(&c.to_toml().unwrap()).unwrap(), c);
}

#[test]
fn q1_gdn_rate_report_passes() {
    let dir = tempfile::tempdir().unwrap();
    let c = parse_config(&with_init(MINIMAL, "[1.0]", "[1.0]")).unwrap();
    let out = run_experiment(&c, dir.path()).unwrap();
    let rates = out.report.rates.as_ref().unwrap();
    assert_eq!(rates.rows.len(), 1);
    let row = &rates.rows[0];
    assert!((row.theoretical.unwrap() - 0.4).abs() < 1e-12);
    assert!(row.relative_error.unwrap() <= RATE_TOLERANCE, "{row:?}");
    assert_eq!(row.status, RateStatus::Pass);
    assert_eq!(out.exit_code(), 1);

    let json: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(&out.report_path).unwrap()).unwrap();
    assert_eq!(json["rates"]["rows"][0]["status"], "pass");
    assert_eq!(json["termination"], "max_iter");
}

#[test]
fn quartic_cn_reaches_tolerance() {
    let dir = tempfile::tempdir().unwrap();
    let out = run_experiment(&parse_config(QUARTIC_CN).unwrap(), dir.path()).unwrap();
    assert_eq!(out.trace.termination, Termination::DistTol);
    assert!(out.trace.iterations() <= 10);
    assert_eq!(out.exit_code(), 0);
    let csv = std::fs::read_to_string(&out.trace_path).unwrap();
    assert_eq!(csv.lines().next().unwrap(), TRACE_HEADER);
    assert_eq!(csv.lines().count(), out.trace.rows.len() + 1);
    assert!(!csv.contains('\r'));
}

#[test]
fn zero_iterations_writes_one_row() {
    let dir = tempfile::tempdir().unwrap();
    let c = parse_config(&MINIMAL.replace("max_iter = 60", "max_iter = 0")).unwrap();
    let out = run_experiment(&c, dir.path()).unwrap();
    let csv = std::fs::read_to_string(&out.trace_path).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines.len(), 2);
    // wall time off: the column stays empty
    assert!(lines[1].starts_with("0,,"), "{}", lines[1]);
}

#[test]
fn identical_configs_give_identical_files() {
    let doc = r#"
schema_version = 1
[problem]
name = "gaussian_mean"
seed = 3
params = { sigma = "ill", n_samples = 2000 }
[solver]
algorithm = "GDA"
alpha_L = 0.05
alpha_F = 0.5
[init]
mode = "seeded_gaussian"
stddev = 0.1
[run]
max_iter = 50
"#;
    let c = parse_config(doc).unwrap();
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let oa = run_experiment(&c, a.path()).unwrap();
    let ob = run_experiment(&c, b.path()).unwrap();
    assert_eq!(std::fs::read(&oa.trace_path).unwrap(), std::fs::read(&ob.trace_path).unwrap());
    assert_eq!(std::fs::read(&oa.report_path).unwrap(), std::fs::read(&ob.report_path).unwrap());
    let z0 = &oa.trace.rows[0].z;
    assert!(z0.x.iter().chain(&z0.y).all(|v| v.abs() < 1.0));
}

#[test]
fn numerical_failure_keeps_partial_trace() {
    let dir = tempfile::tempdir().unwrap();
    let doc = r#"
schema_version = 1
[problem]
name = "bilinear"
[solver]
algorithm = "GDA"
alpha_L = 10.0
alpha_F = 10.0
[init]
x0 = [1.0]
y0 = [0.0]
[run]
max_iter = 500
"#;
    let out = run_experiment(&parse_config(doc).unwrap(), dir.path()).unwrap();
    assert_eq!(out.trace.termination, Termination::NumericalFailure);
    assert_eq!(out.exit_code(), 2);
    assert!(out.trace.iterations() < 20);
    assert!(out.report.failure.is_some());
    assert!(out.report.rates.is_none());
    let csv = std::fs::read_to_string(&out.trace_path).unwrap();
    assert_eq!(csv.lines().count(), out.trace.rows.len() + 1);
    // no known solution: distance cells are empty
    assert!(csv.lines().nth(1).unwrap().contains(",,,0,0") || csv.lines().nth(1).unwrap().split(',').nth(5) == Some(""));
}

#[test]
fn output_paths_resolve_under_out_dir() {
    let dir = tempfile::tempdir().unwrap();
    let doc = format!("{QUARTIC_CN}\n[output]\ntrace_path = \"nested/t.csv\"\nreport_path = \"r.json\"\nwall_time = true\nfloat_precision = 4\n");
    let out = run_experiment(&parse_config(&doc).unwrap(), dir.path()).unwrap();
    assert_eq!(out.trace_path, dir.path().join("nested/t.csv"));
    let csv = std::fs::read_to_string(&out.trace_path).unwrap();
    let second: Vec<&str> = csv.lines().nth(1).unwrap().split(',').collect();
    assert!(!second[1].is_empty());
    assert_eq!(second[2], format_float(out.trace.rows[0].f, Some(4)));
    assert_eq!(second[2], "0.0005851");
}

fn quartic(alg: Algorithm) -> ExperimentConfig {
    let mut c = parse_config(QUARTIC_CN).unwrap();
    c.solver = crate::SolverSpec::new(alg).with_steps(0.08, 0.5);
    c.run.max_iter = 400;
    c
}

#[test]
fn quartic_comparison_orders_newton_first() {
    let dir = tempfile::tempdir().unwrap();
    let algs = [Algorithm::Cn, Algorithm::Gdn, Algorithm::Tgda, Algorithm::Fr, Algorithm::Gda];
    let configs: Vec<_> = algs.iter().map(|&a| quartic(a)).collect();
    let out = compare_algorithms(&configs, dir.path()).unwrap();
    let iters = |l: &str| out.trace(l).unwrap().first_iter_where(|r| r.distance().unwrap() < 1e-8).unwrap_or(usize::MAX);
    let (cn, gdn, tgda, fr) = (iters("CN"), iters("GDN"), iters("TGDA"), iters("FR"));
    assert!(cn < gdn && gdn < tgda, "{cn} {gdn} {tgda}");
    assert!(tgda.abs_diff(fr) <= tgda / 5, "{tgda} {fr}");
    assert_eq!(out.summary.runs.len(), 5);
    assert_eq!(out.summary.runs[0].termination, Termination::DistTol);

    let csv = std::fs::read_to_string(&out.csv_path).unwrap();
    let header: Vec<&str> = csv.lines().next().unwrap().split(',').collect();
    assert_eq!(header.len(), 1 + 5 * TRACE_FIELDS.len());
    assert_eq!(header[1], "CN.wall_time_s");
    let longest = out.traces.iter().map(|(_, t)| t.rows.len()).max().unwrap();
    assert_eq!(csv.lines().count(), longest + 1);
    assert!(csv.lines().all(|l| l.split(',').count() == header.len()));
}

#[test]
fn comparison_edge_cases() {
    let dir = tempfile::tempdir().unwrap();
    let single = compare_algorithms(&[quartic(Algorithm::Cn)], dir.path()).unwrap();
    assert_eq!(single.traces.len(), 1);
    assert_eq!(single.exit_code(), 0);

    let mut other = quartic(Algorithm::Gdn);
    other.problem.name = "cubic_example".into();
    let err = compare_algorithms(&[quartic(Algorithm::Cn), other], dir.path()).unwrap_err();
    assert!(matches!(&err, crate::Error::Config { path, .. } if path == "configs[1].problem"), "{err}");
    let mut other = quartic(Algorithm::Gdn);
    other.init.x0 = Some(vec![0.0, 0.0]);
    assert!(compare_algorithms(&[quartic(Algorithm::Cn), other], dir.path()).is_err());
    assert!(compare_algorithms(&[], dir.path()).is_err());

    let sim = quartic(Algorithm::Gdn);
    let mut alt = quartic(Algorithm::Gdn);
    alt.solver.mode = Some(crate::Mode::Simultaneous);
    let out = compare_algorithms(&[sim, alt], dir.path()).unwrap();
    assert_eq!(out.traces[0].0, "GDN_alternating_1");
    assert_eq!(out.traces[1].0, "GDN_simultaneous_2");
}
