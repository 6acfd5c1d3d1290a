use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use minimax_core::analysis::{add_jacobian_radii, classify_point, theoretical_rates, DEFAULT_EIG_TOL, DEFAULT_GRAD_TOL, FD_STEP};
use minimax_core::harness::{compare_algorithms, parse_config, run_experiment, ExperimentConfig, OUT_DIR_ENV};
use minimax_core::oracle::{check_derivatives, sample_points};
use minimax_core::problems::make_problem;
use minimax_core::{Algorithm, Error, MinimaxOracle, Point, SolverSpec};

/// Exit status for configuration, I/O and analysis errors.
const EXIT_ERROR: u8 = 3;

#[derive(Parser)]
#[command(name = "minimax", version, about = "Local minimax solvers, experiments and rate analysis")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment and write its trace CSV and JSON report.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, env = OUT_DIR_ENV, default_value = ".")]
        out_dir: PathBuf,
    },
    /// Run several solver configs on the same problem and start.
    Compare {
        #[arg(long, num_args = 1.., required = true)]
        configs: Vec<PathBuf>,
        #[arg(long, env = OUT_DIR_ENV, default_value = ".")]
        out_dir: PathBuf,
    },
    /// Classify a point as stationary, strict local minimax and/or local Nash.
    Classify {
        #[command(flatten)]
        problem: ProblemArgs,
        /// Comma-separated `x` then `y` entries.
        #[arg(long, allow_hyphen_values = true)]
        point: String,
        #[arg(long, default_value_t = DEFAULT_GRAD_TOL)]
        grad_tol: f64,
        #[arg(long, default_value_t = DEFAULT_EIG_TOL)]
        eig_tol: f64,
    },
    /// Theoretical rates at the known solution plus FD Jacobian radii.
    Rates {
        #[command(flatten)]
        problem: ProblemArgs,
        #[arg(long = "alpha-l")]
        alpha_l: f64,
        #[arg(long = "alpha-f")]
        alpha_f: f64,
        /// Evaluate here instead of at the known solution.
        #[arg(long, allow_hyphen_values = true)]
        point: Option<String>,
        /// Algorithms whose Jacobian radius to report.
        #[arg(long, value_delimiter = ',', default_value = "GDA,TGDA,FR,GDN,CN")]
        algorithms: Vec<Algorithm>,
    },
    /// Compare analytic derivatives with central differences.
    CheckDerivatives {
        #[command(flatten)]
        problem: ProblemArgs,
        #[arg(long, default_value_t = 5)]
        points: usize,
        #[arg(long, default_value_t = 1e-5)]
        h: f64,
        /// Fail when any block's relative error exceeds this.
        #[arg(long, default_value_t = 1e-5)]
        tol: f64,
    },
}

#[derive(Args)]
struct ProblemArgs {
    #[arg(long)]
    problem: String,
    /// Problem parameter as `key=value`; the value is read as TOML.
    #[arg(long = "param", value_name = "KEY=VALUE")]
    params: Vec<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

impl ProblemArgs {
    fn build(&self) -> Result<Box<dyn MinimaxOracle>, Error> {
        let mut table = toml::Table::new();
        for p in &self.params {
            let (key, raw) = p.split_once('=').ok_or_else(|| Error::config("--param", format!("expected key=value, got `{p}`")))?;
            let value = format!("v = {raw}")
                .parse::<toml::Table>()
                .ok()
                .and_then(|mut t| t.remove("v"))
                .unwrap_or_else(|| toml::Value::String(raw.trim().to_string()));
            table.insert(key.trim().to_string(), value);
        }
        make_problem(&self.problem, &table, self.seed)
    }
}

fn parse_point(text: &str, oracle: &dyn MinimaxOracle) -> Result<Point, Error> {
    let (n, m) = oracle.dims();
    let values = text
        .split(',')
        .map(|s| s.trim().parse::<f64>().map_err(|e| Error::config("--point", format!("`{s}`: {e}"))))
        .collect::<Result<Vec<_>, _>>()?;
    if values.len() != n + m {
        return Err(Error::config("--point", format!("expected {} entries ({n} x, {m} y), found {}", n + m, values.len())));
    }
    Ok(Point::from_flat(&values, n))
}

fn load(path: &Path) -> Result<ExperimentConfig, Error> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::Io { path: path.display().to_string(), source })?;
    parse_config(&text)
}

fn print_json<T: serde::Serialize>(value: &T) {
    let text = serde_json::to_string_pretty(value).expect("serializable");
    // A closed pipe (e.g. `| head`) is not an error worth reporting.
    let _ = writeln!(std::io::stdout().lock(), "{text}");
}

fn execute(cli: Cli) -> Result<u8, Error> {
    match cli.command {
        Command::Run { config, out_dir } => {
            let outcome = run_experiment(&load(&config)?, &out_dir)?;
            eprintln!(
                "{}: {} after {} iterations -> {}",
                outcome.report.algorithm,
                outcome.trace.termination.as_str(),
                outcome.trace.iterations(),
                outcome.trace_path.display()
            );
            print_json(&outcome.report);
            Ok(outcome.exit_code() as u8)
        }
        Command::Compare { configs, out_dir } => {
            let configs = configs.iter().map(|p| load(p)).collect::<Result<Vec<_>, _>>()?;
            let outcome = compare_algorithms(&configs, &out_dir)?;
            for run in &outcome.summary.runs {
                eprintln!("{}: {} after {} iterations", run.label, run.termination.as_str(), run.iterations);
            }
            eprintln!("-> {}", outcome.csv_path.display());
            print_json(&outcome.summary);
            Ok(outcome.exit_code() as u8)
        }
        Command::Classify { problem, point, grad_tol, eig_tol } => {
            let oracle = problem.build()?;
            let z = parse_point(&point, oracle.as_ref())?;
            print_json(&classify_point(oracle.as_ref(), &z, grad_tol, eig_tol)?);
            Ok(0)
        }
        Command::Rates { problem, alpha_l, alpha_f, point, algorithms } => {
            let oracle = problem.build()?;
            let z = match point {
                Some(p) => parse_point(&p, oracle.as_ref())?,
                None => oracle
                    .known_solution()
                    .ok_or_else(|| Error::config("--point", format!("{} has no known solution; pass --point", oracle.name())))?,
            };
            let mut report = theoretical_rates(oracle.as_ref(), &z, alpha_l, alpha_f)?;
            let specs: Vec<SolverSpec> = algorithms.iter().map(|&a| SolverSpec::new(a).with_steps(alpha_l, alpha_f)).collect();
            add_jacobian_radii(&mut report, oracle.as_ref(), &z, &specs, FD_STEP)?;
            print_json(&report);
            Ok(0)
        }
        Command::CheckDerivatives { problem, points, h, tol } => {
            let oracle = problem.build()?;
            let reports: Vec<_> = sample_points(oracle.as_ref(), problem.seed, points, 0.5)
                .into_iter()
                .map(|z| {
                    let r = check_derivatives(oracle.as_ref(), &z, h, problem.seed);
                    serde_json::json!({ "point": z, "max": r.max(), "blocks": r })
                })
                .collect();
            let worst = reports.iter().map(|r| r["max"].as_f64().unwrap_or(f64::INFINITY)).fold(0.0, f64::max);
            print_json(&serde_json::json!({ "problem": oracle.name(), "h": h, "max_relative_error": worst, "points": reports }));
            Ok(if worst < tol { 0 } else { 1 })
        }
    }
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(EXIT_ERROR)
        }
    }
}
