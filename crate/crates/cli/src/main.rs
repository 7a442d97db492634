use std::fs::File;
use std::io::{self, BufWriter};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use fracdiff_cli::commands::{self, output_dir, write_values};
use fracdiff_cli::scenario::SolverSpec;
use fracdiff_cli::{csv_io, select_checks, CheckKind, CliError, FracOp, Outputs, Report, Result, Scenario};

#[derive(Parser)]
#[command(name = "fracdiff", version, about = "Time-fractional diffusion solvers and comparison checks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve, write fields, run every check and write report.json
    Run {
        #[command(flatten)]
        config: ConfigArg,
        /// Output directory; overrides output.dir
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Solve and write the field CSV with a JSON sidecar
    Solve {
        #[command(flatten)]
        config: ConfigArg,
        /// Replaces the scenario's solver list
        #[arg(long, value_enum)]
        solver: Option<SolverArg>,
        /// Field file; defaults to <output.dir>/u.csv
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the scenario's checks, or those of one family
    Check {
        #[arg(value_enum)]
        kind: Option<CheckKind>,
        #[command(flatten)]
        config: ConfigArg,
        #[arg(long, value_enum)]
        solver: Option<SolverArg>,
        /// Report file; defaults to <output.dir>/report.json
        #[arg(long)]
        report: Option<PathBuf>,
    },
    /// Run a scenario once per value of one parameter
    Sweep {
        #[command(flatten)]
        config: ConfigArg,
        /// Dotted path into the scenario, e.g. `alpha` or `checks.0.sigma0`
        #[arg(long)]
        param: String,
        /// Comma-separated JSON values
        #[arg(long, value_delimiter = ',', num_args = 0.., allow_hyphen_values = true)]
        values: Vec<String>,
        /// Output directory; overrides output.dir
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print E_{α,β}(z), one value per line
    Ml {
        #[arg(long)]
        alpha: f64,
        #[arg(long, default_value_t = 1.0)]
        beta: f64,
        #[arg(long, required = true, num_args = 1.., value_delimiter = ',', allow_negative_numbers = true)]
        z: Vec<f64>,
    },
    /// Apply J^α or the L1 Caputo derivative to a `t,value` CSV table
    FracOp {
        #[arg(long, value_enum)]
        op: FracOp,
        #[arg(long, visible_alias = "order")]
        alpha: f64,
        #[arg(long)]
        input: PathBuf,
        /// Defaults to standard output
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

/// Scenario file, given as `--config FILE` or positionally.
#[derive(Args)]
struct ConfigArg {
    #[arg(long = "config", value_name = "FILE")]
    config: Option<PathBuf>,
    #[arg(value_name = "SCENARIO", required_unless_present = "config", conflicts_with = "config")]
    scenario: Option<PathBuf>,
}

impl ConfigArg {
    fn path(&self) -> &Path {
        self.config.as_deref().or(self.scenario.as_deref()).expect("clap requires one of the two")
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum SolverArg {
    Spectral,
    L1,
    Both,
}

/// Replaces the solver list, keeping the scenario's spectral settings.
fn override_solvers(sc: &mut Scenario, arg: Option<SolverArg>) {
    let Some(arg) = arg else { return };
    let spectral = sc
        .solvers
        .iter()
        .copied()
        .find(|s| matches!(s, SolverSpec::Spectral { .. }))
        .unwrap_or(SolverSpec::Spectral { m_modes: None, tol: 1e-12, max_sweeps: 1000 });
    sc.solvers = match arg {
        SolverArg::Spectral => vec![spectral],
        SolverArg::L1 => vec![SolverSpec::L1],
        SolverArg::Both => vec![spectral, SolverSpec::L1],
    };
}

fn summarize(report: &Report) {
    for s in &report.solves {
        let sweeps = match s.iteration_report.len() {
            0 => String::new(),
            k => format!(", {k} sweeps"),
        };
        println!("solved {}{sweeps}{}", s.solver, s.file.as_ref().map(|f| format!(" -> {f}")).unwrap_or_default());
        for w in &s.warnings {
            println!("  warning: {w}");
        }
    }
    for c in &report.checks {
        let r = &c.report;
        let status = match (r.in_hypothesis, r.pass) {
            (false, _) => "INFO",
            (true, true) => "PASS",
            (true, false) => "FAIL",
        };
        let solver = c.solver.as_deref().map(|s| format!(" [{s}]")).unwrap_or_default();
        println!(
            "{status} {}{solver} worst {:.3e} at (ix {}, it {}) tol {:.0e}",
            r.check_name, r.worst_violation, r.witness.ix, r.witness.it, r.tolerance
        );
    }
}

fn run(cli: Cli) -> Result<bool> {
    match cli.command {
        Command::Run { config, out } => {
            let sc = fracdiff_cli::load(config.path())?;
            let dir = output_dir(&sc, out.as_deref());
            let report = fracdiff_cli::execute(&sc, &Outputs::in_dir(&dir, sc.output.fields))?;
            summarize(&report);
            Ok(report.pass)
        }
        Command::Solve { config, solver, out } => {
            let mut sc = fracdiff_cli::load(config.path())?;
            override_solvers(&mut sc, solver);
            sc.checks.clear();
            let file = out.unwrap_or_else(|| sc.output.dir.join("u.csv"));
            let report = fracdiff_cli::execute(&sc, &Outputs { fields: Some(file), report: None })?;
            summarize(&report);
            Ok(true)
        }
        Command::Check { kind, config, solver, report } => {
            let mut sc = fracdiff_cli::load(config.path())?;
            override_solvers(&mut sc, solver);
            if let Some(kind) = kind {
                sc.checks = select_checks(&sc.checks, kind)?;
            }
            let path = report.unwrap_or_else(|| sc.output.dir.join("report.json"));
            let report = fracdiff_cli::execute(&sc, &Outputs { fields: None, report: Some(path) })?;
            summarize(&report);
            Ok(report.pass)
        }
        Command::Sweep { config, param, values, out } => {
            let sc = fracdiff_cli::load(config.path())?;
            let dir = output_dir(&sc, out.as_deref());
            let values: Vec<String> = values.into_iter().filter(|v| !v.trim().is_empty()).collect();
            let points = commands::sweep(config.path(), &param, &values, &dir)?;
            for pt in &points {
                let status = if pt.report.pass { "PASS" } else { "FAIL" };
                println!("{status} {} worst {:.3e}", pt.dir, pt.report.worst_violation());
            }
            Ok(points.iter().all(|p| p.report.pass))
        }
        Command::Ml { alpha, beta, z } => {
            let values = commands::ml_values(alpha, beta, &z)?;
            write_values(io::stdout().lock(), &values)?;
            Ok(true)
        }
        Command::FracOp { op, alpha, input, output } => {
            let (_, rows) = csv_io::read_table(&input)?;
            let result = commands::frac_op(op, alpha, &rows)?;
            let written = match &output {
                Some(path) => {
                    let file = File::create(path).map_err(|e| CliError::io(path, e))?;
                    csv_io::write_rows(BufWriter::new(file), &["t", "value"], result)
                }
                None => csv_io::write_rows(io::stdout().lock(), &["t", "value"], result),
            };
            written.map_err(|e| CliError::io(output.as_deref().unwrap_or(Path::new("<stdout>")), e))?;
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match fracdiff_cli::init_threads().and_then(|()| run(cli)) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(2),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
