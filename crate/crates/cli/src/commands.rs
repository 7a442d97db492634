//! Scenario execution, sweeps and the small numerical utilities.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use fracdiff_core::comparison_harness::{
    barrier_certificate, barrier_suite, c_monotonicity_suite, check_c_monotonicity, check_comparison,
    check_example_bound, check_positivity, check_sigma_monotonicity, comparison_suite, explore_sigma_monotonicity,
    extremum_suite, positivity_suite, sigma_monotonicity_suite, BarrierParams, SuiteConfig,
};
use fracdiff_core::fractional_calculus::{caputo_l1, rl_integral};
use fracdiff_core::mittag_leffler::ml;
use fracdiff_core::{sha256_hex, CheckReport, Field, MLParams, ProblemSpec, SolverChoice, TimeGrid, TimeSignal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::csv_io;
use crate::error::{CliError, Result};
use crate::scenario::{self, CheckSpec, Scenario, SuiteKind};

/// Tolerance of the extremum probe when none is given.
pub const EXTREMUM_TOLERANCE: f64 = 1e-6;

/// Where [`execute`] writes.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Outputs {
    /// Field file such as `out/u.csv`. With several solvers each gets
    /// `u_<solver>.csv`; a `u.json` sidecar describes the solves.
    pub fields: Option<PathBuf>,
    /// `report.json`, written when the scenario has checks.
    pub report: Option<PathBuf>,
}

impl Outputs {
    /// Fields and report in one directory, as `run` writes them.
    pub fn in_dir(dir: &Path, fields: bool) -> Self {
        Self { fields: fields.then(|| dir.join("u.csv")), report: Some(dir.join("report.json")) }
    }
}

/// Check families selectable on the command line.
#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum CheckKind {
    Positivity,
    Comparison,
    CMono,
    SigmaMono,
    ExampleBound,
    Barrier,
    Extremum,
}

impl CheckKind {
    fn matches(self, check: &CheckSpec) -> bool {
        match (self, check) {
            (CheckKind::Positivity, CheckSpec::Positivity { .. })
            | (CheckKind::Comparison, CheckSpec::Comparison { .. })
            | (CheckKind::CMono, CheckSpec::CMonotonicity { .. })
            | (CheckKind::SigmaMono, CheckSpec::SigmaMonotonicity { .. })
            | (CheckKind::ExampleBound, CheckSpec::ExampleBound { .. })
            | (CheckKind::Barrier, CheckSpec::Barrier { .. }) => true,
            (kind, CheckSpec::Suite { suite, .. }) => {
                matches!(
                    (kind, suite),
                    (CheckKind::Positivity, SuiteKind::Positivity)
                        | (CheckKind::Comparison, SuiteKind::Comparison)
                        | (CheckKind::CMono, SuiteKind::CMonotonicity)
                        | (CheckKind::SigmaMono, SuiteKind::SigmaMonotonicity)
                        | (CheckKind::Barrier, SuiteKind::Barrier)
                        | (CheckKind::Extremum, SuiteKind::Extremum)
                )
            }
            _ => false,
        }
    }
}

/// The scenario's checks of one family. Positivity, barrier and extremum
/// fall back to default settings when none is declared; the others need
/// parameters from the scenario.
pub fn select_checks(checks: &[CheckSpec], kind: CheckKind) -> Result<Vec<CheckSpec>> {
    let picked: Vec<CheckSpec> = checks.iter().filter(|c| kind.matches(c)).cloned().collect();
    if !picked.is_empty() {
        return Ok(picked);
    }
    let fallback = match kind {
        CheckKind::Positivity => CheckSpec::Positivity { tolerance: None },
        CheckKind::Barrier => CheckSpec::Barrier { epsilon: 1e-3, tolerance: None },
        CheckKind::Extremum => CheckSpec::Suite {
            suite: SuiteKind::Extremum,
            count: 100,
            nodes: 41,
            steps: 256,
            fixed_alpha: false,
            epsilon: 1e-3,
            tolerance: None,
        },
        other => {
            let name = clap::ValueEnum::to_possible_value(&other).map(|v| v.get_name().to_string()).unwrap_or_default();
            return Err(CliError::config("checks", &format!("the scenario declares no {name} check")));
        }
    };
    Ok(vec![fallback])
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub scenario: String,
    pub seed: u64,
    pub problem_fingerprint: String,
    pub pass: bool,
    pub solves: Vec<SolveEntry>,
    pub checks: Vec<CheckEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveEntry {
    pub solver: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub file: Option<String>,
    pub fingerprint: String,
    /// Picard stopping tolerance; absent for time stepping.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub picard_tol: Option<f64>,
    /// Default tolerance of the checks run on this field.
    pub class_tolerance: f64,
    /// Sup-norm change of every Picard sweep; empty for time stepping.
    pub iteration_report: Vec<f64>,
    pub warnings: Vec<String>,
}

/// Contents of the `u.json` sidecar.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SolveSidecar {
    pub scenario: String,
    pub problem_fingerprint: String,
    pub solves: Vec<SolveEntry>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckEntry {
    /// Absent for checks that do not solve.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub solver: Option<String>,
    #[serde(flatten)]
    pub report: CheckReport,
}

impl Report {
    /// Checks outside their hypotheses are diagnostics and never fail a run.
    fn settle(&mut self) {
        self.pass = self.checks.iter().filter(|c| c.report.in_hypothesis).all(|c| c.report.pass);
    }

    /// Smallest margin over every check, `+∞` without checks.
    pub fn worst_violation(&self) -> f64 {
        self.checks.iter().map(|c| c.report.worst_violation).fold(f64::INFINITY, |a, b| {
            if b.is_nan() || b < a {
                b
            } else {
                a
            }
        })
    }

    pub fn in_hypothesis(&self) -> bool {
        self.checks.iter().all(|c| c.report.in_hypothesis)
    }
}

/// Solver names, suffixed with their position when one kind appears twice.
fn solver_labels(sc: &Scenario) -> Vec<String> {
    sc.solvers
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let repeated = sc.solvers.iter().filter(|o| o.label() == s.label()).count() > 1;
            if repeated {
                format!("{}_{i}", s.label())
            } else {
                s.label().to_string()
            }
        })
        .collect()
}

/// `u.csv` for a single solver, `u_<label>.csv` otherwise.
fn field_path(template: &Path, label: &str, several: bool) -> PathBuf {
    if !several {
        return template.to_path_buf();
    }
    let stem = template.file_stem().and_then(|s| s.to_str()).unwrap_or("u");
    let name = match template.extension().and_then(|e| e.to_str()) {
        Some(ext) => format!("{stem}_{label}.{ext}"),
        None => format!("{stem}_{label}"),
    };
    template.with_file_name(name)
}

fn ensure_parent(path: &Path) -> Result<()> {
    match path.parent() {
        Some(dir) if !dir.as_os_str().is_empty() => fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e)),
        _ => Ok(()),
    }
}

/// Solves with every solver of the scenario, then runs its checks in
/// declared order.
pub fn execute(sc: &Scenario, outputs: &Outputs) -> Result<Report> {
    let p = sc.problem()?;
    let labels = solver_labels(sc);
    let mut fields = Vec::with_capacity(sc.solvers.len());
    let mut solves = Vec::with_capacity(sc.solvers.len());
    for (spec, label) in sc.solvers.iter().zip(&labels) {
        let choice = spec.choice();
        let u = choice.solve(&p)?;
        let file = match &outputs.fields {
            Some(template) => {
                let path = field_path(template, label, sc.solvers.len() > 1);
                ensure_parent(&path)?;
                csv_io::write_field(&path, &u)?;
                path.file_name().map(|n| n.to_string_lossy().into_owned())
            }
            None => None,
        };
        solves.push(SolveEntry {
            solver: label.clone(),
            file,
            fingerprint: u.fingerprint(),
            picard_tol: match choice {
                SolverChoice::Spectral { tol, .. } => Some(tol),
                SolverChoice::L1 => None,
            },
            class_tolerance: choice.class_tolerance(),
            iteration_report: u.iteration_report.clone(),
            warnings: u.warnings.clone(),
        });
        fields.push(u);
    }
    if let Some(template) = &outputs.fields {
        let sidecar =
            SolveSidecar { scenario: sc.name.clone(), problem_fingerprint: p.fingerprint(), solves: solves.clone() };
        write_json(&template.with_extension("json"), &sidecar)?;
    }
    let mut report = Report {
        scenario: sc.name.clone(),
        seed: sc.seed,
        problem_fingerprint: p.fingerprint(),
        pass: true,
        solves,
        checks: Vec::new(),
    };
    if sc.checks.is_empty() {
        return Ok(report);
    }
    for (i, check) in sc.checks.iter().enumerate() {
        let entries = run_check(sc, &p, &fields, &labels, check).map_err(|e| match e {
            CliError::Core(inner) => CliError::config(&format!("checks[{i}]"), &inner.to_string()),
            other => other,
        })?;
        report.checks.extend(entries);
    }
    report.settle();
    if let Some(path) = &outputs.report {
        ensure_parent(path)?;
        write_json(path, &report)?;
    }
    Ok(report)
}

fn run_check(
    sc: &Scenario,
    p: &ProblemSpec,
    fields: &[Field],
    labels: &[String],
    check: &CheckSpec,
) -> Result<Vec<CheckEntry>> {
    if let CheckSpec::Suite { suite: SuiteKind::Extremum, count, steps, tolerance, .. } = *check {
        let tol = tolerance.unwrap_or(EXTREMUM_TOLERANCE);
        let parts = extremum_suite(sc.seed, count, steps, tol)?;
        let fp = sha256_hex(&format!("extremum {} {count} {steps}", sc.seed));
        return Ok(vec![CheckEntry { solver: None, report: CheckReport::combine("extremum_suite", parts, tol, fp) }]);
    }
    // Shared inputs are resolved once, before any solver runs.
    let grid = &p.grid;
    let comparison = match check {
        CheckSpec::Comparison { initial, source, .. } => {
            let q = sc.problem_with(initial.as_ref().unwrap_or(&sc.initial), source.as_ref().unwrap_or(&sc.source))?;
            let ordered = data_ordered(&q, p);
            Some((q, ordered))
        }
        _ => None,
    };
    let barrier = match check {
        CheckSpec::Barrier { epsilon, .. } => Some(BarrierParams::auto(p, *epsilon)?),
        _ => None,
    };
    let mut entries = Vec::new();
    for ((spec, label), u) in sc.solvers.iter().zip(labels).zip(fields) {
        let solver = spec.choice();
        let class = solver.class_tolerance();
        let report = match check {
            CheckSpec::Positivity { tolerance } => check_positivity(u, tolerance.unwrap_or(class)),
            CheckSpec::ExampleBound { delta, beta, tolerance } => {
                check_example_bound(p, *delta, *beta, &solver, tolerance.unwrap_or(class))?
            }
            CheckSpec::Comparison { tolerance, .. } => {
                let (q, ordered) = comparison.as_ref().expect("resolved above");
                let upper = solver.solve(q)?;
                let mut r = check_comparison(&upper, u, tolerance.unwrap_or(class))?;
                r.fingerprint = sha256_hex(&format!("{}{}", q.fingerprint(), p.fingerprint()));
                r.in_hypothesis = *ordered;
                r
            }
            CheckSpec::CMonotonicity { upper, tolerance } => {
                let c1 = sc.resolve(upper, grid, "upper")?;
                check_c_monotonicity(p, &c1, &p.coeffs.reaction, &solver, tolerance.unwrap_or(class))?
            }
            CheckSpec::SigmaMonotonicity { lower, upper, sigma0, explore, tolerance } => {
                let s1 = sc.resolve(lower, grid, "lower")?;
                let s2 = sc.resolve(upper, grid, "upper")?;
                let tol = tolerance.unwrap_or(class);
                if *explore {
                    explore_sigma_monotonicity(p, &s1, &s2, *sigma0, &solver, tol)?
                } else {
                    check_sigma_monotonicity(p, &s1, &s2, *sigma0, &solver, tol)?
                }
            }
            CheckSpec::Barrier { tolerance, .. } => {
                barrier_certificate(u, p, barrier.as_ref().expect("resolved above"), tolerance.unwrap_or(class))?
            }
            CheckSpec::Suite { suite, count, nodes, steps, fixed_alpha, epsilon, tolerance } => {
                let cfg = SuiteConfig {
                    seed: sc.seed,
                    count: *count,
                    nodes: *nodes,
                    steps: *steps,
                    t_final: sc.time.t_final,
                    alpha: fixed_alpha.then_some(sc.alpha),
                };
                let tol = tolerance.unwrap_or(class);
                let parts = match suite {
                    SuiteKind::Positivity => positivity_suite(&cfg, &solver, tol)?,
                    SuiteKind::Comparison => comparison_suite(&cfg, &solver, tol)?,
                    SuiteKind::CMonotonicity => c_monotonicity_suite(&cfg, &solver, tol)?,
                    SuiteKind::SigmaMonotonicity => sigma_monotonicity_suite(&cfg, &solver, tol)?,
                    SuiteKind::Barrier => barrier_suite(&cfg, &solver, *epsilon, tol)?,
                    SuiteKind::Extremum => unreachable!("handled above"),
                };
                let name =
                    format!("{}_suite", serde_json::to_value(suite).unwrap_or_default().as_str().unwrap_or("suite"));
                let fp = sha256_hex(&format!("{cfg:?}{solver:?}"));
                CheckReport::combine(&name, parts, tol, fp)
            }
        };
        entries.push(CheckEntry { solver: Some(label.clone()), report });
    }
    Ok(entries)
}

/// Whether `a₂ ≥ a₁` and `F₂ ≥ F₁` hold everywhere. Reports without this
/// ordering are labelled out of hypothesis rather than rejected.
fn data_ordered(upper: &ProblemSpec, lower: &ProblemSpec) -> bool {
    upper.a.iter().zip(&lower.a).all(|(u, l)| u >= l) && upper.source.iter().zip(&lower.source).all(|(u, l)| u >= l)
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| CliError::Csv(e.to_string()))?;
    text.push('\n');
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub value: Value,
    pub dir: String,
    pub report: Report,
}

/// Runs `path` once per value of the dotted parameter `param`, each into
/// `out/<param>=<value>/`, then writes `sweep.json` and `sweep.csv`.
/// Values are parsed as JSON; points run in parallel and are reported in
/// the order given.
pub fn sweep(path: &Path, param: &str, values: &[String], out: &Path) -> Result<Vec<SweepPoint>> {
    let base = scenario::read_value(path)?;
    scenario::set_path(&mut base.clone(), param, Value::Null)?;
    if values.is_empty() {
        return Ok(Vec::new());
    }
    let parsed = values
        .iter()
        .map(|v| {
            serde_json::from_str::<Value>(v).map_err(|_| CliError::config(param, &format!("'{v}' is not a JSON value")))
        })
        .collect::<Result<Vec<_>>>()?;
    let points = values
        .par_iter()
        .zip(parsed.par_iter())
        .map(|(raw, value)| {
            let mut tree = base.clone();
            scenario::set_path(&mut tree, param, value.clone())?;
            let sc = scenario::from_value(tree, path)?;
            let dir = format!("{param}={}", raw.replace(['/', '\\'], "_"));
            let report = execute(&sc, &Outputs::in_dir(&out.join(&dir), sc.output.fields))?;
            Ok(SweepPoint { value: value.clone(), dir, report })
        })
        .collect::<Result<Vec<_>>>()?;
    fs::create_dir_all(out).map_err(|e| CliError::io(out, e))?;
    write_json(&out.join("sweep.json"), &points)?;
    let csv_path = out.join("sweep.csv");
    let mut text = String::from("value,worst_violation,pass,in_hypothesis\n");
    for (raw, pt) in values.iter().zip(&points) {
        text.push_str(&format!(
            "{raw},{:?},{},{}\n",
            pt.report.worst_violation(),
            pt.report.pass,
            pt.report.in_hypothesis()
        ));
    }
    fs::write(&csv_path, text).map_err(|e| CliError::io(&csv_path, e))?;
    Ok(points)
}

/// `E_{α,β}(z)` at every `z`.
pub fn ml_values(alpha: f64, beta: f64, zs: &[f64]) -> Result<Vec<f64>> {
    let params = MLParams::new(alpha, beta)?;
    Ok(zs.iter().map(|&z| ml(params, z)).collect::<fracdiff_core::Result<_>>()?)
}

/// One value per line in shortest round-trip form.
pub fn write_values<W: Write>(mut w: W, values: &[f64]) -> Result<()> {
    let stdout = || Path::new("<stdout>");
    for v in values {
        writeln!(w, "{v:?}").map_err(|e| CliError::io(stdout(), e))?;
    }
    w.flush().map_err(|e| CliError::io(stdout(), e))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum FracOp {
    /// Riemann–Liouville integral `J^α`, defined at every node.
    #[value(alias = "rl")]
    Jint,
    /// Caputo derivative by the L1 rule, defined from the first step on.
    Caputo,
}

/// Applies `op` of the given order to a `t,value` table with increasing
/// times starting at 0. Returns `(t, value)` rows.
pub fn frac_op(op: FracOp, order: f64, rows: &[Vec<f64>]) -> Result<Vec<Vec<f64>>> {
    if let Some(i) = rows.iter().position(|r| r.len() != 2) {
        return Err(CliError::Csv(format!("row {} must have the two columns t,value", i + 2)));
    }
    let grid = TimeGrid::from_nodes(rows.iter().map(|r| r[0]).collect())?;
    let signal = TimeSignal::new(grid.clone(), rows.iter().map(|r| r[1]).collect())?;
    let out = match op {
        FracOp::Jint => {
            let y = rl_integral(&signal, order)?;
            grid.nodes().iter().zip(y.values()).map(|(&t, &v)| vec![t, v]).collect()
        }
        FracOp::Caputo => {
            let d = caputo_l1(&signal, order)?;
            grid.nodes()[1..].iter().zip(d.interior()).map(|(&t, &v)| vec![t, v]).collect()
        }
    };
    Ok(out)
}

/// Output directory: the command-line override, else the scenario's.
pub fn output_dir(sc: &Scenario, over: Option<&Path>) -> PathBuf {
    over.map(Path::to_path_buf).unwrap_or_else(|| sc.output.dir.clone())
}
