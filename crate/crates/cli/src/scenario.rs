//! Declarative scenario files.
//!
//! A scenario names its coefficient functions once under `functions` and
//! refers to them by name elsewhere. Any place that takes a function also
//! accepts a number (a constant), an inline profile object or
//! `{"csv": "path"}` with one `x,value` row per space node.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};

use fracdiff_core::comparison_harness::SolverChoice;
use fracdiff_core::{CoefficientSet, ProblemSpec, Profile, SpaceGrid, TimeGrid};
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{CliError, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Scenario {
    pub name: String,
    /// Seed of every randomized suite in `checks`.
    #[serde(default)]
    pub seed: u64,
    pub alpha: f64,
    pub space: SpaceSpec,
    pub time: TimeSpec,
    #[serde(default)]
    pub functions: BTreeMap<String, ProfileRef>,
    #[serde(default)]
    pub coefficients: CoefficientSpec,
    #[serde(default = "zero")]
    pub initial: ProfileRef,
    #[serde(default = "zero")]
    pub source: ProfileRef,
    #[serde(default = "default_solvers")]
    pub solvers: Vec<SolverSpec>,
    #[serde(default)]
    pub checks: Vec<CheckSpec>,
    #[serde(default)]
    pub output: OutputSpec,
    /// Directory that relative CSV paths are resolved against.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

fn zero() -> ProfileRef {
    ProfileRef::Number(0.0)
}

fn one() -> ProfileRef {
    ProfileRef::Number(1.0)
}

fn default_solvers() -> Vec<SolverSpec> {
    vec![SolverSpec::Spectral { m_modes: None, tol: default_tol(), max_sweeps: default_sweeps() }]
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpaceSpec {
    pub length: f64,
    pub nodes: usize,
    /// Second axis; the grid is 2D when both are given.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub width: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub nodes_y: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GridKind {
    #[default]
    Graded,
    Uniform,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeSpec {
    #[serde(default = "unit")]
    pub t_final: f64,
    pub steps: usize,
    #[serde(default)]
    pub grid: GridKind,
    /// Grading exponent; `(2 − α)/α` when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<f64>,
}

fn unit() -> f64 {
    1.0
}

/// A coefficient function: a constant, the name of an entry of
/// `functions`, a CSV table or an inline profile.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ProfileRef {
    Number(f64),
    Name(String),
    Csv(CsvTable),
    Inline(Profile),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CsvTable {
    pub csv: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoefficientSpec {
    #[serde(default = "one")]
    pub conductivity: ProfileRef,
    /// One profile per axis; zero drift when empty.
    #[serde(default)]
    pub drift: Vec<ProfileRef>,
    #[serde(default = "zero")]
    pub reaction: ProfileRef,
    #[serde(default)]
    pub c0: f64,
    #[serde(default = "one")]
    pub b0: ProfileRef,
    #[serde(default = "zero")]
    pub sigma: ProfileRef,
}

impl Default for CoefficientSpec {
    fn default() -> Self {
        Self { conductivity: one(), drift: Vec::new(), reaction: zero(), c0: 0.0, b0: one(), sigma: zero() }
    }
}

fn default_tol() -> f64 {
    1e-12
}

fn default_sweeps() -> usize {
    1000
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SolverSpec {
    /// All modes when `m_modes` is absent.
    Spectral {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        m_modes: Option<usize>,
        #[serde(default = "default_tol")]
        tol: f64,
        #[serde(default = "default_sweeps")]
        max_sweeps: usize,
    },
    L1,
}

impl SolverSpec {
    pub fn label(&self) -> &'static str {
        match self {
            SolverSpec::Spectral { .. } => "spectral",
            SolverSpec::L1 => "l1",
        }
    }

    pub fn choice(&self) -> SolverChoice {
        match *self {
            SolverSpec::Spectral { m_modes, tol, max_sweeps } => {
                SolverChoice::Spectral { m_modes: m_modes.unwrap_or(usize::MAX), tol, max_sweeps }
            }
            SolverSpec::L1 => SolverChoice::L1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SuiteKind {
    Positivity,
    Comparison,
    CMonotonicity,
    SigmaMonotonicity,
    Barrier,
    Extremum,
}

fn default_nodes() -> usize {
    41
}

fn default_steps() -> usize {
    64
}

fn default_epsilon() -> f64 {
    1e-3
}

/// One entry of `checks`. `tolerance` defaults to the class tolerance of
/// the solver the check runs with.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CheckSpec {
    Positivity {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        tolerance: Option<f64>,
    },
    /// Lower bound `δΓ(β+1)/Γ(α+β+1)·t^{α+β}`.
    ExampleBound {
        delta: f64,
        beta: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        tolerance: Option<f64>,
    },
    /// The scenario against the same problem with larger data.
    Comparison {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        initial: Option<ProfileRef>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        source: Option<ProfileRef>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        tolerance: Option<f64>,
    },
    /// The scenario's reaction against the larger reaction `upper`.
    CMonotonicity {
        upper: ProfileRef,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        tolerance: Option<f64>,
    },
    /// `u(lower) ≥ u(upper)` for `upper ≥ lower ≥ sigma0 > 0`. With
    /// `explore` the hypotheses are recorded instead of enforced.
    SigmaMonotonicity {
        lower: ProfileRef,
        upper: ProfileRef,
        sigma0: f64,
        #[serde(default)]
        explore: bool,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        tolerance: Option<f64>,
    },
    /// Barrier certificate with automatically chosen `M`.
    Barrier {
        #[serde(default = "default_epsilon")]
        epsilon: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        tolerance: Option<f64>,
    },
    /// Randomized suite seeded with the scenario seed. With `fixed_alpha`
    /// every instance uses the scenario's `alpha`.
    Suite {
        suite: SuiteKind,
        count: usize,
        #[serde(default = "default_nodes")]
        nodes: usize,
        #[serde(default = "default_steps")]
        steps: usize,
        #[serde(default)]
        fixed_alpha: bool,
        #[serde(default = "default_epsilon")]
        epsilon: f64,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        tolerance: Option<f64>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    /// Output directory, relative to the working directory.
    #[serde(default = "default_dir")]
    pub dir: PathBuf,
    /// Write `u_<solver>.csv` for every solver.
    #[serde(default = "yes")]
    pub fields: bool,
}

impl Default for OutputSpec {
    fn default() -> Self {
        Self { dir: default_dir(), fields: true }
    }
}

fn default_dir() -> PathBuf {
    PathBuf::from("out")
}

fn yes() -> bool {
    true
}

/// Reads a scenario file as a JSON tree, reporting syntax errors with
/// their line and column.
pub fn read_value(path: &Path) -> Result<Value> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| CliError::Parse {
        path: path.to_path_buf(),
        line: e.line(),
        column: e.column(),
        field: String::new(),
        message: e.to_string(),
    })
}

/// Parses and validates a scenario file.
pub fn load(path: &Path) -> Result<Scenario> {
    let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let mut de = serde_json::Deserializer::from_str(&text);
    let mut sc: Scenario = serde_path_to_error::deserialize(&mut de).map_err(|e| {
        let field = e.path().to_string();
        let inner = e.into_inner();
        CliError::Parse {
            path: path.to_path_buf(),
            line: inner.line(),
            column: inner.column(),
            field,
            message: inner.to_string(),
        }
    })?;
    sc.base_dir = base_dir(path);
    sc.validate()?;
    Ok(sc)
}

/// Builds a scenario from a JSON tree read from `path`.
pub fn from_value(value: Value, path: &Path) -> Result<Scenario> {
    let mut sc: Scenario = serde_path_to_error::deserialize(value).map_err(|e| CliError::Parse {
        path: path.to_path_buf(),
        line: 0,
        column: 0,
        field: e.path().to_string(),
        message: e.into_inner().to_string(),
    })?;
    sc.base_dir = base_dir(path);
    sc.validate()?;
    Ok(sc)
}

fn base_dir(path: &Path) -> PathBuf {
    path.parent().map(Path::to_path_buf).unwrap_or_default()
}

impl Scenario {
    pub fn space_grid(&self) -> Result<SpaceGrid> {
        let s = &self.space;
        let grid = match (s.width, s.nodes_y) {
            (None, None) => SpaceGrid::interval(s.length, s.nodes)?,
            (Some(w), Some(ny)) => SpaceGrid::rectangle(s.length, s.nodes, w, ny)?,
            _ => return Err(CliError::config("space", "width and nodes_y must be given together")),
        };
        Ok(grid)
    }

    pub fn time_grid(&self) -> Result<TimeGrid> {
        let t = &self.time;
        let grid = match (t.grid, t.gamma) {
            (GridKind::Uniform, None) => TimeGrid::uniform(t.t_final, t.steps)?,
            (GridKind::Uniform, Some(_)) => return Err(CliError::config("time.gamma", "only graded grids take gamma")),
            (GridKind::Graded, None) => TimeGrid::graded_for(t.t_final, t.steps, self.alpha)?,
            (GridKind::Graded, Some(g)) => TimeGrid::graded(t.t_final, t.steps, g)?,
        };
        Ok(grid)
    }

    /// Turns a reference into a profile on `grid`; `field` names the
    /// scenario entry for diagnostics.
    pub fn resolve(&self, r: &ProfileRef, grid: &SpaceGrid, field: &str) -> Result<Profile> {
        self.resolve_depth(r, grid, field, 0)
    }

    fn resolve_depth(&self, r: &ProfileRef, grid: &SpaceGrid, field: &str, depth: usize) -> Result<Profile> {
        if depth > self.functions.len() {
            return Err(CliError::config(field, "function names refer to each other in a cycle"));
        }
        match r {
            ProfileRef::Number(v) => Ok(Profile::constant(*v)),
            ProfileRef::Inline(p) => Ok(p.clone()),
            ProfileRef::Csv(t) => read_table(&self.base_dir.join(&t.csv), grid, field),
            ProfileRef::Name(name) => match self.functions.get(name) {
                Some(inner) => self.resolve_depth(inner, grid, &format!("functions.{name}"), depth + 1),
                None => Err(CliError::config(field, &format!("unknown function name '{name}'"))),
            },
        }
    }

    pub fn coefficient_set(&self, grid: &SpaceGrid) -> Result<CoefficientSet> {
        let c = &self.coefficients;
        let drift = if c.drift.is_empty() {
            vec![Profile::zero(); grid.dim()]
        } else {
            c.drift
                .iter()
                .enumerate()
                .map(|(i, d)| self.resolve(d, grid, &format!("coefficients.drift[{i}]")))
                .collect::<Result<_>>()?
        };
        Ok(CoefficientSet {
            conductivity: vec![self.resolve(&c.conductivity, grid, "coefficients.conductivity")?; grid.dim()],
            drift,
            reaction: self.resolve(&c.reaction, grid, "coefficients.reaction")?,
            c0: c.c0,
            b0: self.resolve(&c.b0, grid, "coefficients.b0")?,
            sigma: self.resolve(&c.sigma, grid, "coefficients.sigma")?,
        })
    }

    /// The problem with the given initial value and source references.
    pub fn problem_with(&self, initial: &ProfileRef, source: &ProfileRef) -> Result<ProblemSpec> {
        let grid = self.space_grid()?;
        let tgrid = self.time_grid()?;
        let coeffs = self.coefficient_set(&grid)?;
        let a = self.resolve(initial, &grid, "initial")?;
        let f = self.resolve(source, &grid, "source")?;
        let pts = grid.points();
        let a_values = pts.iter().enumerate().map(|(p, &x)| a.eval(p, x, 0.0)).collect();
        let source = tgrid
            .nodes()
            .iter()
            .flat_map(|&t| pts.iter().enumerate().map(move |(p, &x)| (p, x, t)))
            .map(|(p, x, t)| f.eval(p, x, t))
            .collect();
        Ok(ProblemSpec::new(self.alpha, grid, tgrid, coeffs, a_values, source)?)
    }

    pub fn problem(&self) -> Result<ProblemSpec> {
        self.problem_with(&self.initial, &self.source)
    }

    /// Grid and name checks that do not need a solve.
    pub fn validate(&self) -> Result<()> {
        if self.solvers.is_empty() {
            return Err(CliError::config("solvers", "at least one solver is required"));
        }
        let grid = self.space_grid()?;
        self.time_grid()?;
        self.coefficient_set(&grid)?;
        self.resolve(&self.initial, &grid, "initial")?;
        self.resolve(&self.source, &grid, "source")?;
        for (i, check) in self.checks.iter().enumerate() {
            let field = |name: &str| format!("checks[{i}].{name}");
            match check {
                CheckSpec::Comparison { initial, source, .. } => {
                    if let Some(r) = initial {
                        self.resolve(r, &grid, &field("initial"))?;
                    }
                    if let Some(r) = source {
                        self.resolve(r, &grid, &field("source"))?;
                    }
                }
                CheckSpec::CMonotonicity { upper, .. } => {
                    self.resolve(upper, &grid, &field("upper"))?;
                }
                CheckSpec::SigmaMonotonicity { lower, upper, .. } => {
                    self.resolve(lower, &grid, &field("lower"))?;
                    self.resolve(upper, &grid, &field("upper"))?;
                }
                _ => {}
            }
        }
        Ok(())
    }
}

/// Node values from a CSV table with columns `x,value` (or `x,y,value` in
/// 2D), one row per node in grid order.
fn read_table(path: &Path, grid: &SpaceGrid, field: &str) -> Result<Profile> {
    let mut reader =
        csv::Reader::from_path(path).map_err(|e| CliError::config(field, &format!("{}: {e}", path.display())))?;
    let dim = grid.dim();
    let mut values = Vec::with_capacity(grid.len());
    for (row, record) in reader.records().enumerate() {
        let record = record.map_err(|e| CliError::config(field, &format!("{}: {e}", path.display())))?;
        let nums = record
            .iter()
            .map(|s| s.trim().parse::<f64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|e| CliError::config(field, &format!("{} row {}: {e}", path.display(), row + 2)))?;
        if nums.len() != dim + 1 {
            return Err(CliError::config(
                field,
                &format!("{} row {}: need {} columns", path.display(), row + 2, dim + 1),
            ));
        }
        if row < grid.len() {
            let x = grid.point(row);
            let tol = 1e-9 * grid.axes().iter().map(|a| a.h()).fold(1.0, f64::max);
            if (0..dim).any(|d| (nums[d] - x[d]).abs() > tol) {
                return Err(CliError::config(
                    field,
                    &format!("{} row {}: coordinates do not match grid node {row}", path.display(), row + 2),
                ));
            }
        }
        values.push(nums[dim]);
    }
    if values.len() != grid.len() {
        return Err(CliError::config(
            field,
            &format!("{}: {} rows for {} grid nodes", path.display(), values.len(), grid.len()),
        ));
    }
    Ok(Profile::Tabulated { values })
}

/// Replaces the scalar at a dotted path such as `alpha`,
/// `coefficients.c0` or `checks.0.sigma0`.
pub fn set_path(root: &mut Value, path: &str, value: Value) -> Result<()> {
    let unknown = || CliError::config(path, "unknown parameter path");
    let mut node = root;
    for key in path.split('.') {
        node = match node {
            Value::Object(map) => map.get_mut(key).ok_or_else(unknown)?,
            Value::Array(items) => key.parse::<usize>().ok().and_then(|i| items.get_mut(i)).ok_or_else(unknown)?,
            _ => return Err(unknown()),
        };
    }
    if !(node.is_number() || node.is_boolean()) {
        return Err(CliError::config(path, "parameter path does not address a scalar"));
    }
    *node = value;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    fn minimal() -> Value {
        json!({
            "name": "m",
            "alpha": 0.5,
            "space": { "length": 1.0, "nodes": 11 },
            "time": { "steps": 8 },
            "checks": [{ "kind": "barrier", "epsilon": 0.01 }]
        })
    }

    #[test]
    fn defaults_fill_a_minimal_scenario() {
        let sc = from_value(minimal(), Path::new("m.json")).unwrap();
        assert_eq!(sc.time.t_final, 1.0);
        assert_eq!(sc.time.grid, GridKind::Graded);
        assert_eq!(sc.solvers.len(), 1);
        assert_eq!(sc.solvers[0].choice(), SolverChoice::spectral());
        assert_eq!(sc.coefficients, CoefficientSpec::default());
        assert_eq!(sc.output.dir, PathBuf::from("out"));
    }

    #[test]
    fn references_parse_in_every_form() {
        let refs: Vec<ProfileRef> =
            serde_json::from_value(json!([2.5, "a", { "csv": "t.csv" }, { "type": "constant", "value": 1.0 }]))
                .unwrap();
        assert_eq!(refs[0], ProfileRef::Number(2.5));
        assert_eq!(refs[1], ProfileRef::Name("a".into()));
        assert_eq!(refs[2], ProfileRef::Csv(CsvTable { csv: "t.csv".into() }));
        assert_eq!(refs[3], ProfileRef::Inline(Profile::constant(1.0)));
    }

    #[test]
    fn name_cycles_are_rejected() {
        let mut v = minimal();
        v["functions"] = json!({ "a": "b", "b": "a" });
        v["source"] = json!("a");
        let err = from_value(v, Path::new("m.json")).unwrap_err().to_string();
        assert!(err.contains("cycle"), "{err}");
    }

    #[test]
    fn unknown_fields_name_their_path() {
        let mut v = minimal();
        v["time"]["stepz"] = json!(3);
        let err = from_value(v, Path::new("m.json")).unwrap_err().to_string();
        assert!(err.contains("`time.stepz`"), "{err}");
    }

    #[test]
    fn set_path_walks_objects_and_arrays() {
        let mut v = minimal();
        set_path(&mut v, "checks.0.epsilon", json!(0.5)).unwrap();
        set_path(&mut v, "alpha", json!(0.7)).unwrap();
        assert_eq!(v["checks"][0]["epsilon"], json!(0.5));
        assert_eq!(v["alpha"], json!(0.7));
        assert!(set_path(&mut v, "checks.3.epsilon", json!(1)).is_err());
        assert!(set_path(&mut v, "space", json!(1)).is_err());
        assert!(set_path(&mut v, "seed", json!(1)).is_err());
    }

    #[test]
    fn half_specified_rectangles_are_rejected() {
        let mut v = minimal();
        v["space"]["width"] = json!(2.0);
        let err = from_value(v, Path::new("m.json")).unwrap_err().to_string();
        assert!(err.contains("nodes_y"), "{err}");
    }
}
