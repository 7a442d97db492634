use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::fractional_calculus::TimeGrid;
use crate::spatial_operator::{CoefficientSet, SpaceGrid};

/// `∂ₜᵅ(u − a) + A u = F` with the Robin closure, sampled on a space-time
/// lattice.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemSpec {
    pub alpha: f64,
    pub grid: SpaceGrid,
    pub tgrid: TimeGrid,
    pub coeffs: CoefficientSet,
    /// Initial value at every space node.
    pub a: Vec<f64>,
    /// `F(x_p, t_k)` at index `k·n + p`.
    pub source: Vec<f64>,
}

impl ProblemSpec {
    pub fn new(
        alpha: f64,
        grid: SpaceGrid,
        tgrid: TimeGrid,
        coeffs: CoefficientSet,
        a: Vec<f64>,
        source: Vec<f64>,
    ) -> Result<Self> {
        let p = Self { alpha, grid, tgrid, coeffs, a, source };
        p.validate()?;
        Ok(p)
    }

    /// Samples `a(x)` and `F(x, t)` on the lattice.
    pub fn from_fns(
        alpha: f64,
        grid: SpaceGrid,
        tgrid: TimeGrid,
        coeffs: CoefficientSet,
        a: impl Fn([f64; 2]) -> f64,
        f: impl Fn([f64; 2], f64) -> f64,
    ) -> Result<Self> {
        let pts = grid.points();
        let a = pts.iter().map(|&x| a(x)).collect();
        let source =
            tgrid.nodes().iter().flat_map(|&t| pts.iter().map(move |&x| (x, t))).map(|(x, t)| f(x, t)).collect();
        Self::new(alpha, grid, tgrid, coeffs, a, source)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::Domain(format!("alpha = {} not in (0, 1)", self.alpha)));
        }
        let n = self.grid.len();
        if self.a.len() != n {
            return Err(Error::GridMismatch(format!("initial value has {} entries for {n} nodes", self.a.len())));
        }
        if self.source.len() != n * (self.tgrid.n() + 1) {
            return Err(Error::GridMismatch(format!(
                "source has {} samples, lattice has {n} x {}",
                self.source.len(),
                self.tgrid.n() + 1
            )));
        }
        if let Some(i) = self.a.iter().chain(&self.source).position(|v| !v.is_finite()) {
            return Err(Error::Domain(format!("non-finite data sample at flat index {i}")));
        }
        self.coeffs.validate(&self.grid)
    }

    /// Number of space nodes.
    pub fn n(&self) -> usize {
        self.grid.len()
    }

    pub fn source_at(&self, k: usize) -> &[f64] {
        let n = self.n();
        &self.source[k * n..(k + 1) * n]
    }

    /// `(s·a, s·F)` with everything else unchanged.
    pub fn scaled(&self, s: f64) -> Self {
        Self {
            a: self.a.iter().map(|v| s * v).collect(),
            source: self.source.iter().map(|v| s * v).collect(),
            ..self.clone()
        }
    }

    pub fn with_coeffs(&self, coeffs: CoefficientSet) -> Self {
        Self { coeffs, ..self.clone() }
    }

    /// SHA-256 of the full-precision textual form of the instance.
    pub fn fingerprint(&self) -> String {
        sha256_hex(&format!("{self:?}"))
    }
}

/// Lower-case hex SHA-256 of `text`.
pub fn sha256_hex(text: &str) -> String {
    Sha256::digest(text.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
}

/// Which solver produced a [`Field`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Producer {
    Spectral,
    L1,
}

/// Values on the space-time lattice, time-outer: `values[k·n + p]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Field {
    pub values: Vec<f64>,
    pub grid: SpaceGrid,
    pub tgrid: TimeGrid,
    pub producer: Producer,
    /// Sup-norm change per Picard sweep (spectral only).
    pub iteration_report: Vec<f64>,
    pub warnings: Vec<String>,
}

impl Field {
    pub fn new(grid: SpaceGrid, tgrid: TimeGrid, values: Vec<f64>, producer: Producer) -> Result<Self> {
        if values.len() != grid.len() * (tgrid.n() + 1) {
            return Err(Error::GridMismatch(format!(
                "{} values for a {} x {} lattice",
                values.len(),
                grid.len(),
                tgrid.n() + 1
            )));
        }
        Ok(Self { values, grid, tgrid, producer, iteration_report: Vec::new(), warnings: Vec::new() })
    }

    pub fn n(&self) -> usize {
        self.grid.len()
    }

    /// Number of time levels `N + 1`.
    pub fn levels(&self) -> usize {
        self.tgrid.n() + 1
    }

    pub fn at(&self, k: usize) -> &[f64] {
        let n = self.n();
        &self.values[k * n..(k + 1) * n]
    }

    pub fn get(&self, ix: usize, it: usize) -> f64 {
        self.values[it * self.n() + ix]
    }

    /// Smallest value and its `(ix, it)`; the first one on ties.
    pub fn min(&self) -> (f64, usize, usize) {
        let (i, v) = self
            .values
            .iter()
            .enumerate()
            .fold((0, f64::INFINITY), |(bi, bv), (i, &v)| if v < bv { (i, v) } else { (bi, bv) });
        (v, i % self.n(), i / self.n())
    }

    /// SHA-256 of the lattice and values.
    pub fn fingerprint(&self) -> String {
        sha256_hex(&format!("{:?}{:?}{:?}", self.grid, self.tgrid, self.values))
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn same_lattice(&self, other: &Field) -> Result<()> {
        if self.grid != other.grid || self.tgrid != other.tgrid {
            return Err(Error::GridMismatch("fields live on different lattices".into()));
        }
        Ok(())
    }

    /// `max |self − other|`.
    pub fn sup_distance(&self, other: &Field) -> Result<f64> {
        self.same_lattice(other)?;
        Ok(self.values.iter().zip(&other.values).fold(0.0, |m, (a, b)| m.max((a - b).abs())))
    }

    /// `‖self − other‖_∞ / (1 + ‖other‖_∞)`.
    pub fn relative_gap(&self, other: &Field) -> Result<f64> {
        Ok(self.sup_distance(other)? / (1.0 + other.sup_norm()))
    }
}
