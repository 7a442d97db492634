use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// How the nodes of a [`TimeGrid`] were generated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TimeGridKind {
    Uniform,
    /// `t_k = T (k/N)^γ`
    Graded {
        gamma: f64,
    },
    Custom,
}

/// Strictly increasing nodes `0 = t₀ < t₁ < … < t_N = T` with `N ≥ 2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeGrid {
    nodes: Vec<f64>,
    kind: TimeGridKind,
}

impl TimeGrid {
    pub fn uniform(t_final: f64, n: usize) -> Result<Self> {
        Self::check(t_final, n)?;
        let nodes = (0..=n).map(|k| if k == n { t_final } else { t_final * k as f64 / n as f64 }).collect();
        Ok(Self { nodes, kind: TimeGridKind::Uniform })
    }

    pub fn graded(t_final: f64, n: usize, gamma: f64) -> Result<Self> {
        Self::check(t_final, n)?;
        if !(gamma >= 1.0 && gamma.is_finite()) {
            return Err(Error::Domain(format!("grading exponent {gamma} must be >= 1")));
        }
        if gamma == 1.0 {
            return Ok(Self { kind: TimeGridKind::Graded { gamma }, ..Self::uniform(t_final, n)? });
        }
        let nodes =
            (0..=n).map(|k| if k == n { t_final } else { t_final * (k as f64 / n as f64).powf(gamma) }).collect();
        let grid = Self { nodes, kind: TimeGridKind::Graded { gamma } };
        grid.validate()?;
        Ok(grid)
    }

    /// Graded grid with the exponent `(2 − α)/α`, which restores the
    /// `N^{α−2}` rate of the L1 derivative for `tᵅ` start-up behaviour.
    pub fn graded_for(t_final: f64, n: usize, alpha: f64) -> Result<Self> {
        Self::graded(t_final, n, ((2.0 - alpha) / alpha).max(1.0))
    }

    pub fn from_nodes(nodes: Vec<f64>) -> Result<Self> {
        let grid = Self { nodes, kind: TimeGridKind::Custom };
        grid.validate()?;
        Ok(grid)
    }

    fn check(t_final: f64, n: usize) -> Result<()> {
        if !(t_final > 0.0 && t_final.is_finite()) {
            return Err(Error::Domain(format!("horizon T = {t_final} must be positive")));
        }
        if n < 2 {
            return Err(Error::Domain(format!("time grid needs N >= 2 steps, got {n}")));
        }
        Ok(())
    }

    fn validate(&self) -> Result<()> {
        if self.nodes.len() < 3 {
            return Err(Error::Domain("time grid needs N >= 2 steps".into()));
        }
        if self.nodes[0] != 0.0 {
            return Err(Error::Domain(format!("first node must be 0, got {}", self.nodes[0])));
        }
        if let Some(k) = self.nodes.windows(2).position(|w| !(w[1] > w[0]) || !w[1].is_finite()) {
            return Err(Error::Domain(format!("time nodes not strictly increasing at index {}", k + 1)));
        }
        Ok(())
    }

    /// Number of steps `N`.
    pub fn n(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn t(&self, k: usize) -> f64 {
        self.nodes[k]
    }

    pub fn t_final(&self) -> f64 {
        self.nodes[self.n()]
    }

    /// `t_k − t_{k−1}` for `1 ≤ k ≤ N`.
    pub fn step(&self, k: usize) -> f64 {
        self.nodes[k] - self.nodes[k - 1]
    }

    pub fn max_step(&self) -> f64 {
        self.nodes.windows(2).map(|w| w[1] - w[0]).fold(0.0, f64::max)
    }

    pub fn kind(&self) -> TimeGridKind {
        self.kind
    }

    pub fn is_uniform(&self) -> bool {
        matches!(self.kind, TimeGridKind::Uniform | TimeGridKind::Graded { gamma: 1.0 })
    }
}

/// Scalar samples on the nodes of a [`TimeGrid`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimeSignal {
    grid: TimeGrid,
    values: Vec<f64>,
}

impl TimeSignal {
    pub fn new(grid: TimeGrid, values: Vec<f64>) -> Result<Self> {
        if values.len() != grid.n() + 1 {
            return Err(Error::GridMismatch(format!("{} values for a grid with {} nodes", values.len(), grid.n() + 1)));
        }
        Ok(Self { grid, values })
    }

    pub fn from_fn(grid: &TimeGrid, f: impl Fn(f64) -> f64) -> Self {
        let values = grid.nodes().iter().map(|&t| f(t)).collect();
        Self { grid: grid.clone(), values }
    }

    pub fn zeros(grid: &TimeGrid) -> Self {
        Self { grid: grid.clone(), values: vec![0.0; grid.n() + 1] }
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut [f64] {
        &mut self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }
}

/// Values at nodes `t₁ … t_N` of an operator that is undefined at `t₀`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NodalDerivative {
    grid: TimeGrid,
    values: Vec<f64>,
}

impl NodalDerivative {
    pub(crate) fn new(grid: TimeGrid, values: Vec<f64>) -> Self {
        debug_assert_eq!(values.len(), grid.n());
        Self { grid, values }
    }

    pub fn grid(&self) -> &TimeGrid {
        &self.grid
    }

    /// Value at node `k`; `None` at `k = 0`.
    pub fn at(&self, k: usize) -> Option<f64> {
        if k == 0 {
            None
        } else {
            self.values.get(k - 1).copied()
        }
    }

    /// Values at `t₁ … t_N`.
    pub fn interior(&self) -> &[f64] {
        &self.values
    }
}
