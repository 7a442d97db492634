use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// One axis `[0, L]` with `n` equispaced nodes including both endpoints.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub length: f64,
    pub nodes: usize,
}

impl Axis {
    pub fn h(&self) -> f64 {
        self.length / (self.nodes - 1) as f64
    }

    pub fn x(&self, i: usize) -> f64 {
        if i + 1 == self.nodes {
            self.length
        } else {
            i as f64 * self.h()
        }
    }
}

/// Node lattice on an interval or a rectangle. Unknowns are ordered with the
/// first axis fastest.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpaceGrid {
    axes: Vec<Axis>,
}

impl SpaceGrid {
    pub fn interval(length: f64, nodes: usize) -> Result<Self> {
        Self::new(vec![Axis { length, nodes }])
    }

    pub fn rectangle(lx: f64, nx: usize, ly: f64, ny: usize) -> Result<Self> {
        Self::new(vec![Axis { length: lx, nodes: nx }, Axis { length: ly, nodes: ny }])
    }

    pub fn new(axes: Vec<Axis>) -> Result<Self> {
        if axes.is_empty() || axes.len() > 2 {
            return Err(Error::Domain(format!("dimension {} not supported (1 or 2)", axes.len())));
        }
        for ax in &axes {
            if !(ax.length > 0.0 && ax.length.is_finite()) {
                return Err(Error::Domain(format!("axis length {} must be positive", ax.length)));
            }
            if ax.nodes < 3 {
                return Err(Error::Domain(format!("axis needs at least 3 nodes, got {}", ax.nodes)));
            }
        }
        Ok(Self { axes })
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn axes(&self) -> &[Axis] {
        &self.axes
    }

    pub fn len(&self) -> usize {
        self.axes.iter().map(|a| a.nodes).product()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Distance between neighbouring rows of the first axis in the unknown
    /// ordering, i.e. the half bandwidth of a nearest-neighbour stencil.
    pub fn bandwidth(&self) -> usize {
        if self.dim() == 1 {
            1
        } else {
            self.axes[0].nodes
        }
    }

    /// Per-axis index of node `p`.
    pub fn index(&self, p: usize) -> [usize; 2] {
        let nx = self.axes[0].nodes;
        [p % nx, p / nx]
    }

    pub fn flat(&self, idx: [usize; 2]) -> usize {
        idx[0] + self.axes[0].nodes * idx[1]
    }

    /// Coordinates of node `p` (second entry is 0 in 1D).
    pub fn point(&self, p: usize) -> [f64; 2] {
        let idx = self.index(p);
        let mut x = [0.0; 2];
        for (d, ax) in self.axes.iter().enumerate() {
            x[d] = ax.x(idx[d]);
        }
        x
    }

    pub fn points(&self) -> Vec<[f64; 2]> {
        (0..self.len()).map(|p| self.point(p)).collect()
    }

    /// Trapezoid weights making `Σ wᵢ uᵢ vᵢ` the discrete `L²(Ω)` product.
    pub fn weights(&self) -> Vec<f64> {
        (0..self.len())
            .map(|p| {
                let idx = self.index(p);
                self.axes
                    .iter()
                    .enumerate()
                    .map(|(d, ax)| if idx[d] == 0 || idx[d] + 1 == ax.nodes { 0.5 * ax.h() } else { ax.h() })
                    .product()
            })
            .collect()
    }

    pub fn is_boundary(&self, p: usize) -> bool {
        let idx = self.index(p);
        self.axes.iter().enumerate().any(|(d, ax)| idx[d] == 0 || idx[d] + 1 == ax.nodes)
    }

    /// Boundary measure carried by node `p` on each face, as
    /// `(axis, outward sign, measure)`; empty for interior nodes.
    pub fn boundary_faces(&self, p: usize) -> Vec<(usize, f64, f64)> {
        let idx = self.index(p);
        let mut out = Vec::new();
        for (d, ax) in self.axes.iter().enumerate() {
            // measure of the face = product of the dual-cell widths along the other axes
            let measure: f64 = self
                .axes
                .iter()
                .enumerate()
                .filter(|&(e, _)| e != d)
                .map(|(e, o)| if idx[e] == 0 || idx[e] + 1 == o.nodes { 0.5 * o.h() } else { o.h() })
                .product();
            if idx[d] == 0 {
                out.push((d, -1.0, measure));
            }
            if idx[d] + 1 == ax.nodes {
                out.push((d, 1.0, measure));
            }
        }
        out
    }
}
