use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::{BandMatrix, CoefficientSet, SpaceGrid};

/// Which operator a [`DiscreteOperator`] realises.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    /// `A = −∇·(a∇) − b·∇ − c`
    FullA,
    /// `A0 = −∇·(a∇) + c0`, self-adjoint in the weighted product
    A0,
    /// `A1 = −∇·(a∇) − b·∇ + b0`
    A1,
}

/// Matrix of an elliptic operator acting on nodal values, with the weights
/// of the discrete `L²` product. `symmetric` means `diag(weights)·matrix`
/// is symmetric.
#[derive(Debug, Clone)]
pub struct DiscreteOperator {
    pub matrix: BandMatrix,
    pub variant: Variant,
    pub symmetric: bool,
    pub inner_product_weights: Vec<f64>,
    pub grid: SpaceGrid,
    pub t: f64,
}

impl DiscreteOperator {
    pub fn apply(&self, u: &[f64]) -> Vec<f64> {
        self.matrix.mul_vec(u)
    }

    pub fn n(&self) -> usize {
        self.matrix.n()
    }

    /// `max |(WM)ᵢⱼ − (WM)ⱼᵢ|`.
    pub fn symmetry_defect(&self) -> f64 {
        let w = &self.inner_product_weights;
        let mut worst: f64 = 0.0;
        for i in 0..self.n() {
            for j in self.matrix.row_range(i) {
                worst = worst.max((w[i] * self.matrix.get(i, j) - w[j] * self.matrix.get(j, i)).abs());
            }
        }
        worst
    }
}

/// `Σ_faces g (u_p − u_q)² + Σ_boundary σ|Γ_p| u_p²` as a symmetric band
/// matrix: the weighted stiffness form of `−∇·(a∇)` with the Robin term.
pub(crate) fn stiffness(coeffs: &CoefficientSet, grid: &SpaceGrid, with_sigma: bool, unit_a: bool) -> BandMatrix {
    let mut s = BandMatrix::zeros(grid.len(), grid.bandwidth());
    for p in 0..grid.len() {
        let idx = grid.index(p);
        for (d, ax) in grid.axes().iter().enumerate() {
            if idx[d] + 1 == ax.nodes {
                continue;
            }
            let mut j = idx;
            j[d] += 1;
            let q = grid.flat(j);
            let cross: f64 = grid
                .axes()
                .iter()
                .enumerate()
                .filter(|&(e, _)| e != d)
                .map(|(e, o)| if idx[e] == 0 || idx[e] + 1 == o.nodes { 0.5 * o.h() } else { o.h() })
                .product();
            let a = if unit_a { 1.0 } else { coeffs.conductivity[d].at_face(grid, p, q, 0.0) };
            let g = a * cross / ax.h();
            s.add(p, p, g);
            s.add(q, q, g);
            s.add(p, q, -g);
            s.add(q, p, -g);
        }
    }
    if with_sigma {
        let sigma = coeffs.sigma_values(grid);
        for p in (0..grid.len()).filter(|&p| grid.is_boundary(p)) {
            let measure: f64 = grid.boundary_faces(p).iter().map(|f| f.2).sum();
            s.add(p, p, sigma[p] * measure);
        }
    }
    s
}

/// First-derivative matrices `G_d`, one per axis: centred differences in the
/// interior and, on faces normal to `d`, the derivative implied by the Robin
/// condition `a_d ∂_d u ν_d + σu = 0`.
#[derive(Debug, Clone)]
pub struct Gradient {
    pub axes: Vec<BandMatrix>,
}

impl Gradient {
    pub fn new(coeffs: &CoefficientSet, grid: &SpaceGrid) -> Self {
        let sigma = coeffs.sigma_values(grid);
        let axes = (0..grid.dim())
            .map(|d| {
                let ax = grid.axes()[d];
                let h = ax.h();
                let mut g = BandMatrix::zeros(grid.len(), grid.bandwidth());
                for p in 0..grid.len() {
                    let idx = grid.index(p);
                    let a = coeffs.conductivity[d].eval(p, grid.point(p), 0.0);
                    if idx[d] == 0 {
                        g.add(p, p, sigma[p] / a);
                    } else if idx[d] + 1 == ax.nodes {
                        g.add(p, p, -sigma[p] / a);
                    } else {
                        let (mut lo, mut hi) = (idx, idx);
                        lo[d] -= 1;
                        hi[d] += 1;
                        g.add(p, grid.flat(hi), 0.5 / h);
                        g.add(p, grid.flat(lo), -0.5 / h);
                    }
                }
                g
            })
            .collect();
        Self { axes }
    }

    /// `Σ_d b_d ∂_d u` with drift samples `b[d][p]`.
    pub fn drift_apply(&self, b: &[Vec<f64>], u: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|v| *v = 0.0);
        let mut tmp = vec![0.0; u.len()];
        for (g, bd) in self.axes.iter().zip(b) {
            g.mul_vec_into(u, &mut tmp);
            for ((o, t), bv) in out.iter_mut().zip(&tmp).zip(bd) {
                *o += bv * t;
            }
        }
    }
}

/// The lower-order part `Q(t)u = b·∇u + (c0 + c)u`, so that `A = A0 − Q`.
#[derive(Debug, Clone)]
pub struct LowerOrder {
    gradient: Gradient,
    coeffs: CoefficientSet,
    grid: SpaceGrid,
}

impl LowerOrder {
    pub fn new(coeffs: &CoefficientSet, grid: &SpaceGrid) -> Self {
        Self { gradient: Gradient::new(coeffs, grid), coeffs: coeffs.clone(), grid: grid.clone() }
    }

    pub fn is_zero(&self, t: f64) -> bool {
        self.coeffs.c0 == 0.0
            && self.coeffs.reaction.sample(&self.grid, t).iter().all(|&v| v == 0.0)
            && self.coeffs.drift.iter().all(|b| b.sample(&self.grid, t).iter().all(|&v| v == 0.0))
    }

    pub fn apply(&self, t: f64, u: &[f64], out: &mut [f64]) {
        let b: Vec<Vec<f64>> = self.coeffs.drift.iter().map(|p| p.sample(&self.grid, t)).collect();
        self.gradient.drift_apply(&b, u, out);
        let c = self.coeffs.reaction.sample(&self.grid, t);
        for ((o, ui), ci) in out.iter_mut().zip(u).zip(&c) {
            *o += (self.coeffs.c0 + ci) * ui;
        }
    }

    pub fn gradient(&self) -> &Gradient {
        &self.gradient
    }
}

/// Assembles `variant` at time `t` after validating the coefficients.
pub fn assemble(coeffs: &CoefficientSet, grid: &SpaceGrid, variant: Variant, t: f64) -> Result<DiscreteOperator> {
    coeffs.validate(grid)?;
    if variant == Variant::A1 {
        coeffs.validate_b0(grid, t)?;
    }
    let check_finite = |name: &str, v: Vec<f64>| -> Result<Vec<f64>> {
        match v.iter().position(|x| !x.is_finite()) {
            Some(p) => Err(Error::Coefficients(format!("{name} not finite at node {p}"))),
            None => Ok(v),
        }
    };
    check_finite("reaction", coeffs.reaction.sample(grid, t))?;
    for b in &coeffs.drift {
        check_finite("drift", b.sample(grid, t))?;
    }
    Ok(assemble_unchecked(coeffs, grid, variant, t))
}

/// Assembly without coefficient validation, for exploring instances outside
/// the hypotheses (for example `b0 ≤ 0`).
pub fn assemble_unchecked(coeffs: &CoefficientSet, grid: &SpaceGrid, variant: Variant, t: f64) -> DiscreteOperator {
    let weights = grid.weights();
    let mut m = stiffness(coeffs, grid, true, false);
    let inv_w: Vec<f64> = weights.iter().map(|w| 1.0 / w).collect();
    m.scale_rows(&inv_w);
    let n = grid.len();
    match variant {
        Variant::A0 => m.add_diagonal(&vec![coeffs.c0; n]),
        Variant::FullA | Variant::A1 => {
            let gradient = Gradient::new(coeffs, grid);
            for (g, b) in gradient.axes.iter().zip(&coeffs.drift) {
                let bv = b.sample(grid, t);
                for i in 0..n {
                    for j in g.row_range(i) {
                        let v = g.get(i, j);
                        if v != 0.0 {
                            m.add(i, j, -bv[i] * v);
                        }
                    }
                }
            }
            let zeroth = if variant == Variant::A1 {
                coeffs.b0.sample(grid, t)
            } else {
                coeffs.reaction.sample(grid, t).iter().map(|c| -c).collect()
            };
            m.add_diagonal(&zeroth);
        }
    }
    let symmetric = variant == Variant::A0 || coeffs.drift.iter().all(|b| b.sample(grid, t).iter().all(|&v| v == 0.0));
    DiscreteOperator { matrix: m, variant, symmetric, inner_product_weights: weights, grid: grid.clone(), t }
}
