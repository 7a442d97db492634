use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::{DiscreteOperator, Variant};

const EIGEN_MAX_ITER: usize = 10_000;

/// Leading eigenpairs of `A0`, orthonormal in the weighted product.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EigenSystem {
    pub eigenvalues: Vec<f64>,
    /// `n × m`, one eigenvector per column.
    pub eigenvectors: DMatrix<f64>,
    pub weights: Vec<f64>,
}

impl EigenSystem {
    pub fn count(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn n(&self) -> usize {
        self.weights.len()
    }

    pub fn phi(&self, k: usize) -> Vec<f64> {
        self.eigenvectors.column(k).iter().copied().collect()
    }

    /// `(u, φₖ)` for every mode.
    pub fn project(&self, u: &[f64]) -> Vec<f64> {
        (0..self.count())
            .map(|k| self.eigenvectors.column(k).iter().zip(u).zip(&self.weights).map(|((p, v), w)| p * v * w).sum())
            .collect()
    }

    /// `Σₖ cₖ φₖ`.
    pub fn synthesize(&self, coeffs: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; self.n()];
        self.synthesize_into(coeffs, &mut out);
        out
    }

    pub fn synthesize_into(&self, coeffs: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|v| *v = 0.0);
        for (k, c) in coeffs.iter().enumerate() {
            if *c != 0.0 {
                for (o, p) in out.iter_mut().zip(self.eigenvectors.column(k).iter()) {
                    *o += c * p;
                }
            }
        }
    }

    /// `max |ΦᵀWΦ − I|`.
    pub fn orthonormality_defect(&self) -> f64 {
        let m = self.count();
        let mut worst: f64 = 0.0;
        for i in 0..m {
            for j in 0..=i {
                let s: f64 = (0..self.n())
                    .map(|p| self.eigenvectors[(p, i)] * self.eigenvectors[(p, j)] * self.weights[p])
                    .sum();
                worst = worst.max((s - if i == j { 1.0 } else { 0.0 }).abs());
            }
        }
        worst
    }

    /// `max_k ‖A φₖ − λₖ φₖ‖_∞ / (1 + λₖ)`.
    pub fn residual(&self, op: &DiscreteOperator) -> f64 {
        (0..self.count())
            .map(|k| {
                let phi = self.phi(k);
                let lam = self.eigenvalues[k];
                let r = op.apply(&phi).iter().zip(&phi).map(|(a, p)| (a - lam * p).abs()).fold(0.0, f64::max);
                r / (1.0 + lam.abs())
            })
            .fold(0.0, f64::max)
    }
}

/// First `m` eigenpairs of an `A0` operator, ascending, with the first
/// non-negligible component of every eigenvector positive.
pub fn eigendecompose(op: &DiscreteOperator, m: usize) -> Result<EigenSystem> {
    if op.variant != Variant::A0 {
        return Err(Error::Domain(format!("eigendecompose needs the A0 variant, got {:?}", op.variant)));
    }
    let n = op.n();
    if m == 0 || m > n {
        return Err(Error::IndexOutOfRange { index: m, max: n });
    }
    let w = &op.inner_product_weights;
    let sw: Vec<f64> = w.iter().map(|x| x.sqrt()).collect();
    // W^{1/2} A0 W^{-1/2} is symmetric; average to remove rounding asymmetry
    let mut sym = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in op.matrix.row_range(i) {
            let a = op.matrix.get(i, j) * sw[i] / sw[j];
            let b = op.matrix.get(j, i) * sw[j] / sw[i];
            sym[(i, j)] = 0.5 * (a + b);
        }
    }
    let eig = SymmetricEigen::try_new(sym, f64::EPSILON, EIGEN_MAX_ITER)
        .ok_or_else(|| Error::Eigen(format!("no convergence within {EIGEN_MAX_ITER} sweeps (n = {n})")))?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]).then(a.cmp(&b)));
    let mut vectors = DMatrix::zeros(n, m);
    let mut values = Vec::with_capacity(m);
    for (k, &col) in order.iter().take(m).enumerate() {
        values.push(eig.eigenvalues[col]);
        let y = eig.eigenvectors.column(col);
        let mut v: Vec<f64> = y.iter().zip(&sw).map(|(a, s)| a / s).collect();
        let norm: f64 = v.iter().zip(w).map(|(a, b)| a * a * b).sum::<f64>().sqrt();
        let big = v.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
        let first = v.iter().find(|x| x.abs() > 1e-8 * big).copied().unwrap_or(1.0);
        let s = first.signum() / norm;
        v.iter_mut().for_each(|x| *x *= s);
        vectors.set_column(k, &nalgebra::DVector::from_vec(v));
    }
    Ok(EigenSystem { eigenvalues: values, eigenvectors: vectors, weights: w.clone() })
}
