use std::f64::consts::PI;

use crate::error::Result;

use super::MittagLeffler;

const DEGREE: usize = 16;
// cell width in u = ln(1 + x)
const CELL: f64 = 1.0 / 32.0;
const SCAN_LIMIT: f64 = 1e6;

/// `E_{α,β}(−x)` on `0 ≤ x < x_max` from a piecewise Chebyshev interpolant
/// in `u = ln(1 + x)`, falling back to [`MittagLeffler::eval`] elsewhere.
///
/// `x_max` is where the asymptotic expansion starts to converge, so the table
/// covers exactly the range that would otherwise need the integral branch.
#[derive(Debug, Clone)]
pub struct MlTable {
    ml: MittagLeffler,
    x_max: f64,
    cells: Vec<[f64; DEGREE + 1]>,
}

impl MlTable {
    /// Evaluation without a table.
    pub fn direct(ml: MittagLeffler) -> Self {
        Self { ml, x_max: 0.0, cells: Vec::new() }
    }

    pub fn new(ml: MittagLeffler) -> Result<Self> {
        if ml.alpha() == 1.0 {
            return Ok(Self::direct(ml));
        }
        let mut x_max = 15.0_f64;
        while x_max < SCAN_LIMIT && ml.asymptotic(-x_max).is_none() {
            x_max *= 1.05;
        }
        let u_max = x_max.ln_1p();
        let n_cells = (u_max / CELL).ceil() as usize;
        let nodes: Vec<f64> = (0..=DEGREE).map(|j| (PI * (j as f64 + 0.5) / (DEGREE + 1) as f64).cos()).collect();
        let mut cells = Vec::with_capacity(n_cells);
        for c in 0..n_cells {
            let u0 = c as f64 * CELL;
            let mut vals = [0.0; DEGREE + 1];
            for (v, s) in vals.iter_mut().zip(&nodes) {
                let u = u0 + 0.5 * CELL * (1.0 + s);
                *v = ml.eval(-u.exp_m1())?;
            }
            let mut coef = [0.0; DEGREE + 1];
            for (k, ck) in coef.iter_mut().enumerate() {
                let s: f64 = vals
                    .iter()
                    .enumerate()
                    .map(|(j, v)| v * (PI * k as f64 * (j as f64 + 0.5) / (DEGREE + 1) as f64).cos())
                    .sum();
                *ck = 2.0 * s / (DEGREE + 1) as f64;
            }
            coef[0] *= 0.5;
            cells.push(coef);
        }
        Ok(Self { ml, x_max: (n_cells as f64 * CELL).exp_m1().min(x_max), cells })
    }

    pub fn x_max(&self) -> f64 {
        self.x_max
    }

    pub fn inner(&self) -> &MittagLeffler {
        &self.ml
    }

    pub fn eval(&self, z: f64) -> Result<f64> {
        if z <= 0.0 && -z < self.x_max {
            let u = (-z).ln_1p();
            let c = ((u / CELL) as usize).min(self.cells.len() - 1);
            let s = 2.0 * (u - c as f64 * CELL) / CELL - 1.0;
            let coef = &self.cells[c];
            let (mut b1, mut b2) = (0.0, 0.0);
            for &ck in coef[1..].iter().rev() {
                let b0 = ck + 2.0 * s * b1 - b2;
                b2 = b1;
                b1 = b0;
            }
            return Ok(coef[0] + s * b1 - b2);
        }
        self.ml.eval(z)
    }
}
