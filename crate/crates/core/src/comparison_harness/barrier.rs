use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fractional_calculus::{L1Weights, TimeGrid};
use crate::solvers::{sha256_hex, Field, ProblemSpec};
use crate::spatial_operator::{assemble, solve_psi, Variant};

use super::checks::sample_lattice;
use super::report::lattice_margins;
use super::CheckReport;

/// L1 Caputo derivative of every node's time series; entries for `k = 0`
/// are zero.
fn caputo_lattice(values: &[f64], n: usize, alpha: f64, tgrid: &TimeGrid) -> Result<Vec<f64>> {
    let weights = L1Weights::new(alpha, tgrid)?;
    let mut out = vec![0.0; values.len()];
    let mut row = Vec::with_capacity(tgrid.n());
    for k in 1..=tgrid.n() {
        weights.row_into(k, &mut row)?;
        let dst = &mut out[k * n..(k + 1) * n];
        for (j, w) in row.iter().enumerate() {
            for p in 0..n {
                dst[p] += w * (values[(j + 1) * n + p] - values[j * n + p]);
            }
        }
    }
    Ok(out)
}

/// Parameters of the barrier `w = u + ε(M + ψ + tᵅ)`, with `ψ` solving
/// `A₁ψ = 1`, `∂_{ν_A}ψ + σψ = 1` at every time node.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BarrierParams {
    pub epsilon: f64,
    #[serde(rename = "M")]
    pub m: f64,
    /// `ψ(t_k)` for `k = 0..=N`.
    pub psi: Vec<Vec<f64>>,
}

impl BarrierParams {
    /// `ψ` from [`solve_psi`] and
    /// `M = 1 + max(0, max(−ψ)) + max(0, max((1 − dₜᵅψ)/b0))`.
    pub fn auto(p: &ProblemSpec, epsilon: f64) -> Result<Self> {
        let psi = p.tgrid.nodes().iter().map(|&t| solve_psi(&p.coeffs, &p.grid, t)).collect::<Result<Vec<_>>>()?;
        let n = p.n();
        let flat: Vec<f64> = psi.concat();
        let d = caputo_lattice(&flat, n, p.alpha, &p.tgrid)?;
        let b0 = sample_lattice(&p.coeffs.b0, &p.grid, &p.tgrid);
        let neg_psi = flat.iter().fold(0.0_f64, |m, v| m.max(-v));
        let lift = (n..flat.len()).fold(0.0_f64, |m, i| m.max((1.0 - d[i]) / b0[i]));
        let bp = Self { epsilon, m: 1.0 + neg_psi + lift, psi };
        bp.validate(p)?;
        Ok(bp)
    }

    /// `ε ≥ 0`, `M > 0`, `M + ψ ≥ 0` and `dₜᵅψ + b0·M > 0` on the lattice.
    pub fn validate(&self, p: &ProblemSpec) -> Result<()> {
        let n = p.n();
        if !(self.epsilon >= 0.0 && self.epsilon.is_finite() && self.m > 0.0 && self.m.is_finite()) {
            return Err(Error::Precondition(format!(
                "need epsilon >= 0 and M > 0, got {} and {}",
                self.epsilon, self.m
            )));
        }
        if self.psi.len() != p.tgrid.n() + 1 || self.psi.iter().any(|s| s.len() != n) {
            return Err(Error::GridMismatch("psi does not cover the lattice".into()));
        }
        let flat = self.psi.concat();
        if let Some(i) = flat.iter().position(|v| !(self.m + v >= 0.0)) {
            return Err(Error::Precondition(format!("M + psi < 0 at node ({}, {})", i % n, i / n)));
        }
        let d = caputo_lattice(&flat, n, p.alpha, &p.tgrid)?;
        let b0 = sample_lattice(&p.coeffs.b0, &p.grid, &p.tgrid);
        if let Some(i) = (n..flat.len()).find(|&i| !(d[i] + b0[i] * self.m > 0.0)) {
            return Err(Error::Precondition(format!("d_t psi + b0 M <= 0 at node ({}, {})", i % n, i / n)));
        }
        Ok(())
    }
}

/// Evidence for positivity through the barrier `w = u + ε(M + ψ + tᵅ)`.
///
/// `p` must be in `A₁` form (reaction `c = −b0`), so that `u` solves
/// `∂ₜᵅ(u − a) + A₁u = F`. Three parts are checked at tolerance `tol`:
/// the residual `d_t^α w + A₁w − F ≥ −tol` for `t ≥ t₁`, the boundary flux
/// `∂_{ν_A}w + σw ≥ ε − tol` for `t ≥ t₁` (one-sided second-order normal
/// differences) and `w ≥ −tol` everywhere.
pub fn barrier_certificate(u: &Field, p: &ProblemSpec, bp: &BarrierParams, tol: f64) -> Result<CheckReport> {
    if u.grid != p.grid || u.tgrid != p.tgrid {
        return Err(Error::GridMismatch("field and problem live on different lattices".into()));
    }
    let n = p.n();
    let c = sample_lattice(&p.coeffs.reaction, &p.grid, &p.tgrid);
    let b0 = sample_lattice(&p.coeffs.b0, &p.grid, &p.tgrid);
    if let Some(i) = (0..c.len()).find(|&i| !((c[i] + b0[i]).abs() <= 1e-12 * (1.0 + b0[i].abs()))) {
        return Err(Error::Precondition(format!(
            "not in A1 form: c = {} but b0 = {} at node ({}, {})",
            c[i],
            b0[i],
            i % n,
            i / n
        )));
    }
    bp.validate(p)?;
    let eps = bp.epsilon;
    let w: Vec<f64> = (0..u.values.len())
        .map(|i| {
            let (ix, k) = (i % n, i / n);
            u.values[i] + eps * (bp.m + bp.psi[k][ix] + p.tgrid.t(k).powf(p.alpha))
        })
        .collect();
    let dw = caputo_lattice(&w, n, p.alpha, &p.tgrid)?;
    let sigma = p.coeffs.sigma_values(&p.grid);
    let mut residual = Vec::with_capacity(n * p.tgrid.n());
    let mut flux = Vec::new();
    for k in 1..=p.tgrid.n() {
        let wk = &w[k * n..(k + 1) * n];
        let a1w = assemble(&p.coeffs, &p.grid, Variant::A1, p.tgrid.t(k))?.apply(wk);
        for ix in 0..n {
            residual.push((ix, k, dw[k * n + ix] + a1w[ix] - p.source[k * n + ix]));
        }
        for ix in (0..n).filter(|&ix| p.grid.is_boundary(ix)) {
            let idx = p.grid.index(ix);
            for (d, sign, _) in p.grid.boundary_faces(ix) {
                let step = |s: usize| {
                    let mut j = idx;
                    j[d] = if sign < 0.0 { j[d] + s } else { j[d] - s };
                    wk[p.grid.flat(j)]
                };
                let h = p.grid.axes()[d].h();
                let a = p.coeffs.conductivity[d].eval(ix, p.grid.point(ix), 0.0);
                let normal = a * (3.0 * wk[ix] - 4.0 * step(1) + step(2)) / (2.0 * h);
                flux.push((ix, k, normal + sigma[ix] * wk[ix] - eps));
            }
        }
    }
    let fp = sha256_hex(&format!("{}{:?}{bp:?}", p.fingerprint(), u.fingerprint()));
    let parts = vec![
        CheckReport::from_margins("barrier_residual", residual, tol, fp.clone()),
        CheckReport::from_margins("barrier_flux", flux, tol, fp.clone()),
        CheckReport::from_margins("barrier_min", lattice_margins(&w, n), tol, fp.clone()),
    ];
    Ok(CheckReport::combine("barrier", parts, tol, fp))
}
