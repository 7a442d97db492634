use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

use super::assemble::stiffness;
use super::{assemble, assemble_unchecked, CoefficientSet, DiscreteOperator, Profile, SpaceGrid, Variant};

const PROBE_SEED: u64 = 0x00c0_e4c1;

/// Discrete `H¹` Gram matrix `W + Σ_faces (v_q − v_p)²·|face|/h`.
fn h1_gram(op: &DiscreteOperator) -> DMatrix<f64> {
    let coeffs = CoefficientSet::laplacian(op.grid.dim());
    let mut g = stiffness(&coeffs, &op.grid, false, true).to_dense();
    for (i, w) in op.inner_product_weights.iter().enumerate() {
        g[(i, i)] += w;
    }
    g
}

fn symmetric_form(op: &DiscreteOperator) -> DMatrix<f64> {
    let w = &op.inner_product_weights;
    let n = op.n();
    let mut s = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in op.matrix.row_range(i) {
            s[(i, j)] += 0.5 * w[i] * op.matrix.get(i, j);
            s[(j, i)] += 0.5 * w[i] * op.matrix.get(i, j);
        }
    }
    s
}

fn quotient(s: &DMatrix<f64>, h: &DMatrix<f64>, v: &DVector<f64>) -> f64 {
    v.dot(&(s * v)) / v.dot(&(h * v))
}

/// Estimate of `κ₁ = min (A₁v, v)/‖v‖²_{H¹}` over `v ≠ 0`.
///
/// Candidates are the minimisers of the generalised eigenproblem
/// `S v = μ H v` (with `S` the symmetric part of `W·A₁` and `H` the discrete
/// `H¹` Gram matrix), the eigenvectors of `S`, the constant vector and
/// `probes` seeded random vectors. A positive result certifies discrete
/// coercivity.
pub fn coercivity_check(op: &DiscreteOperator, probes: usize) -> Result<f64> {
    if op.variant != Variant::A1 {
        return Err(Error::Domain(format!("coercivity_check needs the A1 variant, got {:?}", op.variant)));
    }
    let n = op.n();
    let s = symmetric_form(op);
    let h = h1_gram(op);
    let mut best = f64::INFINITY;
    let mut consider = |v: &DVector<f64>| {
        if v.norm() > 0.0 {
            best = best.min(quotient(&s, &h, v));
        }
    };
    consider(&DVector::from_element(n, 1.0));
    if let Some(chol) = h.clone().cholesky() {
        let l = chol.l();
        let linv = l.clone().try_inverse().ok_or_else(|| Error::Eigen("H¹ Gram matrix not invertible".into()))?;
        let c = &linv * &s * linv.transpose();
        let c = (&c + c.transpose()) * 0.5;
        let eig = SymmetricEigen::try_new(c, f64::EPSILON, 10_000)
            .ok_or_else(|| Error::Eigen("generalised coercivity eigenproblem did not converge".into()))?;
        let lt = linv.transpose();
        let mut idx: Vec<usize> = (0..n).collect();
        idx.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        for &k in idx.iter().take(3) {
            consider(&(&lt * eig.eigenvectors.column(k)));
        }
    }
    if let Some(eig) = SymmetricEigen::try_new(s.clone(), f64::EPSILON, 10_000) {
        let mut idx: Vec<usize> = (0..n).collect();
        idx.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        for &k in idx.iter().take(3) {
            consider(&eig.eigenvectors.column(k).into_owned());
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(PROBE_SEED);
    for _ in 0..probes {
        let v = DVector::from_fn(n, |_, _| rng.random_range(-1.0..1.0));
        consider(&v);
    }
    Ok(best)
}

/// Smallest constant `b0` for which [`coercivity_check`] is positive, to
/// relative precision `rel_tol`, found by bisection.
pub fn coercivity_threshold(coeffs: &CoefficientSet, grid: &SpaceGrid, t: f64, rel_tol: f64) -> Result<f64> {
    let check = |b0: f64| -> Result<f64> {
        let c = coeffs.clone().with_b0(Profile::constant(b0));
        coercivity_check(&assemble_unchecked(&c, grid, Variant::A1, t), 0)
    };
    if check(0.0)? > 0.0 {
        return Ok(0.0);
    }
    let mut hi = 1.0;
    while check(hi)? <= 0.0 {
        hi *= 2.0;
        if hi > 1e12 {
            return Err(Error::Coefficients("no coercive b0 below 1e12".into()));
        }
    }
    let mut lo = 0.0;
    while hi - lo > rel_tol * hi {
        let mid = 0.5 * (lo + hi);
        if check(mid)? > 0.0 {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Solves `A₁ψ = 1` with `∂_{ν_A}ψ + σψ = 1` at time `t`.
pub fn solve_psi(coeffs: &CoefficientSet, grid: &SpaceGrid, t: f64) -> Result<Vec<f64>> {
    let op = assemble(coeffs, grid, Variant::A1, t)?;
    let w = &op.inner_product_weights;
    let rhs: Vec<f64> =
        (0..grid.len()).map(|p| 1.0 + grid.boundary_faces(p).iter().map(|f| f.2).sum::<f64>() / w[p]).collect();
    let lu = op.matrix.lu().map_err(|e| match e {
        Error::Singular { detail, .. } => {
            Error::Singular { step: 0, detail: format!("ψ system at t = {t}: {detail}") }
        }
        other => other,
    })?;
    let psi = lu.solve(&rhs);
    let res = op.apply(&psi).iter().zip(&rhs).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    let scale = rhs.iter().fold(0.0_f64, |m, v| m.max(v.abs()));
    if !(res <= 1e-10 * grid.len() as f64 * scale.max(1.0)) {
        return Err(Error::Singular {
            step: 0,
            detail: format!(
                "ψ system at t = {t} ill-conditioned: residual {res:.3e}, min pivot ratio {:.3e}",
                lu.min_pivot_ratio()
            ),
        });
    }
    Ok(psi)
}
