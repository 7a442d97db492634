//! Implicit L1 time stepping. Independent of the modal solver: only the
//! L1 weights and banded direct solves are used here.

use crate::error::{Error, Result};
use crate::fractional_calculus::{L1Weights, TimeGrid, TimeSignal};
use crate::spatial_operator::{assemble, BandMatrix, Variant};

use super::{Field, ProblemSpec, Producer};

/// Solves `∂ₜᵅ(u − a) + M_k u_k = r_k` for `k = 1..N` with `u₀ = a`, where
/// `system(k)` returns `(M_k, r_k)`. Returns all levels, time-outer.
fn march(
    alpha: f64,
    tgrid: &TimeGrid,
    a: &[f64],
    mut system: impl FnMut(usize) -> Result<(BandMatrix, Vec<f64>)>,
) -> Result<Vec<f64>> {
    let n = a.len();
    let steps = tgrid.n();
    let weights = L1Weights::new(alpha, tgrid)?;
    let mut u = Vec::with_capacity(n * (steps + 1));
    u.extend_from_slice(a);
    // v = u − a; diffs[j] = v_{j+1} − v_j
    let mut diffs: Vec<f64> = Vec::with_capacity(n * steps);
    let mut v_prev = vec![0.0; n];
    let mut row = Vec::with_capacity(steps);
    let mut rhs = vec![0.0; n];
    for k in 1..=steps {
        weights.row_into(k, &mut row)?;
        let w_last = row[k - 1];
        let (mut m, r) = system(k)?;
        let ma = m.mul_vec(a);
        for p in 0..n {
            rhs[p] = r[p] - ma[p] + w_last * v_prev[p];
        }
        for (j, w) in row[..k - 1].iter().enumerate() {
            for (acc, d) in rhs.iter_mut().zip(&diffs[j * n..(j + 1) * n]) {
                *acc -= w * d;
            }
        }
        m.add_diagonal(&vec![w_last; n]);
        let lu = m.lu().map_err(|e| match e {
            Error::Singular { detail, .. } => Error::Singular { step: k, detail },
            other => other,
        })?;
        lu.solve_in_place(&mut rhs);
        if let Some(p) = rhs.iter().position(|x| !x.is_finite()) {
            return Err(Error::Singular { step: k, detail: format!("non-finite solution at node {p}") });
        }
        diffs.extend(rhs.iter().zip(&v_prev).map(|(v, w)| v - w));
        u.extend(rhs.iter().zip(a).map(|(v, ai)| v + ai));
        v_prev.copy_from_slice(&rhs);
    }
    Ok(u)
}

/// L1 solution of the full problem with `A(t_k)` assembled at every step.
pub fn solve_l1(p: &ProblemSpec) -> Result<Field> {
    p.validate()?;
    let values = march(p.alpha, &p.tgrid, &p.a, |k| {
        let op = assemble(&p.coeffs, &p.grid, Variant::FullA, p.tgrid.t(k))?;
        Ok((op.matrix, p.source_at(k).to_vec()))
    })?;
    Field::new(p.grid.clone(), p.tgrid.clone(), values, Producer::L1)
}

/// L1 solution of the scalar problem `∂ₜᵅ(y − a) + μy = f`.
pub fn l1_scalar(alpha: f64, tgrid: &TimeGrid, mu: f64, a: f64, f: &[f64]) -> Result<TimeSignal> {
    if f.len() != tgrid.n() + 1 {
        return Err(Error::GridMismatch(format!("{} forcing samples for {} nodes", f.len(), tgrid.n() + 1)));
    }
    let values = march(alpha, tgrid, &[a], |k| {
        let mut m = BandMatrix::zeros(1, 0);
        m.add(0, 0, mu);
        Ok((m, vec![f[k]]))
    })?;
    TimeSignal::new(tgrid.clone(), values)
}

/// `u₀ = 0`, `u₁ = a` and `∂ₜᵅ(u_{n+1} − a) + A₁u_{n+1} = (b0 + c)uₙ + F`,
/// each level solved by L1 stepping. Returns `n_terms` fields.
pub fn picard_sequence(p: &ProblemSpec, n_terms: usize) -> Result<Vec<Field>> {
    p.validate()?;
    let n = p.n();
    let levels = p.tgrid.n() + 1;
    let mut out: Vec<Field> = Vec::with_capacity(n_terms);
    let mk = |values| Field::new(p.grid.clone(), p.tgrid.clone(), values, Producer::L1);
    if n_terms >= 1 {
        out.push(mk(vec![0.0; n * levels])?);
    }
    if n_terms >= 2 {
        out.push(mk(p.a.repeat(levels))?);
    }
    // (b0 + c) at every level, shared by all terms
    let mut gain = Vec::with_capacity(n * levels);
    for k in 0..levels {
        let t = p.tgrid.t(k);
        let b0 = p.coeffs.b0.sample(&p.grid, t);
        let c = p.coeffs.reaction.sample(&p.grid, t);
        gain.extend(b0.iter().zip(&c).map(|(x, y)| x + y));
    }
    let ops: Vec<BandMatrix> = (1..levels)
        .map(|k| assemble(&p.coeffs, &p.grid, Variant::A1, p.tgrid.t(k)).map(|op| op.matrix))
        .collect::<Result<_>>()?;
    while out.len() < n_terms {
        let prev = out.last().expect("two seed terms").values.clone();
        let values = march(p.alpha, &p.tgrid, &p.a, |k| {
            let r = (0..n).map(|i| gain[k * n + i] * prev[k * n + i] + p.source[k * n + i]).collect();
            Ok((ops[k - 1].clone(), r))
        })?;
        out.push(mk(values)?);
    }
    Ok(out)
}
