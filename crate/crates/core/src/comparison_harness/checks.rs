use crate::error::{Error, Result};
use crate::fractional_calculus::{rl_of_power, L1Weights, TimeGrid, TimeSignal};
use crate::solvers::{sha256_hex, Field, ProblemSpec};
use crate::spatial_operator::{Profile, SpaceGrid};

use super::report::lattice_margins;
use super::{CheckReport, SolverChoice};

/// `profile(x_p, t_k)` at index `k·n + p`.
pub(crate) fn sample_lattice(profile: &Profile, grid: &SpaceGrid, tgrid: &TimeGrid) -> Vec<f64> {
    tgrid.nodes().iter().flat_map(|&t| profile.sample(grid, t)).collect()
}

fn first_where(values: &[f64], n: usize, bad: impl Fn(usize, f64) -> bool) -> Option<(usize, usize, f64)> {
    values.iter().enumerate().find(|&(i, &v)| bad(i, v)).map(|(i, &v)| (i % n, i / n, v))
}

pub(crate) fn require_nonneg_data(p: &ProblemSpec) -> Result<()> {
    if let Some(ix) = p.a.iter().position(|&v| v < 0.0) {
        return Err(Error::Precondition(format!("initial value {} < 0 at node {ix}", p.a[ix])));
    }
    if let Some((ix, it, v)) = first_where(&p.source, p.n(), |_, v| v < 0.0) {
        return Err(Error::Precondition(format!("source {v} < 0 at node ({ix}, {it})")));
    }
    Ok(())
}

/// Passes iff `u ≥ −tol` at every node.
pub fn check_positivity(u: &Field, tol: f64) -> CheckReport {
    CheckReport::from_margins("positivity", lattice_margins(&u.values, u.n()), tol, u.fingerprint())
}

/// Passes iff `u1 − u2 ≥ −tol` at every node.
pub fn check_comparison(u1: &Field, u2: &Field, tol: f64) -> Result<CheckReport> {
    u1.same_lattice(u2)?;
    let diff: Vec<f64> = u1.values.iter().zip(&u2.values).map(|(a, b)| a - b).collect();
    let fp = sha256_hex(&(u1.fingerprint() + &u2.fingerprint()));
    Ok(CheckReport::from_margins("comparison", lattice_margins(&diff, u1.n()), tol, fp))
}

/// Solves `p` with reaction `c1` and with `c2` and checks
/// `u(c1) ≥ u(c2) − tol`.
///
/// Requires `c1 ≥ c2` on the lattice and `a, F ≥ 0`.
pub fn check_c_monotonicity(
    p: &ProblemSpec,
    c1: &Profile,
    c2: &Profile,
    solver: &SolverChoice,
    tol: f64,
) -> Result<CheckReport> {
    require_nonneg_data(p)?;
    let (s1, s2) = (sample_lattice(c1, &p.grid, &p.tgrid), sample_lattice(c2, &p.grid, &p.tgrid));
    if let Some((ix, it, _)) = first_where(&s1, p.n(), |i, v| !(v >= s2[i])) {
        return Err(Error::Precondition(format!("c1 < c2 at node ({ix}, {it})")));
    }
    let mut q = p.clone();
    q.coeffs.reaction = c1.clone();
    let u1 = solver.solve(&q)?;
    q.coeffs.reaction = c2.clone();
    let u2 = solver.solve(&q)?;
    let mut r = check_comparison(&u1, &u2, tol)?;
    r.check_name = "c_monotonicity".into();
    r.fingerprint = sha256_hex(&format!("{}{c1:?}{c2:?}", p.fingerprint()));
    Ok(r)
}

fn sigma_hypothesis(p: &ProblemSpec, sigma1: &Profile, sigma2: &Profile, sigma0: f64) -> Result<()> {
    let c = sample_lattice(&p.coeffs.reaction, &p.grid, &p.tgrid);
    if let Some((ix, it, v)) = first_where(&c, p.n(), |_, v| !(v < 0.0)) {
        return Err(Error::Precondition(format!("c = {v} is not negative at node ({ix}, {it})")));
    }
    if !(sigma0 > 0.0) {
        return Err(Error::Precondition(format!("sigma0 = {sigma0} must be positive")));
    }
    let (s1, s2) = (sigma1.sample(&p.grid, 0.0), sigma2.sample(&p.grid, 0.0));
    for ix in (0..p.n()).filter(|&ix| p.grid.is_boundary(ix)) {
        if !(s2[ix] >= s1[ix] && s1[ix] >= sigma0) {
            return Err(Error::Precondition(format!(
                "sigma ordering broken at boundary node {ix}: sigma2 = {}, sigma1 = {}, sigma0 = {sigma0}",
                s2[ix], s1[ix]
            )));
        }
    }
    require_nonneg_data(p)
}

fn sigma_report(
    p: &ProblemSpec,
    sigma1: &Profile,
    sigma2: &Profile,
    solver: &SolverChoice,
    tol: f64,
) -> Result<CheckReport> {
    let mut q = p.clone();
    q.coeffs.sigma = sigma1.clone();
    let u1 = solver.solve(&q)?;
    q.coeffs.sigma = sigma2.clone();
    let u2 = solver.solve(&q)?;
    let mut r = check_comparison(&u1, &u2, tol)?;
    r.check_name = "sigma_monotonicity".into();
    r.fingerprint = sha256_hex(&format!("{}{sigma1:?}{sigma2:?}", p.fingerprint()));
    Ok(r)
}

/// Solves `p` with `σ₁` and with `σ₂` and checks `u(σ₁) ≥ u(σ₂) − tol`.
///
/// The hypotheses `c < 0` on the lattice, `σ₂ ≥ σ₁ ≥ σ₀ > 0` on the boundary
/// and `a, F ≥ 0` are enforced: a violation is a
/// [`Error::Precondition`], not a failed check.
pub fn check_sigma_monotonicity(
    p: &ProblemSpec,
    sigma1: &Profile,
    sigma2: &Profile,
    sigma0: f64,
    solver: &SolverChoice,
    tol: f64,
) -> Result<CheckReport> {
    sigma_hypothesis(p, sigma1, sigma2, sigma0)?;
    sigma_report(p, sigma1, sigma2, solver, tol)
}

/// [`check_sigma_monotonicity`] without enforcing the hypotheses; the
/// report's `in_hypothesis` says whether they held.
pub fn explore_sigma_monotonicity(
    p: &ProblemSpec,
    sigma1: &Profile,
    sigma2: &Profile,
    sigma0: f64,
    solver: &SolverChoice,
    tol: f64,
) -> Result<CheckReport> {
    let inside = sigma_hypothesis(p, sigma1, sigma2, sigma0).is_ok();
    let mut r = sigma_report(p, sigma1, sigma2, solver, tol)?;
    r.in_hypothesis = inside;
    Ok(r)
}

/// Solves `p` and checks `u ≥ δΓ(β+1)/Γ(α+β+1)·t^{α+β} − tol`.
///
/// Requires `σ = 0`, `a = 0`, `b = 0`, `c = 0` and `F ≥ δt^β` on the lattice.
pub fn check_example_bound(
    p: &ProblemSpec,
    delta: f64,
    beta: f64,
    solver: &SolverChoice,
    tol: f64,
) -> Result<CheckReport> {
    if !(delta >= 0.0 && delta.is_finite() && beta >= 0.0 && beta.is_finite()) {
        return Err(Error::Precondition(format!("need delta >= 0 and beta >= 0, got {delta}, {beta}")));
    }
    let n = p.n();
    let sigma = p.coeffs.sigma_values(&p.grid);
    if let Some(ix) = (0..n).find(|&ix| p.grid.is_boundary(ix) && sigma[ix] != 0.0) {
        return Err(Error::Precondition(format!("sigma = {} at boundary node {ix}, need 0", sigma[ix])));
    }
    if let Some(ix) = p.a.iter().position(|&v| v != 0.0) {
        return Err(Error::Precondition(format!("initial value {} at node {ix}, need 0", p.a[ix])));
    }
    for (name, profile) in p.coeffs.drift.iter().map(|b| ("drift", b)).chain([("reaction", &p.coeffs.reaction)]) {
        let s = sample_lattice(profile, &p.grid, &p.tgrid);
        if let Some((ix, it, v)) = first_where(&s, n, |_, v| v != 0.0) {
            return Err(Error::Precondition(format!("{name} = {v} at node ({ix}, {it}), need 0")));
        }
    }
    let forcing = |k: usize| delta * p.tgrid.t(k).powf(beta);
    if let Some((ix, it, v)) = first_where(&p.source, n, |i, v| !(v >= forcing(i / n))) {
        return Err(Error::Precondition(format!("source {v} < delta t^beta = {} at node ({ix}, {it})", forcing(it))));
    }
    let u = solver.solve(p)?;
    let margins: Vec<f64> =
        (0..u.values.len()).map(|i| u.values[i] - delta * rl_of_power(p.alpha, beta, p.tgrid.t(i / n))).collect();
    let fp = sha256_hex(&format!("{}{delta:?}{beta:?}", p.fingerprint()));
    Ok(CheckReport::from_margins("example_bound", lattice_margins(&margins, n), tol, fp))
}

/// Checks that the L1 Caputo derivative of `y` at its minimiser is `≤ tol`.
///
/// The minimiser is the last node attaining the minimum; if that is `t₀`
/// the probe's hypothesis fails with [`Error::Precondition`].
pub fn extremum_principle_probe(y: &TimeSignal, alpha: f64, tol: f64) -> Result<CheckReport> {
    let v = y.values();
    if v.iter().any(|x| x.is_nan()) {
        return Err(Error::Domain("signal contains NaN".into()));
    }
    let k = (0..v.len()).fold(0, |best, i| if v[i] <= v[best] { i } else { best });
    if k == 0 {
        return Err(Error::Precondition("minimum is attained only at t = 0".into()));
    }
    let row = L1Weights::new(alpha, y.grid())?.row(k)?;
    let d: f64 = row.iter().zip(v.windows(2)).map(|(w, s)| w * (s[1] - s[0])).sum();
    let fp = sha256_hex(&format!("{y:?}{alpha:?}"));
    Ok(CheckReport::from_margins("extremum_principle", [(0, k, -d)], tol, fp))
}
