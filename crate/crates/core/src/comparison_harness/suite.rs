use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::fractional_calculus::{TimeGrid, TimeSignal};
use crate::solvers::ProblemSpec;
use crate::spatial_operator::{CoefficientSet, Profile, SpaceGrid};

use super::{
    barrier_certificate, check_c_monotonicity, check_comparison, check_positivity, check_sigma_monotonicity,
    extremum_principle_probe, BarrierParams, CheckReport, SolverChoice,
};

/// Size and seed of a randomized suite on `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SuiteConfig {
    pub seed: u64,
    pub count: usize,
    pub nodes: usize,
    pub steps: usize,
    pub t_final: f64,
    /// Fixed order for every instance; drawn from `U(0.25, 0.9)` when absent.
    #[serde(default)]
    pub alpha: Option<f64>,
}

impl SuiteConfig {
    /// 41 space nodes, 64 graded steps, `T = 1`.
    pub fn new(seed: u64, count: usize) -> Self {
        Self { seed, count, nodes: 41, steps: 64, t_final: 1.0, alpha: None }
    }
}

/// Independent generator for instance `i` of a suite.
pub fn instance_rng(seed: u64, i: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(i as u64);
    rng
}

/// Boundary coefficient kinds cycled through by the suites.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SigmaKind {
    Neumann,
    Constant,
    Varying,
}

impl SigmaKind {
    pub fn cycle(i: usize) -> Self {
        [SigmaKind::Neumann, SigmaKind::Constant, SigmaKind::Varying][i % 3]
    }
}

fn random_sigma(rng: &mut ChaCha8Rng, kind: SigmaKind) -> Profile {
    match kind {
        SigmaKind::Neumann => Profile::zero(),
        SigmaKind::Constant => Profile::constant(rng.random_range(0.1..5.0)),
        SigmaKind::Varying => {
            Profile::Affine { value: rng.random_range(0.1..2.0), gradient: vec![rng.random_range(0.0..3.0)], rate: 0.0 }
        }
    }
}

/// A nonnegative smooth profile on `[0, 1]`, at most `scale` in size.
fn nonneg_profile(rng: &mut ChaCha8Rng, scale: f64) -> Profile {
    let amp = rng.random_range(0.0..scale);
    if rng.random_bool(0.5) {
        Profile::Cosine {
            base: amp,
            amplitude: amp,
            wavenumber: vec![PI * rng.random_range(1..=3) as f64],
            phase: rng.random_range(0.0..2.0 * PI),
        }
    } else {
        Profile::Bump {
            base: 0.0,
            amplitude: amp,
            center: vec![rng.random_range(0.0..1.0)],
            width: rng.random_range(0.1..0.4),
        }
    }
}

/// Nonnegative forcing `F(x, t) = g(x)(1 + sin(ωt + φ)) + h·t^β`.
struct Forcing {
    g: Profile,
    omega: f64,
    phase: f64,
    h: f64,
    beta: f64,
}

impl Forcing {
    fn random(rng: &mut ChaCha8Rng) -> Self {
        Self {
            g: nonneg_profile(rng, 2.0),
            omega: rng.random_range(0.0..6.0),
            phase: rng.random_range(0.0..2.0 * PI),
            h: rng.random_range(0.0..1.0),
            beta: rng.random_range(0.0..2.0),
        }
    }

    fn eval(&self, x: [f64; 2], t: f64) -> f64 {
        self.g.eval(0, x, t) * (1.0 + (self.omega * t + self.phase).sin()) + self.h * t.powf(self.beta)
    }
}

fn lattice(rng: &mut ChaCha8Rng, cfg: &SuiteConfig) -> Result<(f64, SpaceGrid, TimeGrid)> {
    let drawn = rng.random_range(0.25..0.9);
    let alpha = cfg.alpha.unwrap_or(drawn);
    let grid = SpaceGrid::interval(1.0, cfg.nodes)?;
    let tgrid = TimeGrid::graded_for(cfg.t_final, cfg.steps, alpha)?;
    Ok((alpha, grid, tgrid))
}

/// Variable-coefficient 1D instance with `a ≥ 0`, `F ≥ 0` and the given
/// boundary kind.
pub fn random_instance(rng: &mut ChaCha8Rng, cfg: &SuiteConfig, kind: SigmaKind) -> Result<ProblemSpec> {
    let (alpha, grid, tgrid) = lattice(rng, cfg)?;
    let coeffs = CoefficientSet::laplacian(1)
        .with_conductivity(Profile::Cosine {
            base: 1.0,
            amplitude: rng.random_range(0.0..0.4),
            wavenumber: vec![rng.random_range(1.0..6.0)],
            phase: rng.random_range(0.0..2.0 * PI),
        })
        .with_drift(vec![Profile::Affine {
            value: rng.random_range(-1.0..1.0),
            gradient: vec![rng.random_range(-1.0..1.0)],
            rate: rng.random_range(-0.5..0.5),
        }])
        .with_reaction(Profile::Bump {
            base: rng.random_range(-1.0..0.5),
            amplitude: rng.random_range(-1.0..1.0),
            center: vec![rng.random_range(0.0..1.0)],
            width: rng.random_range(0.1..0.4),
        })
        .with_sigma(random_sigma(rng, kind))
        .with_c0(1.0);
    let a = nonneg_profile(rng, 1.0);
    let f = Forcing::random(rng);
    ProblemSpec::from_fns(alpha, grid, tgrid, coeffs, |x| a.eval(0, x, 0.0), |x, t| f.eval(x, t))
}

fn run<T: Send>(cfg: &SuiteConfig, job: impl Fn(usize, &mut ChaCha8Rng) -> Result<T> + Sync) -> Result<Vec<T>> {
    (0..cfg.count).into_par_iter().map(|i| job(i, &mut instance_rng(cfg.seed, i))).collect()
}

/// [`check_positivity`] on `cfg.count` random instances.
pub fn positivity_suite(cfg: &SuiteConfig, solver: &SolverChoice, tol: f64) -> Result<Vec<CheckReport>> {
    run(cfg, |i, rng| {
        let p = random_instance(rng, cfg, SigmaKind::cycle(i))?;
        let mut r = check_positivity(&solver.solve(&p)?, tol);
        r.fingerprint = p.fingerprint();
        Ok(r)
    })
}

/// [`check_comparison`] on pairs `(a + bump, F + G)` against `(a, F)` with
/// nonnegative `bump` and `G`.
pub fn comparison_suite(cfg: &SuiteConfig, solver: &SolverChoice, tol: f64) -> Result<Vec<CheckReport>> {
    run(cfg, |i, rng| {
        let lower = random_instance(rng, cfg, SigmaKind::cycle(i))?;
        let (da, df) = (nonneg_profile(rng, 1.0), Forcing::random(rng));
        let mut upper = lower.clone();
        let pts = lower.grid.points();
        for (v, x) in upper.a.iter_mut().zip(&pts) {
            *v += da.eval(0, *x, 0.0);
        }
        for (k, &t) in lower.tgrid.nodes().iter().enumerate() {
            for (ix, x) in pts.iter().enumerate() {
                upper.source[k * pts.len() + ix] += df.eval(*x, t);
            }
        }
        let mut r = check_comparison(&solver.solve(&upper)?, &solver.solve(&lower)?, tol)?;
        r.fingerprint = crate::solvers::sha256_hex(&(upper.fingerprint() + &lower.fingerprint()));
        Ok(r)
    })
}

/// [`check_c_monotonicity`] with `c1 = c2 + g`, `g ≥ 0` smooth.
pub fn c_monotonicity_suite(cfg: &SuiteConfig, solver: &SolverChoice, tol: f64) -> Result<Vec<CheckReport>> {
    run(cfg, |i, rng| {
        let p = random_instance(rng, cfg, SigmaKind::cycle(i))?;
        let c2 = p.coeffs.reaction.clone();
        let c1 = Profile::Sum { terms: vec![c2.clone(), nonneg_profile(rng, 1.5)] };
        check_c_monotonicity(&p, &c1, &c2, solver, tol)
    })
}

/// [`check_sigma_monotonicity`] with `c < 0`, `σ₁ ≥ σ₀ > 0` and
/// `σ₂ = σ₁ + g`, `g ≥ 0`.
pub fn sigma_monotonicity_suite(cfg: &SuiteConfig, solver: &SolverChoice, tol: f64) -> Result<Vec<CheckReport>> {
    run(cfg, |_, rng| {
        let mut p = random_instance(rng, cfg, SigmaKind::Neumann)?;
        p.coeffs.reaction = Profile::Bump {
            base: rng.random_range(-2.0..-0.5),
            amplitude: rng.random_range(-1.0..0.4),
            center: vec![rng.random_range(0.0..1.0)],
            width: rng.random_range(0.1..0.4),
        };
        let sigma0 = rng.random_range(0.1..1.0);
        let sigma1 = Profile::Affine {
            value: sigma0 + rng.random_range(0.0..1.0),
            gradient: vec![rng.random_range(0.0..2.0)],
            rate: 0.0,
        };
        let extra = if rng.random_bool(0.5) {
            Profile::constant(rng.random_range(0.0..3.0))
        } else {
            Profile::Affine { value: rng.random_range(0.0..1.0), gradient: vec![rng.random_range(0.0..3.0)], rate: 0.0 }
        };
        let sigma2 = Profile::Sum { terms: vec![sigma1.clone(), extra] };
        check_sigma_monotonicity(&p, &sigma1, &sigma2, sigma0, solver, tol)
    })
}

/// Instance in `A₁` form (`c = −b0`) with `a = 0` and `F ≥ 0`, so the
/// solution is positive and satisfies the boundary condition for `t > 0`.
pub fn random_barrier_instance(rng: &mut ChaCha8Rng, cfg: &SuiteConfig, kind: SigmaKind) -> Result<ProblemSpec> {
    let (alpha, grid, tgrid) = lattice(rng, cfg)?;
    let b0 = Profile::constant(rng.random_range(1.0..4.0));
    let coeffs = CoefficientSet::laplacian(1)
        .with_conductivity(Profile::Cosine {
            base: 1.0,
            amplitude: rng.random_range(0.0..0.3),
            wavenumber: vec![rng.random_range(1.0..4.0)],
            phase: rng.random_range(0.0..2.0 * PI),
        })
        .with_drift(vec![Profile::Affine {
            value: rng.random_range(-0.5..0.5),
            gradient: vec![rng.random_range(-0.5..0.5)],
            rate: 0.0,
        }])
        .with_b0(b0.clone())
        .with_reaction(Profile::Product { factors: vec![Profile::constant(-1.0), b0] })
        .with_sigma(random_sigma(rng, kind))
        .with_c0(1.0);
    let f = Forcing::random(rng);
    ProblemSpec::from_fns(alpha, grid, tgrid, coeffs, |_| 0.0, |x, t| f.eval(x, t))
}

/// [`barrier_certificate`] with auto-selected `M` on random positive
/// instances.
pub fn barrier_suite(cfg: &SuiteConfig, solver: &SolverChoice, epsilon: f64, tol: f64) -> Result<Vec<CheckReport>> {
    run(cfg, |i, rng| {
        let p = random_barrier_instance(rng, cfg, SigmaKind::cycle(i))?;
        let bp = BarrierParams::auto(&p, epsilon)?;
        barrier_certificate(&solver.solve(&p)?, &p, &bp, tol)
    })
}

/// Random `y(t) = Σ aⱼ sin(ωⱼt + φⱼ)` on `[0, 1]` whose minimum is not at
/// `t = 0`, with its order `α`. Alternates uniform and graded grids.
pub fn random_trig_signal(rng: &mut ChaCha8Rng, i: usize, steps: usize) -> Result<(TimeSignal, f64)> {
    let alpha = rng.random_range(0.1..0.95);
    let grid =
        if i.is_multiple_of(2) { TimeGrid::uniform(1.0, steps)? } else { TimeGrid::graded_for(1.0, steps, alpha)? };
    loop {
        let terms: Vec<(f64, f64, f64)> = (0..3)
            .map(|_| (rng.random_range(-1.0..1.0), rng.random_range(1.0..20.0), rng.random_range(0.0..2.0 * PI)))
            .collect();
        let y = TimeSignal::from_fn(&grid, |t| terms.iter().map(|(a, w, p)| a * (w * t + p).sin()).sum());
        let v = y.values();
        if v[1..].iter().any(|&x| x <= v[0]) {
            return Ok((y, alpha));
        }
    }
}

/// [`extremum_principle_probe`] on `count` random smooth signals with
/// `steps` intervals.
pub fn extremum_suite(seed: u64, count: usize, steps: usize, tol: f64) -> Result<Vec<CheckReport>> {
    (0..count)
        .into_par_iter()
        .map(|i| {
            let (y, alpha) = random_trig_signal(&mut instance_rng(seed, i), i, steps)?;
            extremum_principle_probe(&y, alpha, tol)
        })
        .collect()
}
