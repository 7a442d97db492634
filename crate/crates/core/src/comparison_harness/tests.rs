use proptest::prelude::*;

use super::*;
use crate::error::Error;
use crate::fractional_calculus::{rl_of_power, TimeGrid, TimeSignal};
use crate::solvers::{solve_l1, Field, ProblemSpec, Producer};
use crate::spatial_operator::{assemble, eigendecompose, CoefficientSet, Profile, SpaceGrid, Variant};

fn example1(delta: f64, beta: f64, bump: f64) -> ProblemSpec {
    let alpha = 0.6;
    let grid = SpaceGrid::interval(1.0, 21).unwrap();
    let tgrid = TimeGrid::graded_for(1.0, 64, alpha).unwrap();
    let coeffs = CoefficientSet::laplacian(1).with_conductivity(Profile::Cosine {
        base: 1.0,
        amplitude: 0.3,
        wavenumber: vec![3.0],
        phase: 0.0,
    });
    ProblemSpec::from_fns(
        alpha,
        grid,
        tgrid,
        coeffs,
        |_| 0.0,
        |x, t| delta * t.powf(beta) + bump * t * (-(x[0] - 0.3).powi(2) / 0.01).exp(),
    )
    .unwrap()
}

fn reacting(c: f64, sigma: f64) -> ProblemSpec {
    let alpha = 0.5;
    let grid = SpaceGrid::interval(1.0, 31).unwrap();
    let tgrid = TimeGrid::graded_for(1.0, 48, alpha).unwrap();
    let coeffs = CoefficientSet::laplacian(1)
        .with_drift(vec![Profile::Affine { value: 0.3, gradient: vec![-0.5], rate: 0.0 }])
        .with_reaction(Profile::constant(c))
        .with_sigma(Profile::constant(sigma))
        .with_c0(1.0);
    ProblemSpec::from_fns(alpha, grid, tgrid, coeffs, |x| 1.0 + (3.0 * x[0]).cos(), |x, t| t * (1.0 + x[0])).unwrap()
}

fn flat_field(values: Vec<f64>) -> Field {
    let grid = SpaceGrid::interval(1.0, 3).unwrap();
    let tgrid = TimeGrid::uniform(1.0, values.len() / 3 - 1).unwrap();
    Field::new(grid, tgrid, values, Producer::L1).unwrap()
}

#[test]
fn power_source_bound_is_attained_and_kept() {
    let spectral = SolverChoice::spectral();
    for beta in [0.0, 1.0] {
        let p = example1(0.7, beta, 0.0);
        let u = spectral.solve(&p).unwrap();
        let pos = check_positivity(&u, SPECTRAL_TOLERANCE);
        assert!(pos.pass && pos.worst_violation >= 0.0);
        let r = check_example_bound(&p, 0.7, beta, &spectral, 1e-9).unwrap();
        assert!(r.pass);
        let n = p.n();
        let gap = (0..u.values.len())
            .map(|i| (u.values[i] - 0.7 * rl_of_power(p.alpha, beta, p.tgrid.t(i / n))).abs())
            .fold(0.0, f64::max);
        assert!(gap <= 1e-9, "β={beta}: {gap:e}");
        let inflated = example1(0.7, beta, 2.0);
        let r = check_example_bound(&inflated, 0.7, beta, &spectral, SPECTRAL_TOLERANCE).unwrap();
        assert!(r.pass && r.worst_violation >= -1e-12, "{r:?}");
        let l1 = check_example_bound(&inflated, 0.7, beta, &SolverChoice::L1, 1e-3).unwrap();
        assert!(l1.pass);
    }
    let p = example1(0.0, 1.0, 2.0);
    let r = check_example_bound(&p, 0.0, 1.0, &spectral, SPECTRAL_TOLERANCE).unwrap();
    let pos = check_positivity(&spectral.solve(&p).unwrap(), SPECTRAL_TOLERANCE);
    assert_eq!(r.worst_violation, pos.worst_violation);
    assert_eq!(r.witness, pos.witness);
}

#[test]
fn example_bound_preconditions() {
    let spectral = SolverChoice::spectral();
    let p = example1(0.7, 1.0, 0.0);
    assert!(matches!(check_example_bound(&p, 0.8, 1.0, &spectral, 1e-9), Err(Error::Precondition(_))));
    assert!(matches!(check_example_bound(&p, -1.0, 1.0, &spectral, 1e-9), Err(Error::Precondition(_))));
    let robin = p.with_coeffs(p.coeffs.clone().with_sigma(Profile::constant(1.0)));
    assert!(matches!(check_example_bound(&robin, 0.7, 1.0, &spectral, 1e-9), Err(Error::Precondition(_))));
    let drift = p.with_coeffs(p.coeffs.clone().with_drift(vec![Profile::constant(0.1)]));
    assert!(matches!(check_example_bound(&drift, 0.7, 1.0, &spectral, 1e-9), Err(Error::Precondition(_))));
    let mut warm = p.clone();
    warm.a[3] = 0.1;
    assert!(matches!(check_example_bound(&warm, 0.7, 1.0, &spectral, 1e-9), Err(Error::Precondition(_))));
}

#[test]
fn single_negative_entry_is_the_witness() {
    let mut v = vec![0.5; 12];
    v[7] = -1.0;
    let r = check_positivity(&flat_field(v), 1e-6);
    assert!(!r.pass);
    assert_eq!(r.worst_violation, -1.0);
    assert_eq!(r.witness, Witness { ix: 1, it: 2 });
    assert!(check_positivity(&flat_field(vec![-1e-7; 9]), 1e-6).pass);
}

#[test]
fn comparison_of_identical_and_swapped_fields() {
    let p = reacting(-0.5, 1.0);
    let u = solve_l1(&p).unwrap();
    let r = check_comparison(&u, &u, 0.0).unwrap();
    assert!(r.pass);
    assert_eq!(r.worst_violation, 0.0);
    let mut up = p.clone();
    up.source.iter_mut().for_each(|v| *v += 0.5);
    let w = solve_l1(&up).unwrap();
    let fwd = check_comparison(&w, &u, L1_TOLERANCE).unwrap();
    assert!(fwd.pass);
    let back = check_comparison(&u, &w, L1_TOLERANCE).unwrap();
    assert!(!back.pass);
    let largest = w.values.iter().zip(&u.values).map(|(a, b)| a - b).fold(f64::NEG_INFINITY, f64::max);
    assert_eq!(back.worst_violation, -largest);
    let other = flat_field(vec![0.0; 9]);
    assert!(matches!(check_comparison(&u, &other, 0.0), Err(Error::GridMismatch(_))));
}

#[test]
fn nan_margins_fail_and_parts_combine() {
    let r = CheckReport::from_margins("x", [(0, 1, 2.0), (1, 1, f64::NAN), (2, 1, -5.0)], 1.0, String::new());
    assert!(!r.pass && r.worst_violation.is_nan());
    assert_eq!(r.witness, Witness { ix: 1, it: 1 });
    let a = CheckReport::from_margins("a", [(0, 1, 0.3)], 0.1, String::new());
    let b = CheckReport::from_margins("b", [(4, 2, -0.05)], 0.1, String::new());
    let both = CheckReport::combine("ab", vec![a.clone(), b.clone()], 0.1, String::new());
    assert!(both.pass);
    assert_eq!((both.worst_violation, both.witness), (-0.05, Witness { ix: 4, it: 2 }));
    let c = CheckReport::from_margins("c", [(1, 1, -0.2)], 0.1, String::new());
    assert!(!CheckReport::combine("abc", vec![a, b, c], 0.1, String::new()).pass);
}

#[test]
fn report_json_has_stable_key_order() {
    let r = CheckReport::from_margins("positivity", [(3, 4, 0.25)], 1e-8, "ab".into());
    let s = serde_json::to_string(&r).unwrap();
    assert_eq!(
        s,
        r#"{"check_name":"positivity","pass":true,"worst_violation":0.25,"witness":{"ix":3,"it":4},"tolerance":1e-8,"fingerprint":"ab","in_hypothesis":true}"#
    );
    assert_eq!(serde_json::from_str::<CheckReport>(&s).unwrap(), r);
}

#[test]
fn reaction_ordering() {
    let p = reacting(-0.5, 1.0);
    for solver in [SolverChoice::spectral(), SolverChoice::L1] {
        let tol = solver.class_tolerance();
        let c2 = Profile::constant(-0.5);
        let r = check_c_monotonicity(&p, &Profile::constant(0.5), &c2, &solver, tol).unwrap();
        assert!(r.pass, "{r:?}");
        let same = check_c_monotonicity(&p, &c2, &c2, &solver, tol).unwrap();
        assert_eq!(same.worst_violation, 0.0);
        assert!(matches!(check_c_monotonicity(&p, &c2, &Profile::zero(), &solver, tol), Err(Error::Precondition(_))));
    }
    // c1 = c2 + sin²(πx)
    let sin2 = Profile::Cosine { base: 0.5, amplitude: -0.5, wavenumber: vec![2.0 * std::f64::consts::PI], phase: 0.0 };
    let c2 = Profile::constant(-0.5);
    let c1 = Profile::Sum { terms: vec![c2.clone(), sin2] };
    assert!(check_c_monotonicity(&p, &c1, &c2, &SolverChoice::L1, 1e-6).unwrap().pass);
}

#[test]
fn boundary_ordering_and_its_hypotheses() {
    let p = reacting(-1.0, 0.0);
    let (s1, s2) = (Profile::constant(1.0), Profile::constant(2.0));
    for solver in [SolverChoice::spectral(), SolverChoice::L1] {
        let tol = solver.class_tolerance();
        let r = check_sigma_monotonicity(&p, &s1, &s2, 0.5, &solver, tol).unwrap();
        assert!(r.pass && r.in_hypothesis, "{r:?}");
        let same = check_sigma_monotonicity(&p, &s1, &s1, 0.5, &solver, tol).unwrap();
        assert_eq!(same.worst_violation, 0.0);
    }
    let l1 = SolverChoice::L1;
    let varying =
        Profile::Sum { terms: vec![s1.clone(), Profile::Affine { value: 0.0, gradient: vec![3.0], rate: 0.0 }] };
    assert!(check_sigma_monotonicity(&p, &s1, &varying, 1.0, &l1, 1e-6).unwrap().pass);
    let err = |r: crate::error::Result<CheckReport>| matches!(r, Err(Error::Precondition(_)));
    assert!(err(check_sigma_monotonicity(&p, &s2, &s1, 0.5, &l1, 1e-6)));
    assert!(err(check_sigma_monotonicity(&p, &s1, &s2, 1.5, &l1, 1e-6)));
    assert!(err(check_sigma_monotonicity(&p, &s1, &s2, 0.0, &l1, 1e-6)));
    let warm = reacting(0.0, 0.0);
    assert!(err(check_sigma_monotonicity(&warm, &s1, &s2, 0.5, &l1, 1e-6)));
    let r = explore_sigma_monotonicity(&warm, &s1, &s2, 0.5, &l1, 1e-6).unwrap();
    assert!(!r.in_hypothesis);
    assert!(explore_sigma_monotonicity(&p, &s1, &s2, 0.5, &l1, 1e-6).unwrap().in_hypothesis);
}

#[test]
fn barrier_certificate_on_positive_instances() {
    let cfg = SuiteConfig { nodes: 1601, steps: 128, ..SuiteConfig::new(11, 3) };
    for (i, kind) in [SigmaKind::Neumann, SigmaKind::Constant, SigmaKind::Varying].into_iter().enumerate() {
        let p = random_barrier_instance(&mut instance_rng(cfg.seed, i), &cfg, kind).unwrap();
        let u = solve_l1(&p).unwrap();
        let bp = BarrierParams::auto(&p, 1e-3).unwrap();
        let b0 = p.coeffs.b0.eval(0, [0.0, 0.0], 0.0);
        let neg = bp.psi.iter().flatten().fold(0.0_f64, |m, v| m.max(-v));
        assert!((bp.m - (1.0 + neg + 1.0 / b0)).abs() <= 1e-12 * bp.m);
        let r = barrier_certificate(&u, &p, &bp, 1e-5).unwrap();
        assert!(r.pass, "{kind:?}: {r:?}");
        assert_eq!(r.components.len(), 3);
        // ε = 0 leaves the plain equation residual of u
        let bare = BarrierParams { epsilon: 0.0, ..bp.clone() };
        let r = barrier_certificate(&u, &p, &bare, 1e-5).unwrap();
        assert!(r.components[0].worst_violation.abs() <= 1e-8, "{:?}", r.components[0]);
    }
}

#[test]
fn barrier_certificate_for_the_principal_mode() {
    let alpha = 0.7;
    let grid = SpaceGrid::interval(1.0, 201).unwrap();
    let tgrid = TimeGrid::graded_for(1.0, 128, alpha).unwrap();
    let coeffs = CoefficientSet::laplacian(1)
        .with_sigma(Profile::constant(1.0))
        .with_b0(Profile::constant(2.0))
        .with_reaction(Profile::constant(-2.0));
    let eig = eigendecompose(&assemble(&coeffs, &grid, Variant::A0, 0.0).unwrap(), 1).unwrap();
    let phi: Vec<f64> = eig.phi(0).iter().map(|v| v.max(0.0)).collect();
    let p = ProblemSpec::from_fns(alpha, grid.clone(), tgrid, coeffs, |_| 0.0, |_, _| 0.0).unwrap();
    let p = ProblemSpec { a: phi, ..p };
    let u = solve_l1(&p).unwrap();
    let bp = BarrierParams::auto(&p, 1e-3).unwrap();
    let r = barrier_certificate(&u, &p, &bp, 1e-5).unwrap();
    assert!(r.pass, "{r:?}");
}

#[test]
fn barrier_rejects_bad_parameters() {
    let cfg = SuiteConfig::new(5, 1);
    let p = random_barrier_instance(&mut instance_rng(5, 0), &cfg, SigmaKind::Constant).unwrap();
    let u = solve_l1(&p).unwrap();
    let bp = BarrierParams::auto(&p, 1e-3).unwrap();
    let pre = |r: crate::error::Result<CheckReport>| matches!(r, Err(Error::Precondition(_)));
    assert!(pre(barrier_certificate(&u, &p, &BarrierParams { m: -1.0, ..bp.clone() }, 1e-5)));
    let mut low = bp.clone();
    low.psi[3][7] = -2.0 * bp.m;
    assert!(pre(barrier_certificate(&u, &p, &low, 1e-5)));
    let mut short = bp.clone();
    short.psi.pop();
    assert!(matches!(barrier_certificate(&u, &p, &short, 1e-5), Err(Error::GridMismatch(_))));
    let not_a1 = p.with_coeffs(p.coeffs.clone().with_reaction(Profile::zero()));
    assert!(pre(barrier_certificate(&u, &not_a1, &bp, 1e-5)));
}

#[test]
fn extremum_probe() {
    let grid = TimeGrid::uniform(2.0, 400).unwrap();
    let y = TimeSignal::from_fn(&grid, |t| (t - 1.0).powi(2));
    let r = extremum_principle_probe(&y, 0.4, 1e-6).unwrap();
    assert!(r.pass && r.worst_violation > 0.0);
    assert_eq!(r.witness.it, 200);
    let flat = TimeSignal::from_fn(&grid, |_| 3.0);
    let r = extremum_principle_probe(&flat, 0.4, 1e-6).unwrap();
    assert!(r.pass && r.worst_violation == 0.0);
    let rising = TimeSignal::from_fn(&grid, |t| t);
    assert!(matches!(extremum_principle_probe(&rising, 0.4, 1e-6), Err(Error::Precondition(_))));
    let reports = extremum_suite(9, 20, 256, 1e-6).unwrap();
    assert!(reports.iter().all(|r| r.pass));
}

#[test]
fn suites_pass_and_repeat_bitwise() {
    let cfg = SuiteConfig::new(21, 6);
    for solver in [SolverChoice::spectral(), SolverChoice::L1] {
        let tol = solver.class_tolerance();
        let a = positivity_suite(&cfg, &solver, tol).unwrap();
        assert!(a.iter().all(|r| r.pass));
        assert_eq!(a, positivity_suite(&cfg, &solver, tol).unwrap());
        assert!(comparison_suite(&cfg, &solver, tol).unwrap().iter().all(|r| r.pass));
    }
    let other = positivity_suite(&SuiteConfig::new(22, 6), &SolverChoice::L1, L1_TOLERANCE).unwrap();
    assert_ne!(other, positivity_suite(&cfg, &SolverChoice::L1, L1_TOLERANCE).unwrap());
}

#[test]
fn nested_data_give_consistent_comparisons() {
    let base = reacting(-0.5, 1.0);
    let fields: Vec<Field> = [0.0, 0.3, 0.9]
        .iter()
        .map(|&s| {
            let mut p = base.clone();
            p.a.iter_mut().for_each(|v| *v += s);
            p.source.iter_mut().for_each(|v| *v += 2.0 * s);
            solve_l1(&p).unwrap()
        })
        .collect();
    let pass = |i: usize, j: usize| check_comparison(&fields[i], &fields[j], L1_TOLERANCE).unwrap().pass;
    assert!(pass(1, 0) && pass(2, 1) && pass(2, 0));
    assert!(!pass(0, 1) && !pass(1, 2) && !pass(0, 2));
}

proptest! {
    #[test]
    fn witness_attains_the_worst_margin(values in prop::collection::vec(-10.0f64..10.0, 9..60), tol in 0.0f64..1.0) {
        let n = 3;
        let len = values.len() / n * n;
        let u = flat_field(values[..len].to_vec());
        let r = check_positivity(&u, tol);
        prop_assert_eq!(u.get(r.witness.ix, r.witness.it), r.worst_violation);
        prop_assert!(u.values.iter().all(|&v| v >= r.worst_violation));
        prop_assert_eq!(r.pass, r.worst_violation >= -tol);
    }
}
