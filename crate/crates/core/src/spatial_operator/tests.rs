use std::f64::consts::PI;

use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::*;
use crate::error::Error;

fn line(n: usize) -> SpaceGrid {
    SpaceGrid::interval(1.0, n).unwrap()
}

fn robin(sigma: f64) -> CoefficientSet {
    CoefficientSet::laplacian(1).with_sigma(Profile::constant(sigma))
}

fn lambda1(coeffs: &CoefficientSet, grid: &SpaceGrid) -> f64 {
    let op = assemble(coeffs, grid, Variant::A0, 0.0).unwrap();
    eigendecompose(&op, 1).unwrap().eigenvalues[0]
}

fn variable() -> CoefficientSet {
    CoefficientSet::laplacian(1)
        .with_conductivity(Profile::Cosine { base: 1.5, amplitude: 0.5, wavenumber: vec![3.0], phase: 0.2 })
        .with_drift(vec![Profile::Affine { value: 0.3, gradient: vec![-1.0], rate: 0.5 }])
        .with_reaction(Profile::Bump { base: 0.1, amplitude: 0.4, center: vec![0.3], width: 0.2 })
        .with_sigma(Profile::Affine { value: 0.5, gradient: vec![2.0], rate: 0.0 })
        .with_c0(0.7)
        .with_b0(Profile::constant(3.0))
}

#[test]
fn grid_validation() {
    assert!(SpaceGrid::interval(1.0, 2).is_err());
    assert!(SpaceGrid::interval(0.0, 10).is_err());
    assert!(SpaceGrid::rectangle(1.0, 5, 2.0, 2).is_err());
    let g = SpaceGrid::rectangle(1.0, 5, 2.0, 7).unwrap();
    assert_eq!(g.len(), 35);
    let total: f64 = g.weights().iter().sum();
    assert!((total - 2.0).abs() < 1e-14);
}

#[test]
fn neumann_laplacian_stencil() {
    let g = line(11);
    let op = assemble(&CoefficientSet::laplacian(1), &g, Variant::A0, 0.0).unwrap();
    let h2 = 0.01;
    for i in 0..g.len() {
        let sum: f64 = op.matrix.row_range(i).map(|j| op.matrix.get(i, j)).sum();
        assert!(sum.abs() < 1e-10, "row {i}: {sum}");
    }
    assert!((op.matrix.get(5, 5) - 2.0 / h2).abs() < 1e-9);
    assert!((op.matrix.get(5, 4) + 1.0 / h2).abs() < 1e-9);
    // ghost-node elimination doubles the inward coupling at the boundary
    assert!((op.matrix.get(0, 1) + 2.0 / h2).abs() < 1e-9);
}

#[test]
fn neumann_spectrum_matches_closed_form() {
    let n = 41;
    let g = line(n);
    let h = g.axes()[0].h();
    let op = assemble(&CoefficientSet::laplacian(1).with_c0(1.0), &g, Variant::A0, 0.0).unwrap();
    let eig = eigendecompose(&op, 8).unwrap();
    for (k, lam) in eig.eigenvalues.iter().enumerate() {
        let theta = k as f64 * PI * h;
        let want = 1.0 + 2.0 / (h * h) * (1.0 - theta.cos());
        assert!((lam - want).abs() < 1e-9 * want, "k = {k}: {lam} vs {want}");
        let continuum = 1.0 + (k as f64 * PI).powi(2);
        assert!((lam - continuum).abs() <= (k as f64 * PI).powi(4) * h * h / 12.0 + 1e-9);
    }
    assert!((eig.eigenvalues[0] - 1.0).abs() < 1e-10);
    for v in eig.phi(0) {
        assert!((v - 1.0).abs() < 1e-10);
    }
}

#[test]
fn symmetry_defect_of_a0() {
    let g = line(101);
    let op = assemble(&variable(), &g, Variant::A0, 0.4).unwrap();
    assert!(op.symmetric);
    assert!(op.symmetry_defect() <= 1e-12);
    let g2 = SpaceGrid::rectangle(1.0, 9, 0.5, 6).unwrap();
    let c2 = CoefficientSet::laplacian(2)
        .with_conductivity(Profile::Bump { base: 1.0, amplitude: 0.5, center: vec![0.5, 0.2], width: 0.3 })
        .with_sigma(Profile::constant(2.0));
    let op = assemble(&c2, &g2, Variant::A0, 0.0).unwrap();
    assert!(op.symmetry_defect() <= 1e-12);
    assert!(!assemble(&variable(), &g, Variant::FullA, 0.4).unwrap().symmetric);
}

#[test]
fn assembly_errors() {
    let g = line(11);
    let bad_a =
        CoefficientSet::laplacian(1).with_conductivity(Profile::Affine { value: 0.2, gradient: vec![-1.0], rate: 0.0 });
    assert!(matches!(assemble(&bad_a, &g, Variant::A0, 0.0), Err(Error::Coefficients(_))));
    assert!(matches!(assemble(&robin(-0.1), &g, Variant::A0, 0.0), Err(Error::Coefficients(_))));
    let bad_b0 = CoefficientSet::laplacian(1).with_b0(Profile::zero());
    assert!(matches!(assemble(&bad_b0, &g, Variant::A1, 0.0), Err(Error::Coefficients(_))));
    assert!(assemble(&bad_b0, &g, Variant::A0, 0.0).is_ok());
    let short = CoefficientSet::laplacian(1).with_reaction(Profile::Tabulated { values: vec![0.0; 3] });
    assert!(matches!(assemble(&short, &g, Variant::FullA, 0.0), Err(Error::GridMismatch(_))));
}

#[test]
fn eigendecompose_preconditions() {
    let g = line(6);
    let a0 = assemble(&CoefficientSet::laplacian(1), &g, Variant::A0, 0.0).unwrap();
    assert!(matches!(eigendecompose(&a0, 7), Err(Error::IndexOutOfRange { .. })));
    assert!(eigendecompose(&a0, 6).is_ok());
    let a1 = assemble(&CoefficientSet::laplacian(1), &g, Variant::A1, 0.0).unwrap();
    assert!(eigendecompose(&a1, 2).is_err());
}

#[test]
fn neumann_ground_state_is_normalized_constant() {
    let g = SpaceGrid::interval(2.0, 31).unwrap();
    let op = assemble(&CoefficientSet::laplacian(1).with_c0(1.0), &g, Variant::A0, 0.0).unwrap();
    let eig = eigendecompose(&op, 1).unwrap();
    assert!((eig.eigenvalues[0] - 1.0).abs() < 1e-12);
    let c = 1.0 / 2.0_f64.sqrt();
    assert!(eig.phi(0).iter().all(|v| (v - c).abs() < 1e-12));
}

#[test]
fn robin_ground_state_matches_transcendental_root() {
    // first root of (k² − σ²) sin k = 2kσ cos k, squared
    let lam = lambda1(&robin(1.0), &line(401));
    assert!((lam - 1.70705297555092248341).abs() < 1e-3, "{lam}");
}

#[test]
fn eigensystem_contract() {
    let g = line(201);
    let op = assemble(&variable(), &g, Variant::A0, 0.0).unwrap();
    let eig = eigendecompose(&op, 40).unwrap();
    assert!(eig.orthonormality_defect() <= 1e-10);
    assert!(eig.residual(&op) <= 1e-9);
    assert!(eig.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
    assert!(eig.eigenvalues[0] > 0.0);
    for k in 0..eig.count() {
        let phi = eig.phi(k);
        let big = phi.iter().fold(0.0_f64, |m, x| m.max(x.abs()));
        assert!(phi.iter().find(|x| x.abs() > 1e-8 * big).unwrap() > &0.0);
    }
    let c: Vec<f64> = (0..40).map(|k| 1.0 / (1.0 + k as f64)).collect();
    let back = eig.project(&eig.synthesize(&c));
    assert!(back.iter().zip(&c).all(|(a, b)| (a - b).abs() < 1e-10));
}

#[test]
fn two_dimensional_neumann_spectrum_is_a_sum() {
    let (gx, gy) = (line(9), SpaceGrid::interval(0.5, 7).unwrap());
    let g = SpaceGrid::rectangle(1.0, 9, 0.5, 7).unwrap();
    let ex = eigendecompose(&assemble(&CoefficientSet::laplacian(1), &gx, Variant::A0, 0.0).unwrap(), 9).unwrap();
    let ey = eigendecompose(&assemble(&CoefficientSet::laplacian(1), &gy, Variant::A0, 0.0).unwrap(), 7).unwrap();
    let mut sums: Vec<f64> = ex.eigenvalues.iter().flat_map(|a| ey.eigenvalues.iter().map(move |b| a + b)).collect();
    sums.sort_by(f64::total_cmp);
    let op = assemble(&CoefficientSet::laplacian(2), &g, Variant::A0, 0.0).unwrap();
    let e2 = eigendecompose(&op, 63).unwrap();
    for (a, b) in e2.eigenvalues.iter().zip(&sums) {
        assert!((a - b).abs() < 1e-9 * (1.0 + b));
    }
}

#[test]
fn divergence_form_is_second_order() {
    let a = Profile::Affine { value: 1.0, gradient: vec![0.8], rate: 0.0 };
    let coeffs = CoefficientSet::laplacian(1).with_conductivity(a);
    // v = sin(2x) + x², a = 1 + 0.8x, at x = 0.5
    let exact = |x: f64| {
        let (v1, v2) = (2.0 * (2.0 * x).cos() + 2.0 * x, -4.0 * (2.0 * x).sin() + 2.0);
        -(0.8 * v1 + (1.0 + 0.8 * x) * v2)
    };
    let err = |n: usize| {
        let g = line(n);
        let op = assemble(&coeffs, &g, Variant::A0, 0.0).unwrap();
        let v: Vec<f64> = g.points().iter().map(|p| (2.0 * p[0]).sin() + p[0] * p[0]).collect();
        let mid = (n - 1) / 2;
        (op.apply(&v)[mid] - exact(0.5)).abs()
    };
    let (e1, e2, e3) = (err(21), err(41), err(81));
    for r in [e1 / e2, e2 / e3] {
        assert!((3.5..4.5).contains(&r), "ratios {} {}", e1 / e2, e2 / e3);
    }
}

#[test]
fn robin_limits() {
    let g = line(401);
    let neumann = assemble(&robin(0.0), &g, Variant::A0, 0.0).unwrap();
    let tiny = assemble(&robin(1e-13), &g, Variant::A0, 0.0).unwrap();
    for i in 0..g.len() {
        for j in neumann.matrix.row_range(i) {
            assert!((neumann.matrix.get(i, j) - tiny.matrix.get(i, j)).abs() < 1e-9);
        }
    }
    let lams: Vec<f64> = [0.0, 1.0, 10.0, 100.0].iter().map(|&s| lambda1(&robin(s), &g)).collect();
    assert!(lams.windows(2).all(|w| w[0] < w[1]), "{lams:?}");
    assert!(lams[3] < PI * PI);
    assert!((lams[2] - 6.90467818111709389057).abs() < 1e-3);
    assert!((lams[3] - 9.48647320435467106072).abs() < 1e-3);
}

#[test]
fn c0_shifts_the_spectrum() {
    let g = line(81);
    let base = variable().with_c0(0.0);
    let e0 = eigendecompose(&assemble(&base, &g, Variant::A0, 0.0).unwrap(), 20).unwrap();
    let e1 = eigendecompose(&assemble(&base.with_c0(2.5), &g, Variant::A0, 0.0).unwrap(), 20).unwrap();
    for (a, b) in e0.eigenvalues.iter().zip(&e1.eigenvalues) {
        assert!((b - a - 2.5).abs() < 1e-9 * (1.0 + b));
    }
}

#[test]
fn full_operator_is_a0_minus_lower_order() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for grid in [line(33), SpaceGrid::rectangle(1.0, 6, 1.5, 5).unwrap()] {
        let coeffs = if grid.dim() == 1 {
            variable()
        } else {
            CoefficientSet::laplacian(2)
                .with_drift(vec![
                    Profile::constant(0.5),
                    Profile::Affine { value: 0.0, gradient: vec![1.0, -1.0], rate: 0.0 },
                ])
                .with_reaction(Profile::constant(-0.2))
                .with_sigma(Profile::constant(0.3))
                .with_c0(1.1)
        };
        let t = 0.6;
        let full = assemble(&coeffs, &grid, Variant::FullA, t).unwrap();
        let a0 = assemble(&coeffs, &grid, Variant::A0, t).unwrap();
        let q = LowerOrder::new(&coeffs, &grid);
        assert!(!q.is_zero(t));
        let u: Vec<f64> = (0..grid.len()).map(|_| rng.random_range(-1.0..1.0)).collect();
        let mut qu = vec![0.0; u.len()];
        q.apply(t, &u, &mut qu);
        let lhs = full.apply(&u);
        let rhs = a0.apply(&u);
        for i in 0..u.len() {
            assert!((lhs[i] - (rhs[i] - qu[i])).abs() < 1e-10 * (1.0 + rhs[i].abs()));
        }
    }
    assert!(LowerOrder::new(&CoefficientSet::laplacian(1), &line(5)).is_zero(0.0));
}

#[test]
fn drift_uses_robin_derivative_on_the_boundary() {
    let g = line(201);
    let coeffs = robin(2.0).with_drift(vec![Profile::constant(1.0)]);
    let q = LowerOrder::new(&coeffs, &g);
    // u = cosh-type function satisfying u'(0) = 2u(0)
    let u: Vec<f64> = g.points().iter().map(|p| (2.0 * p[0]).exp()).collect();
    let mut out = vec![0.0; u.len()];
    q.apply(0.0, &u, &mut out);
    assert!((out[0] - 2.0).abs() < 1e-12);
    assert!((out[100] - 2.0 * 1.0_f64.exp()).abs() < 1e-3);
}

#[test]
fn coercivity_of_the_shifted_laplacian() {
    let g = line(101);
    let op = assemble(&CoefficientSet::laplacian(1), &g, Variant::A1, 0.0).unwrap();
    let k = coercivity_check(&op, 50).unwrap();
    assert!(k >= 1.0 - 1e-10, "{k}");
    assert!(coercivity_check(&assemble(&CoefficientSet::laplacian(1), &g, Variant::A0, 0.0).unwrap(), 5).is_err());
}

#[test]
fn coercivity_with_drift_and_large_b0() {
    let g = line(101);
    let drift = CoefficientSet::laplacian(1).with_drift(vec![Profile::Cosine {
        base: 4.0,
        amplitude: 2.0,
        wavenumber: vec![5.0],
        phase: 0.0,
    }]);
    let weak = assemble_unchecked(&drift.clone().with_b0(Profile::constant(1e-3)), &g, Variant::A1, 0.0);
    let strong = assemble(&drift.clone().with_b0(Profile::constant(50.0)), &g, Variant::A1, 0.0).unwrap();
    assert!(coercivity_check(&strong, 20).unwrap() > 0.0);
    assert!(coercivity_check(&weak, 20).unwrap() < coercivity_check(&strong, 20).unwrap());
    let th = coercivity_threshold(&drift, &g, 0.0, 1e-3).unwrap();
    assert!(th > 0.0);
    let above = assemble(&drift.clone().with_b0(Profile::constant(1.01 * th)), &g, Variant::A1, 0.0).unwrap();
    assert!(coercivity_check(&above, 20).unwrap() > 0.0);
    let below = assemble_unchecked(&drift.with_b0(Profile::constant(0.98 * th)), &g, Variant::A1, 0.0);
    assert!(coercivity_check(&below, 20).unwrap() <= 0.0);
}

#[test]
fn negative_b0_fails_on_constants() {
    let g = line(51);
    let op = assemble_unchecked(&CoefficientSet::laplacian(1).with_b0(Profile::constant(-1.0)), &g, Variant::A1, 0.0);
    assert!(coercivity_check(&op, 0).unwrap() < 0.0);
    let threshold = coercivity_threshold(&CoefficientSet::laplacian(1), &g, 0.0, 1e-6).unwrap();
    assert!(threshold < 1e-5);
}

fn psi_exact(b0: f64, x: f64) -> f64 {
    // −ψ'' + b0ψ = 1 on [0, 1], −ψ'(0) = ψ'(1) = 1
    let r = b0.sqrt();
    1.0 / b0 + (r * (x - 0.5)).cosh() / (r * (0.5 * r).sinh())
}

#[test]
fn psi_matches_closed_form() {
    let g = line(2001);
    let psi = solve_psi(&CoefficientSet::laplacian(1), &g, 0.0).unwrap();
    for (p, v) in g.points().iter().zip(&psi) {
        assert!((v - psi_exact(1.0, p[0])).abs() < 1e-6);
    }
    let op = assemble(&CoefficientSet::laplacian(1), &g, Variant::A1, 0.0).unwrap();
    let r = op.apply(&psi);
    for i in 1..g.len() - 1 {
        assert!((r[i] - 1.0).abs() <= 1e-10 * g.len() as f64);
    }
}

#[test]
fn psi_for_large_b0() {
    let b0 = 1e3;
    let g = line(2001);
    let psi = solve_psi(&CoefficientSet::laplacian(1).with_b0(Profile::constant(b0)), &g, 0.0).unwrap();
    for (p, v) in g.points().iter().zip(&psi) {
        assert!((v - psi_exact(b0, p[0])).abs() < 1e-4 * psi_exact(b0, p[0]));
        if (0.4..=0.6).contains(&p[0]) {
            assert!((v - 1.0 / b0).abs() <= 1.0 / (b0 * b0));
        }
    }
}

#[test]
fn psi_with_robin_and_drift_satisfies_system() {
    let g = SpaceGrid::rectangle(1.0, 15, 1.0, 12).unwrap();
    let c = CoefficientSet::laplacian(2)
        .with_drift(vec![Profile::constant(1.0), Profile::constant(-0.5)])
        .with_sigma(Profile::constant(0.5))
        .with_b0(Profile::constant(4.0));
    let psi = solve_psi(&c, &g, 0.0).unwrap();
    assert!(psi.iter().all(|v| v.is_finite() && *v > 0.0));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn a0_is_symmetric_and_positive(
        base in 0.5f64..3.0,
        amp in 0.0f64..0.45,
        k in 0.0f64..8.0,
        sigma in 0.0f64..20.0,
        c0 in 0.0f64..5.0,
        n in 5usize..60,
    ) {
        let g = line(n);
        let c = CoefficientSet::laplacian(1)
            .with_conductivity(Profile::Cosine { base, amplitude: amp * base, wavenumber: vec![k], phase: 0.0 })
            .with_sigma(Profile::constant(sigma))
            .with_c0(c0);
        let op = assemble(&c, &g, Variant::A0, 0.0).unwrap();
        prop_assert!(op.symmetry_defect() <= 1e-12 * (1.0 + (n * n) as f64 * base));
        let eig = eigendecompose(&op, n.min(5)).unwrap();
        prop_assert!(eig.eigenvalues[0] >= c0 - 1e-9 * (1.0 + eig.eigenvalues[n.min(5) - 1]));
        prop_assert!(eig.orthonormality_defect() <= 1e-10);
    }
}

#[test]
fn profile_json_forms() {
    let p: Profile = serde_json::from_str(r#"{"type": "time_power", "scale": 1.5, "exponent": 0.5}"#).unwrap();
    assert_eq!(p.eval(3, [0.2, 0.0], 4.0), 3.0);
    assert_eq!(p.eval(0, [0.0, 0.0], 0.0), 0.0);
    let q: Profile = serde_json::from_str(
        r#"{"type": "sum", "terms": [{"type": "constant", "value": 1.0}, {"type": "affine", "value": 0.0, "gradient": [2.0]}]}"#,
    )
    .unwrap();
    assert_eq!(q.eval(0, [0.25, 0.0], 0.0), 1.5);
    assert_eq!(serde_json::from_str::<Profile>(&serde_json::to_string(&q).unwrap()).unwrap(), q);
}
