//! Shared fixtures for the criterion benches.

use fracdiff_core::{CoefficientSet, ProblemSpec, Profile, SpaceGrid, TimeGrid};

/// Robin problem on `[0, 1]` with varying conductivity, a bump initial
/// value and a time-dependent source.
pub fn robin_problem(alpha: f64, nodes: usize, steps: usize) -> ProblemSpec {
    let grid = SpaceGrid::interval(1.0, nodes).expect("grid");
    let tgrid = TimeGrid::graded_for(1.0, steps, alpha).expect("time grid");
    let coeffs = CoefficientSet::laplacian(1)
        .with_conductivity(Profile::Cosine {
            base: 1.0,
            amplitude: 0.5,
            wavenumber: vec![std::f64::consts::PI],
            phase: 0.0,
        })
        .with_reaction(Profile::constant(-1.0))
        .with_sigma(Profile::constant(1.0));
    ProblemSpec::from_fns(alpha, grid, tgrid, coeffs, |x| (-(x[0] - 0.3).powi(2) / 0.02).exp(), |_, t| 1.0 + t.sin())
        .expect("problem")
}

/// Points spread over the negative axis, where the kernels evaluate.
pub fn negative_points(count: usize, x_max: f64) -> Vec<f64> {
    (0..count).map(|i| -x_max * (i as f64 / (count - 1) as f64).powi(2)).collect()
}
