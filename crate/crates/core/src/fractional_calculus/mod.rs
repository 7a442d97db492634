//! Riemann-Liouville fractional integrals and L1 Caputo derivatives of
//! sampled signals on uniform, graded or arbitrary time grids.
//!
//! `J^β` uses product integration against the piecewise linear interpolant,
//! with the kernel moments in closed form (binomial series when the segment
//! is short relative to its distance from the evaluation node). The L1
//! derivative at `t_k` is `Σ_j w_{k,j}(y_{j+1} − y_j)` with
//! `w_{k,j} = ((t_k − t_j)^{1−α} − (t_k − t_{j+1})^{1−α}) / (Γ(2−α) h_j)`;
//! it has no value at `t₀`.

mod grid;
mod ops;

pub use grid::{NodalDerivative, TimeGrid, TimeGridKind, TimeSignal};
pub use ops::{caputo_l1, check_inverse, l1_weights, rl_integral, rl_of_power, rl_weights, L1Weights};
pub(crate) use ops::{linear_moments, pow_diff};
