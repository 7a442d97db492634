//! Finite-difference realisations of `A`, `A0` and `A1` on 1D intervals and
//! 2D rectangles with the conormal Robin closure `∂_{ν_A}u + σu = 0`.
//!
//! The divergence term uses the half-cell (vertex-centred finite volume)
//! form: face conductances `a(x_{i+1/2})/h`, trapezoid weights `W`, and the
//! Robin term `σ|Γᵢ|` on boundary rows. For constant `a` this is exactly the
//! centred ghost-node elimination of the Robin condition, and `W·A0` is
//! symmetric by construction. First derivatives are centred, with the
//! normal derivative on the boundary taken from the Robin condition.

mod assemble;
mod banded;
mod coeffs;
mod coercivity;
mod eigen;
mod grid;

pub use assemble::{assemble, assemble_unchecked, DiscreteOperator, Gradient, LowerOrder, Variant};
pub use banded::{BandLu, BandMatrix};
pub use coeffs::{CoefficientSet, Profile};
pub use coercivity::{coercivity_check, coercivity_threshold, solve_psi};
pub use eigen::{eigendecompose, EigenSystem};
pub use grid::{Axis, SpaceGrid};

#[cfg(test)]
mod tests;
