//! Numerical toolkit for time-fractional diffusion equations
//! `∂ₜᵅ(u − a) + Au = F` with Robin boundary conditions.
//!
//! The crate is organised bottom-up:
//!
//! - [`mittag_leffler`]: `E_{α,β}` on the real line and the relaxation and
//!   resolvent kernels built from it.
//! - [`fractional_calculus`]: Riemann-Liouville integrals and L1 Caputo
//!   derivatives of sampled signals on uniform or graded time grids.
//! - [`spatial_operator`]: finite-difference realisations of the elliptic
//!   operators with conormal Robin closure, their eigensystems, a discrete
//!   coercivity estimate and the auxiliary `ψ` problem.
//! - [`solvers`]: a spectral mild-solution solver (Picard iteration on the
//!   Duhamel formula) and an independent implicit L1 time stepper.
//! - [`comparison_harness`]: positivity, comparison and barrier checks on
//!   discrete solutions, plus seeded random instance suites.

// NaN must fail the checks, so `!(x >= y)` is intended.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
// Quadrature nodes are kept as published; index loops mirror the formulas.
#![allow(clippy::excessive_precision, clippy::needless_range_loop)]

pub mod comparison_harness;
pub mod error;
pub mod fractional_calculus;
pub mod mittag_leffler;
pub mod quadrature;
pub mod solvers;
pub mod spatial_operator;
pub mod special;

pub use comparison_harness::{BarrierParams, CheckReport, SolverChoice, Witness};
pub use error::{Error, Result};
pub use fractional_calculus::{TimeGrid, TimeGridKind, TimeSignal};
pub use mittag_leffler::{KernelWeight, MLParams};
pub use solvers::{sha256_hex, Field, ModeResponse, ProblemSpec, Producer, SpectralSolver};
pub use spatial_operator::{CoefficientSet, DiscreteOperator, EigenSystem, Profile, SpaceGrid, Variant};
