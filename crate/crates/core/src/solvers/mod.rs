//! Two independent solvers for `∂ₜᵅ(u − a) + Au = F` with `A = A0 − Q`.
//!
//! * [`solve_mild`] expands in the eigenbasis of `A0`. Each mode evolves as
//!   `uₙ(t) = E_{α,1}(−λₙtᵅ)aₙ + (Lₙgₙ)(t)` where `gₙ` is the projection of
//!   `F + Qu`, and the lower-order part `Qu` is resolved by Picard sweeps.
//! * [`solve_l1`] steps the L1 discretisation implicitly with the full
//!   operator `A(t_k)` and never touches the Mittag-Leffler code, so the two
//!   can check each other.
//!
//! Both work with `v = u − a`, so `v(·, 0) = 0` holds exactly.

mod l1;
mod problem;
mod spectral;

pub use l1::{l1_scalar, picard_sequence, solve_l1};
pub use problem::sha256_hex;
pub use problem::{Field, ProblemSpec, Producer};
pub use spectral::{mode_response, propagate_s, solve_mild, ModeResponse, SpectralSolver};
