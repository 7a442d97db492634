//! Discrete certificates for the positivity and comparison statements.
//!
//! Every check returns a [`CheckReport`] with the worst signed margin over
//! the lattice and the node where it occurs. Hypotheses that a statement
//! needs are enforced as [`Error::Precondition`](crate::error::Error), so a
//! broken hypothesis is never mistaken for a failed check.

mod barrier;
mod checks;
mod report;
mod suite;

pub use barrier::{barrier_certificate, BarrierParams};
pub use checks::{
    check_c_monotonicity, check_comparison, check_example_bound, check_positivity, check_sigma_monotonicity,
    explore_sigma_monotonicity, extremum_principle_probe,
};
pub use report::{CheckReport, SolverChoice, Witness, L1_TOLERANCE, SPECTRAL_TOLERANCE};
pub use suite::{
    barrier_suite, c_monotonicity_suite, comparison_suite, extremum_suite, instance_rng, positivity_suite,
    random_barrier_instance, random_instance, random_trig_signal, sigma_monotonicity_suite, SigmaKind, SuiteConfig,
};

#[cfg(test)]
mod tests;
