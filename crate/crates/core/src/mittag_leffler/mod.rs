//! Two-parameter Mittag-Leffler function `E_{α,β}(z) = Σ zᵏ/Γ(αk+β)` on the
//! real line, and the modal relaxation and resolvent kernels built from it.
//!
//! Evaluation picks among three branches:
//!
//! * Taylor series with compensated summation for small `|z|`, accepted only
//!   when the cancellation ratio `Σ|termₖ| / |sum|` stays below 100;
//! * the algebraic asymptotic expansion for large negative `z`, accepted when
//!   the truncation and the exponentially small remainder are both below
//!   working precision;
//! * the integral representation over the positive real axis (plus the
//!   exponential saddle term for `z > 0`), integrated by adaptive
//!   Gauss-Kronrod. For `β > 1` the recurrence
//!   `E_{α,β}(z) = (E_{α,β−α}(z) − 1/Γ(β−α))/z` first moves `β` into
//!   `(0, 1]`, where the integrand is smooth at the origin.

mod eval;
mod kernel;
mod table;

pub use eval::{Branch, MittagLeffler, MlConfig};
pub use kernel::{KernelFamily, ModeKernel};
pub use table::MlTable;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::special::rgamma;

/// Parameters `(α, β)` with `0 < α ≤ 1`, `β > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MLParams {
    alpha: f64,
    beta: f64,
}

impl MLParams {
    pub fn new(alpha: f64, beta: f64) -> Result<Self> {
        if !(alpha > 0.0 && alpha <= 1.0) {
            return Err(Error::Domain(format!("alpha = {alpha} not in (0, 1]")));
        }
        if !(beta > 0.0 && beta.is_finite()) {
            return Err(Error::Domain(format!("beta = {beta} must be positive")));
        }
        Ok(Self { alpha, beta })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }
}

/// Exact integral of the resolvent kernel `s^{α−1}E_{α,α}(−λsᵅ)` over
/// `[t_lo, t_hi]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelWeight {
    pub lambda: f64,
    pub t_lo: f64,
    pub t_hi: f64,
    pub value: f64,
}

/// `E_{α,β}(z)`.
pub fn ml(p: MLParams, z: f64) -> Result<f64> {
    MittagLeffler::new(p).eval(z)
}

fn check_nonneg(name: &str, v: f64) -> Result<()> {
    if v >= 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::Domain(format!("{name} = {v} must be finite and non-negative")))
    }
}

/// Relaxation profile `E_{α,1}(−λtᵅ)`.
pub fn relaxation(alpha: f64, lambda: f64, t: f64) -> Result<f64> {
    check_nonneg("lambda", lambda)?;
    check_nonneg("t", t)?;
    ml(MLParams::new(alpha, 1.0)?, -lambda * t.powf(alpha))
}

/// Resolvent kernel `t^{α−1}E_{α,α}(−λtᵅ)`, defined for `t > 0`.
pub fn k_kernel(alpha: f64, lambda: f64, t: f64) -> Result<f64> {
    check_nonneg("lambda", lambda)?;
    if !(t > 0.0 && t.is_finite()) {
        return Err(Error::Domain(format!("k_kernel is singular at t = {t}; use k_segment for integrals touching 0")));
    }
    Ok(t.powf(alpha - 1.0) * ml(MLParams::new(alpha, alpha)?, -lambda * t.powf(alpha))?)
}

/// `∫_{t_lo}^{t_hi} s^{α−1}E_{α,α}(−λsᵅ) ds`, which equals
/// `(E_{α,1}(−λt_loᵅ) − E_{α,1}(−λt_hiᵅ))/λ` for `λ > 0` and
/// `(t_hiᵅ − t_loᵅ)/Γ(α+1)` for `λ = 0`.
pub fn k_segment(alpha: f64, lambda: f64, t_lo: f64, t_hi: f64) -> Result<KernelWeight> {
    check_nonneg("lambda", lambda)?;
    check_nonneg("t_lo", t_lo)?;
    check_nonneg("t_hi", t_hi)?;
    if t_hi < t_lo {
        return Err(Error::Ordering { lo: t_lo, hi: t_hi });
    }
    MLParams::new(alpha, 1.0)?;
    let value = if lambda == 0.0 {
        (t_hi.powf(alpha) - t_lo.powf(alpha)) * rgamma(alpha + 1.0)
    } else {
        ModeKernel::new(alpha, lambda)?.segment(t_lo, t_hi)?
    };
    Ok(KernelWeight { lambda, t_lo, t_hi, value })
}
