use std::sync::Arc;

use crate::error::Result;

use super::{MLParams, MittagLeffler, MlTable};

/// The five Mittag-Leffler evaluators behind every [`ModeKernel`] of one
/// order `α`. Build once (optionally tabulated) and share between modes.
#[derive(Debug, Clone)]
pub struct KernelFamily {
    alpha: f64,
    e_1: MlTable,
    e_a: MlTable,
    e_a1: MlTable,
    e_a2: MlTable,
    e_2: MlTable,
}

impl KernelFamily {
    pub fn new(alpha: f64) -> Result<Self> {
        Self::build(alpha, |ml| Ok(MlTable::direct(ml)))
    }

    /// Tabulates `E_{α,1}`, `E_{α,2}` and `E_{α,α}`, the functions evaluated
    /// at moderate arguments by the relaxation, the primitives and the kernel.
    pub fn tabulated(alpha: f64) -> Result<Self> {
        let mut fam = Self::new(alpha)?;
        fam.e_1 = MlTable::new(fam.e_1.inner().clone())?;
        fam.e_2 = MlTable::new(fam.e_2.inner().clone())?;
        fam.e_a = MlTable::new(fam.e_a.inner().clone())?;
        Ok(fam)
    }

    fn build(alpha: f64, wrap: impl Fn(MittagLeffler) -> Result<MlTable>) -> Result<Self> {
        let mk = |beta: f64| MLParams::new(alpha, beta).map(MittagLeffler::new).and_then(&wrap);
        Ok(Self {
            alpha,
            e_1: mk(1.0)?,
            e_a: mk(alpha)?,
            e_a1: mk(alpha + 1.0)?,
            e_a2: mk(alpha + 2.0)?,
            e_2: mk(2.0)?,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }
}

/// Modal time kernels for one eigenvalue `λ ≥ 0` and order `α`.
///
/// With `z = λsᵅ`:
///
/// | method              | value                                  |
/// |---------------------|----------------------------------------|
/// | `relaxation`        | `E_{α,1}(−z)`                          |
/// | `kernel`            | `s^{α−1} E_{α,α}(−z)`                  |
/// | `primitive`         | `∫₀ˢ kernel = sᵅ E_{α,α+1}(−z)`        |
/// | `second_primitive`  | `∫₀ˢ primitive = s^{α+1} E_{α,α+2}(−z)`|
///
/// For `z > 1` the primitives switch to `(1 − E_{α,1})/λ` and
/// `s(1 − E_{α,2})/λ`, which avoid dividing small differences by `λ`.
#[derive(Debug, Clone)]
pub struct ModeKernel {
    alpha: f64,
    lambda: f64,
    fam: Arc<KernelFamily>,
}

impl ModeKernel {
    pub fn new(alpha: f64, lambda: f64) -> Result<Self> {
        Ok(Self::from_family(Arc::new(KernelFamily::new(alpha)?), lambda))
    }

    pub fn from_family(fam: Arc<KernelFamily>, lambda: f64) -> Self {
        Self { alpha: fam.alpha, lambda, fam }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    fn z(&self, s: f64) -> f64 {
        self.lambda * s.powf(self.alpha)
    }

    pub fn relaxation(&self, s: f64) -> Result<f64> {
        self.fam.e_1.eval(-self.z(s))
    }

    /// Weakly singular kernel; callers must keep `s > 0`.
    pub fn kernel(&self, s: f64) -> Result<f64> {
        Ok(s.powf(self.alpha - 1.0) * self.fam.e_a.eval(-self.z(s))?)
    }

    pub fn primitive(&self, s: f64) -> Result<f64> {
        if s == 0.0 {
            return Ok(0.0);
        }
        let z = self.z(s);
        if z <= 1.0 {
            Ok(s.powf(self.alpha) * self.fam.e_a1.eval(-z)?)
        } else {
            Ok((1.0 - self.fam.e_1.eval(-z)?) / self.lambda)
        }
    }

    pub fn second_primitive(&self, s: f64) -> Result<f64> {
        if s == 0.0 {
            return Ok(0.0);
        }
        let z = self.z(s);
        if z <= 1.0 {
            Ok(s.powf(self.alpha + 1.0) * self.fam.e_a2.eval(-z)?)
        } else {
            Ok(s * (1.0 - self.fam.e_2.eval(-z)?) / self.lambda)
        }
    }

    /// `∫_{lo}^{hi} kernel(s) ds` for `0 ≤ lo ≤ hi`.
    pub fn segment(&self, lo: f64, hi: f64) -> Result<f64> {
        if hi == lo {
            return Ok(0.0);
        }
        if self.z(lo) > 1.0 {
            Ok((self.relaxation(lo)? - self.relaxation(hi)?) / self.lambda)
        } else {
            Ok(self.primitive(hi)? - self.primitive(lo)?)
        }
    }
}
