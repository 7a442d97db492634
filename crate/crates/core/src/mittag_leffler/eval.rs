//! Branch selection and the individual evaluation branches for `E_{α,β}`.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::quadrature;
use crate::special::{ln_gamma, rgamma, sin_pi};

use super::MLParams;

/// Switchover thresholds between evaluation branches.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MlConfig {
    /// The Taylor series is attempted for `|z|` up to this radius.
    pub series_radius: f64,
    /// The asymptotic expansion is attempted for `z ≤ −asymptotic_radius`.
    pub asymptotic_radius: f64,
    /// Largest positive argument accepted.
    pub positive_cap: f64,
}

impl Default for MlConfig {
    fn default() -> Self {
        Self { series_radius: 5.0, asymptotic_radius: 15.0, positive_cap: 50.0 }
    }
}

/// Which branch produced a value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Branch {
    ClosedForm,
    Series,
    Asymptotic,
    Integral,
    Recurrence,
}

// Series acceptance: the summed magnitudes may exceed the result by at most
// this factor (each term carries ~1e-15 relative error).
const SERIES_CANCELLATION_LIMIT: f64 = 100.0;
const TERM_CUTOFF: f64 = 1e-17;
const ASYMPTOTIC_TERMS: usize = 120;
const LN_MAX: f64 = 709.78;

/// Evaluator for `E_{α,β}` with precomputed series and asymptotic coefficients.
///
/// Construction is comparatively expensive (a few hundred `1/Γ` evaluations),
/// evaluation is cheap; hold one per `(α, β)` in hot loops.
#[derive(Debug, Clone)]
pub struct MittagLeffler {
    alpha: f64,
    beta: f64,
    config: MlConfig,
    series: Vec<f64>,
    asymptotic: Vec<f64>,
    /// Smooth majorant of `|asymptotic[k]|`, free of the zeros at the poles
    /// of Γ, used for the truncation decision.
    envelope: Vec<f64>,
    /// `E_{α,β−α}` for the downward recurrence when `β > 1`.
    lower: Option<Box<MittagLeffler>>,
}

impl MittagLeffler {
    pub fn new(params: MLParams) -> Self {
        Self::with_config(params, MlConfig::default())
    }

    pub fn with_config(params: MLParams, config: MlConfig) -> Self {
        let (alpha, beta) = (params.alpha(), params.beta());
        let terms = if alpha == 1.0 { 200 } else { ((22.0 / alpha).ceil() as usize + 20).min(5000) };
        let series = (0..terms).map(|k| rgamma(alpha * k as f64 + beta)).collect();
        let asymptotic: Vec<f64> = (1..=ASYMPTOTIC_TERMS).map(|k| rgamma(beta - alpha * k as f64)).collect();
        // 1/Γ(β−αk) = Γ(1−β+αk)·sin(π(β−αk))/π
        let envelope = asymptotic
            .iter()
            .enumerate()
            .map(|(i, c)| {
                let s = 1.0 - beta + alpha * (i + 1) as f64;
                let env = if s >= 1.0 { (ln_gamma(s) - PI.ln()).exp() } else { 0.0 };
                env.max(c.abs())
            })
            .collect();
        let lower = (alpha < 1.0 && beta > 1.0)
            .then(|| Box::new(Self::with_config(MLParams::new(alpha, beta - alpha).expect("β−α > 0"), config)));
        Self { alpha, beta, config, series, asymptotic, envelope, lower }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn eval(&self, z: f64) -> Result<f64> {
        self.eval_with_branch(z).map(|(v, _)| v)
    }

    /// Evaluates and reports which branch was used.
    pub fn eval_with_branch(&self, z: f64) -> Result<(f64, Branch)> {
        if !z.is_finite() {
            return Err(Error::Domain(format!("non-finite argument {z}")));
        }
        if z > self.config.positive_cap {
            return Err(Error::Domain(format!("argument {z} exceeds the positive cap {}", self.config.positive_cap)));
        }
        if z == 0.0 {
            return Ok((self.series[0], Branch::ClosedForm));
        }
        if self.alpha == 1.0 {
            return self.eval_unit_alpha(z);
        }
        if z.abs() <= 1.0 {
            return Ok((self.series_sum(z).0, Branch::Series));
        }
        if z < 0.0 {
            if -z <= self.config.series_radius {
                if let Some(v) = self.series(z) {
                    return Ok((v, Branch::Series));
                }
            }
            if -z >= self.config.asymptotic_radius {
                if let Some(v) = self.asymptotic(z) {
                    return Ok((v, Branch::Asymptotic));
                }
            }
            return match &self.lower {
                Some(lower) => Ok(((lower.eval(z)? - rgamma(self.beta - self.alpha)) / z, Branch::Recurrence)),
                None => Ok((self.integral(z), Branch::Integral)),
            };
        }
        // 1 < z ≤ cap
        let ln_main = -self.alpha.ln() + (1.0 - self.beta) / self.alpha * z.ln() + z.powf(1.0 / self.alpha);
        if ln_main > LN_MAX {
            return Err(Error::Overflow(format!("E_{{{},{}}}({z}) ~ exp({ln_main:.1})", self.alpha, self.beta)));
        }
        if z <= self.config.series_radius {
            if let Some(v) = self.series(z) {
                return Ok((v, Branch::Series));
            }
        }
        match &self.lower {
            Some(lower) => Ok(((lower.eval(z)? - rgamma(self.beta - self.alpha)) / z, Branch::Recurrence)),
            None => Ok((ln_main.exp() + self.integral(z), Branch::Integral)),
        }
    }

    fn series_sum(&self, z: f64) -> (f64, f64, bool) {
        let mut sum = 0.0;
        let mut comp = 0.0;
        let mut abs_sum = 0.0;
        let mut power = 1.0;
        let mut converged = false;
        for (k, c) in self.series.iter().enumerate() {
            let term = c * power;
            // Neumaier compensated summation
            let t = sum + term;
            if sum.abs() >= term.abs() {
                comp += (sum - t) + term;
            } else {
                comp += (term - t) + sum;
            }
            sum = t;
            abs_sum += term.abs();
            if k >= 2 && term.abs() <= TERM_CUTOFF * (sum + comp).abs() {
                converged = true;
                break;
            }
            power *= z;
            if !power.is_finite() {
                break;
            }
        }
        (sum + comp, abs_sum, converged)
    }

    /// Taylor series branch; `None` when it has not converged or loses too
    /// many digits to cancellation.
    pub fn series(&self, z: f64) -> Option<f64> {
        let (v, abs_sum, converged) = self.series_sum(z);
        (converged && abs_sum <= SERIES_CANCELLATION_LIMIT * v.abs()).then_some(v)
    }

    /// Algebraic asymptotic expansion `−Σ z^{−k}/Γ(β−αk)` for `z < 0`; `None`
    /// when the truncated series or the neglected exponentially small part is
    /// not below working precision.
    pub fn asymptotic(&self, z: f64) -> Option<f64> {
        if z >= 0.0 {
            return None;
        }
        let x = -z;
        let inv = 1.0 / z;
        let mut power = 1.0;
        let mut sum = 0.0;
        let mut prev = f64::INFINITY;
        let mut converged = false;
        for (c, env) in self.asymptotic.iter().zip(&self.envelope) {
            power *= inv;
            let bound = env * power.abs();
            if bound > prev {
                return None;
            }
            prev = bound;
            sum -= c * power;
            if bound <= TERM_CUTOFF * sum.abs() {
                converged = true;
                break;
            }
        }
        if !converged || sum == 0.0 {
            return None;
        }
        let ln_x = x.ln();
        let ln_remainder = if self.alpha == 1.0 {
            -x + (1.0 - self.beta) * ln_x
        } else {
            -x.powf(1.0 / self.alpha) + ((1.0 - self.beta) / self.alpha * ln_x).max(0.0)
                - (self.alpha * sin_pi(self.alpha)).ln()
        };
        (ln_remainder < (1e-16 * sum.abs()).ln()).then_some(sum)
    }

    /// Integral representation `∫₀^∞ K(α,β,χ,z) dχ` (valid for `0 < α < 1`,
    /// `β < 1 + α`); for `z > 0` the exponential part must be added.
    pub fn integral(&self, z: f64) -> f64 {
        let (a, b) = (self.alpha, self.beta);
        let pref = 1.0 / (a * PI);
        let s1 = sin_pi(1.0 - b);
        let s2 = sin_pi(1.0 - b + a);
        let cos_a = (PI * a).cos();
        let p = (1.0 - b) / a;
        let inv_a = 1.0 / a;
        let kern = move |chi: f64| {
            if chi <= 0.0 {
                return if p == 0.0 { pref * (-z * s2) / (z * z) } else { 0.0 };
            }
            let weight = if p == 0.0 { 1.0 } else { chi.powf(p) };
            let num = chi * s1 - z * s2;
            let den = chi * chi - 2.0 * chi * z * cos_a + z * z;
            pref * weight * (-chi.powf(inv_a)).exp() * num / den
        };
        let chi_max = 50.0_f64.powf(a);
        let peak = -z * cos_a;
        let width = z.abs() * sin_pi(a);
        let mut points = vec![0.0, chi_max];
        if peak > 0.0 {
            for off in [-4.0, -1.0, 0.0, 1.0, 4.0] {
                let p = peak + off * width;
                if p > 0.0 && p < chi_max {
                    points.push(p);
                }
            }
        }
        if chi_max > 1.0 {
            points.push(1.0);
        }
        points.sort_by(f64::total_cmp);
        points.dedup();
        quadrature::integrate(kern, &points, 0.0, 2e-16, 400).value
    }

    fn eval_unit_alpha(&self, z: f64) -> Result<(f64, Branch)> {
        let b = self.beta;
        if b == 1.0 {
            return Ok((z.exp(), Branch::ClosedForm));
        }
        if b == 2.0 {
            return Ok((z.exp_m1() / z, Branch::ClosedForm));
        }
        if z > 0.0 {
            let (v, _, converged) = self.series_sum(z);
            if !converged || !v.is_finite() {
                return Err(Error::Overflow(format!("E_{{1,{b}}}({z})")));
            }
            return Ok((v, Branch::Series));
        }
        if -z <= self.config.series_radius {
            if let Some(v) = self.series(z) {
                return Ok((v, Branch::Series));
            }
        }
        if -z >= self.config.asymptotic_radius {
            if let Some(v) = self.asymptotic(z) {
                return Ok((v, Branch::Asymptotic));
            }
        }
        // Kummer transformation: E_{1,β}(−x) = e^{−x} ₁F₁(β−1; β; x)/Γ(β),
        // a Poisson-weighted sum of positive-or-same-sign terms.
        let x = -z;
        let kmax = (x + 40.0 * x.sqrt() + 60.0) as usize;
        let ln_x = x.ln();
        let mut sum = 0.0;
        for k in 0..=kmax {
            let kf = k as f64;
            let weight = if k == 0 { 1.0 } else { (b - 1.0) / (b - 1.0 + kf) };
            sum += weight * (-x + kf * ln_x - ln_gamma(kf + 1.0)).exp();
        }
        Ok((rgamma(b) * sum, Branch::Integral))
    }
}
