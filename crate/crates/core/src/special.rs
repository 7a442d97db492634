//! Gamma function family on the real line, built on `libm::tgamma` and
//! `libm::lgamma` with exact handling of the poles.

use std::f64::consts::PI;

/// Largest argument for which `Γ(x)` is finite in `f64`.
pub const GAMMA_MAX_ARG: f64 = 171.624_376_956_302_7;

/// `sin(πx)` with exact argument reduction, so that it vanishes at integers.
pub fn sin_pi(x: f64) -> f64 {
    let r = x.rem_euclid(2.0);
    if r <= 0.25 {
        (PI * r).sin()
    } else if r <= 0.75 {
        (PI * (r - 0.5)).cos()
    } else if r <= 1.25 {
        -(PI * (r - 1.0)).sin()
    } else if r <= 1.75 {
        -(PI * (r - 1.5)).cos()
    } else {
        (PI * (r - 2.0)).sin()
    }
}

/// `Γ(x)` for real `x`. Returns `NaN` at the poles and `±∞` on overflow.
pub fn gamma(x: f64) -> f64 {
    if x <= 0.0 && x == x.floor() {
        return f64::NAN;
    }
    libm::tgamma(x)
}

/// `1/Γ(x)`, an entire function: exactly zero at the non-positive integers.
pub fn rgamma(x: f64) -> f64 {
    if x <= 0.0 && x == x.floor() {
        return 0.0;
    }
    if x < 0.5 {
        return gamma(1.0 - x) * sin_pi(x) / PI;
    }
    if x > GAMMA_MAX_ARG {
        return (-ln_gamma(x)).exp();
    }
    1.0 / gamma(x)
}

/// `ln Γ(x)` for `x > 0`.
pub fn ln_gamma(x: f64) -> f64 {
    debug_assert!(x > 0.0);
    libm::lgamma(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn factorials_are_reproduced() {
        let mut fact = 1.0_f64;
        for n in 1..=170 {
            assert!(rel(gamma(n as f64), fact) < 1e-13, "Γ({n})");
            fact *= n as f64;
        }
    }

    #[test]
    fn half_integer_values() {
        let sqrt_pi = PI.sqrt();
        assert!(rel(gamma(0.5), sqrt_pi) < 1e-15);
        assert!(rel(gamma(1.5), sqrt_pi / 2.0) < 1e-15);
        assert!(rel(gamma(-0.5), -2.0 * sqrt_pi) < 1e-15);
        assert!(rel(gamma(-1.5), 4.0 * sqrt_pi / 3.0) < 1e-15);
    }

    #[test]
    fn reference_values() {
        // mpmath, 30 digits
        assert!(rel(gamma(0.3), 2.991_568_987_687_590_9) < 1e-14);
        assert!(rel(gamma(1.7), 0.908_638_732_853_290_4) < 1e-14);
        assert!(rel(gamma(33.3), 7.487_577_596_522_632e35) < 1e-13);
        assert!(rel(gamma(150.25), 1.332_150_776_195_163_5e261) < 1e-13);
    }

    #[test]
    fn reciprocal_vanishes_at_poles() {
        for n in 0..20 {
            assert_eq!(rgamma(-(n as f64)), 0.0);
        }
        assert!(rel(rgamma(-2.5), 1.0 / gamma(-2.5)) < 1e-14);
        assert_eq!(rgamma(200.0), 0.0);
    }

    #[test]
    fn ln_gamma_matches_gamma_on_overlap() {
        for &x in &[12.0, 15.5, 40.0, 100.3, 170.0] {
            assert!((ln_gamma(x) - gamma(x).ln()).abs() < 1e-13 * ln_gamma(x));
        }
        assert!(rel(ln_gamma(1000.0), 5_905.220_423_209_181) < 1e-15);
    }

    #[test]
    fn sin_pi_is_exact_at_integers() {
        for n in -10..10 {
            assert_eq!(sin_pi(n as f64), 0.0);
        }
        assert!((sin_pi(0.5) - 1.0).abs() < 1e-16);
    }
}
