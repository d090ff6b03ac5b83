//! Scalar special functions used by the bound integrands.
//!
//! The exponential integral convention is `E1(x) = ∫_x^∞ e^{-u}/u du` for
//! `x > 0`, so that `Ei(-x) = -E1(x)`.

use crate::error::{Error, Result};

/// Euler–Mascheroni constant γ.
pub const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;

/// Below this magnitude [`theta`] switches to its Taylor series.
pub const THETA_SERIES_CUTOFF: f64 = 1e-4;

/// `Θ(x) = log(1+x)/x`, continuously extended by `Θ(0) = 1`.
///
/// Defined for `x > -1`; positive and strictly decreasing there.
pub fn theta(x: f64) -> Result<f64> {
    if !(x > -1.0) {
        return Err(Error::Domain {
            function: "theta",
            value: x,
            expected: "x > -1",
        });
    }
    Ok(theta_parts(x, 1.0 + x))
}

/// Θ evaluated from `x` together with an independently computed `1 + x`.
///
/// Integrands that can form `1 + x` as a ratio of positive quantities pass it
/// here so that arguments close to `-1` keep full relative precision.
pub(crate) fn theta_parts(x: f64, one_plus_x: f64) -> f64 {
    if x.abs() < THETA_SERIES_CUTOFF {
        1.0 - x * (0.5 - x * (1.0 / 3.0 - 0.25 * x))
    } else if x.abs() < 0.5 {
        x.ln_1p() / x
    } else {
        one_plus_x.ln() / x
    }
}

/// Exponential integral `E1(x)` for `x > 0`.
pub fn exp_int_e1(x: f64) -> Result<f64> {
    check_positive("exp_int_e1", x)?;
    if x <= 1.0 {
        Ok(e1_series(x))
    } else {
        Ok(e1_continued_fraction_scaled(x) * (-x).exp())
    }
}

/// `e^x · E1(x)` for `x > 0`, without overflow for large `x`.
pub fn exp_scaled_e1(x: f64) -> Result<f64> {
    check_positive("exp_scaled_e1", x)?;
    if x <= 1.0 {
        Ok(e1_series(x) * x.exp())
    } else if x.is_infinite() {
        Ok(0.0)
    } else {
        Ok(e1_continued_fraction_scaled(x))
    }
}

/// `Ei(-x) = -E1(x)` for `x > 0`.
pub fn exp_int_ei_neg(x: f64) -> Result<f64> {
    exp_int_e1(x).map(|v| -v)
}

fn check_positive(function: &'static str, x: f64) -> Result<()> {
    if x > 0.0 {
        Ok(())
    } else {
        Err(Error::Domain {
            function,
            value: x,
            expected: "x > 0",
        })
    }
}

// E1(x) = -γ - ln x - Σ_{k≥1} (-x)^k / (k·k!)
fn e1_series(x: f64) -> f64 {
    let mut sum = 0.0;
    let mut term = 1.0; // (-x)^k / k!
    for k in 1..200 {
        let kf = k as f64;
        term *= -x / kf;
        let contrib = term / kf;
        sum += contrib;
        if contrib.abs() <= f64::EPSILON * sum.abs().max(1e-300) {
            break;
        }
    }
    -EULER_GAMMA - x.ln() - sum
}

// Modified Lentz evaluation of the continued fraction
// e^x E1(x) = 1/(x+1- 1/(x+3- 4/(x+5- ...))).
fn e1_continued_fraction_scaled(x: f64) -> f64 {
    const TINY: f64 = 1e-300;
    let mut b = x + 1.0;
    let mut c = 1.0 / TINY;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..10_000 {
        let an = -((i * i) as f64);
        b += 2.0;
        d = 1.0 / (an * d + b);
        c = b + an / c;
        let del = c * d;
        h *= del;
        if (del - 1.0).abs() <= f64::EPSILON {
            break;
        }
    }
    h
}

/// `E[log(a·W + c)]` for `W ~ Exp(1)`: `log c + e^{c/a}·E1(c/a)`, or `log c`
/// when `a = 0`.
pub fn expected_log_affine(a: f64, c: f64) -> Result<f64> {
    if !(a >= 0.0) || !a.is_finite() {
        return Err(Error::Domain {
            function: "expected_log_affine",
            value: a,
            expected: "a >= 0",
        });
    }
    if !(c > 0.0) || !c.is_finite() {
        return Err(Error::Domain {
            function: "expected_log_affine",
            value: c,
            expected: "c > 0",
        });
    }
    if a == 0.0 {
        return Ok(c.ln());
    }
    Ok(c.ln() + exp_scaled_e1(c / a)?)
}

/// `g(t; a) = log(1 + a·t) + Ei(-1/t)`, nondecreasing in `t` for `a ≥ 1`
/// and tending to `γ + log a` as `t → ∞`.
pub fn g_diag(t: f64, a: f64) -> Result<f64> {
    check_positive("g_diag", t)?;
    if !(a >= 1.0) {
        return Err(Error::Domain {
            function: "g_diag",
            value: a,
            expected: "a >= 1",
        });
    }
    let inv = 1.0 / t;
    let ei = if inv.is_infinite() { 0.0 } else { exp_int_ei_neg(inv)? };
    Ok((a * t).ln_1p() + ei)
}

/// `K = ∫_0^∞ |log w| e^{-w} dw = γ + 2·E1(1)`.
pub fn abs_log_moment() -> f64 {
    EULER_GAMMA + 2.0 * e1_series(1.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    // tanh-sinh quadrature of e^{-x} ∫_0^1 ds / (x - ln s), independent of
    // the series / continued fraction code paths
    fn e1_oracle(x: f64) -> f64 {
        let f = |s: f64| 1.0 / (x - s.ln());
        let h = 1.0 / 64.0;
        let mut sum = 0.0;
        for k in -400..=400 {
            let t = k as f64 * h;
            let u = std::f64::consts::FRAC_PI_2 * t.sinh();
            let s = 0.5 * (1.0 + u.tanh());
            let dsdt = 0.5 * std::f64::consts::FRAC_PI_2 * t.cosh() / u.cosh().powi(2);
            if s > 0.0 && s < 1.0 && dsdt > 0.0 {
                sum += f(s) * dsdt;
            }
        }
        (-x).exp() * sum * h
    }

    #[test]
    fn theta_examples() {
        assert_eq!(theta(0.0).unwrap(), 1.0);
        assert_relative_eq!(theta(1.0).unwrap(), 0.693_147_2, epsilon = 1e-7);
        assert_relative_eq!(theta(-0.5).unwrap(), 1.386_294_4, epsilon = 1e-7);
        assert!(theta(-1.0).is_err());
        assert!(theta(-2.0).is_err());
        assert!(theta(f64::NAN).is_err());
    }

    #[test]
    fn theta_continuous_at_zero() {
        for x in [1e-9, -1e-9, 1e-6, -1e-6] {
            assert!((theta(x).unwrap() - 1.0).abs() < 1e-8 + x.abs());
        }
        assert!((theta(1e-9).unwrap() - 1.0).abs() < 1e-8);
        assert!((theta(-1e-9).unwrap() - 1.0).abs() < 1e-8);
        // both sides of the series cutoff agree
        // Θ'(0) = -1/2, so the two sides differ by about half the step
        for c in [THETA_SERIES_CUTOFF, -THETA_SERIES_CUTOFF] {
            let (lo, hi) = (c * (1.0 - 1e-9), c * (1.0 + 1e-9));
            let jump = (theta(lo).unwrap() - theta(hi).unwrap()).abs();
            assert!(jump < 0.51 * (hi - lo).abs() + 1e-15, "jump {jump} at {c}");
        }
    }

    #[test]
    fn theta_times_x_is_log() {
        for x in [-0.999_999, -0.9, -0.3, -1.1e-4, 1.1e-4, 0.2, 3.0, 1e3, 1e12] {
            let lhs = theta(x).unwrap() * x;
            let rhs = f64::ln_1p(x);
            assert!((lhs - rhs).abs() <= 4.0 * f64::EPSILON * rhs.abs(), "x = {x}");
        }
    }

    #[test]
    fn theta_near_minus_one_uses_complement() {
        let x = -1.0 + 1e-12;
        let direct = theta_parts(x, 1e-12);
        assert_relative_eq!(direct, (1e-12f64).ln() / x, max_relative = 1e-15);
    }

    #[test]
    fn e1_matches_quadrature_oracle() {
        let oracle = e1_oracle(1.0);
        assert_relative_eq!(oracle, 0.219_383_9, epsilon = 1e-7);
        for x in [1e-3, 0.1, 0.5, 0.999, 1.0, 1.001, 2.0, 10.0, 50.0, 300.0, 700.0] {
            let v = exp_int_e1(x).unwrap();
            let o = e1_oracle(x);
            assert_relative_eq!(v, o, max_relative = 1e-10);
        }
        // the oracle integrand is nearly singular for tiny x; use the
        // leading terms of the power series there
        let x: f64 = 1e-8;
        let small = -EULER_GAMMA - x.ln() + x - 0.25 * x * x;
        assert_relative_eq!(exp_int_e1(x).unwrap(), small, max_relative = 1e-15);
    }

    #[test]
    fn e1_domain() {
        assert!(exp_int_e1(0.0).is_err());
        assert!(exp_int_e1(-1.0).is_err());
        assert!(exp_scaled_e1(0.0).is_err());
    }

    #[test]
    fn e1_derivative_is_minus_exp_over_x() {
        for x in [0.5, 1.0, 5.0] {
            let h = 1e-5 * x;
            let fd = (exp_int_e1(x + h).unwrap() - exp_int_e1(x - h).unwrap()) / (2.0 * h);
            let exact = -(-x).exp() / x;
            assert_relative_eq!(fd, exact, max_relative = 1e-6);
        }
    }

    #[test]
    fn scaled_e1_large_arguments() {
        // e^x E1(x) ~ 1/x (1 - 1/x + 2/x^2 - 6/x^3)
        for x in [1e3, 1e6, 1e12] {
            let v = exp_scaled_e1(x).unwrap();
            let asym = (1.0 - 1.0 / x + 2.0 / (x * x) - 6.0 / (x * x * x)) / x;
            assert_relative_eq!(v, asym, max_relative = 1e-9);
        }
        assert_eq!(exp_scaled_e1(f64::INFINITY).unwrap(), 0.0);
    }

    #[test]
    fn k_constant() {
        let oracle = EULER_GAMMA + 2.0 * e1_oracle(1.0);
        assert_relative_eq!(abs_log_moment(), oracle, max_relative = 1e-12);
        assert_relative_eq!(abs_log_moment(), 1.015_983_5, epsilon = 1e-7);
    }

    #[test]
    fn expected_log_affine_examples() {
        assert_eq!(expected_log_affine(0.0, 1.0).unwrap(), 0.0);
        let e = std::f64::consts::E;
        let expect = e * e1_oracle(1.0);
        assert_relative_eq!(expected_log_affine(1.0, 1.0).unwrap(), expect, max_relative = 1e-12);
        assert_relative_eq!(expect, 0.596_347_4, epsilon = 1e-7);
        assert!(expected_log_affine(-1.0, 1.0).is_err());
        assert!(expected_log_affine(1.0, 0.0).is_err());
        assert!(expected_log_affine(1.0, -2.0).is_err());
    }

    // tanh-sinh on ∫_0^∞ log(a w + c) e^{-w} dw after mapping w = -ln s
    fn log_affine_oracle(a: f64, c: f64) -> f64 {
        let h = 1.0 / 128.0;
        let mut sum = 0.0;
        for k in -800..=800 {
            let t = k as f64 * h;
            let u = std::f64::consts::FRAC_PI_2 * t.sinh();
            let s = 0.5 * (1.0 + u.tanh());
            let dsdt = 0.5 * std::f64::consts::FRAC_PI_2 * t.cosh() / u.cosh().powi(2);
            if s > 0.0 && s < 1.0 && dsdt > 0.0 {
                let w = -s.ln();
                sum += (a * w + c).ln() * dsdt;
            }
        }
        sum * h
    }

    #[test]
    fn expected_log_affine_matches_quadrature() {
        for a in [0.1, 1.0, 10.0] {
            for c in [0.1, 1.0, 10.0] {
                let v = expected_log_affine(a, c).unwrap();
                let o = log_affine_oracle(a, c);
                assert!((v - o).abs() < 1e-8, "a={a} c={c}: {v} vs {o}");
            }
        }
    }

    #[test]
    fn g_diag_examples() {
        let lim = g_diag(1e8, 1.0).unwrap() - 1f64.ln();
        assert!((lim - EULER_GAMMA).abs() < 1e-6);
        let g1 = g_diag(1.0, 1.0).unwrap();
        assert_relative_eq!(g1, 2f64.ln() - e1_oracle(1.0), max_relative = 1e-10);
        assert_relative_eq!(g1, 0.473_763_3, epsilon = 1e-7);
        assert!(g_diag(0.0, 1.0).is_err());
        assert!(g_diag(1.0, 0.5).is_err());
    }

    #[test]
    fn g_diag_monotone() {
        let ts = [0.01, 0.03, 0.1, 0.3, 1.0, 3.0, 10.0, 30.0, 100.0];
        for a in [1.0, 2.0, 10.0] {
            for &t in &ts {
                assert!(g_diag(2.0 * t, a).unwrap() >= g_diag(t, a).unwrap());
            }
            assert!(g_diag(1e9, a).unwrap() <= EULER_GAMMA + a.ln() + 1e-9);
        }
    }

    proptest! {
        #[test]
        fn e1_bracketing(x in 1e-6f64..600.0) {
            let v = exp_int_e1(x).unwrap();
            let lo = (-x).exp() / (x + 1.0);
            let hi = (-x).exp() / x;
            prop_assert!(lo < v && v < hi);
        }

        #[test]
        fn theta_is_decreasing_and_positive(x in -0.999f64..100.0, dx in 1e-3f64..1.0) {
            let a = theta(x).unwrap();
            let b = theta(x + dx).unwrap();
            prop_assert!(a > 0.0 && b > 0.0);
            prop_assert!(b < a);
        }
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(4))]
        #[test]
        fn expected_log_affine_matches_monte_carlo(a in 0.01f64..20.0, c in 0.05f64..20.0, seed in 0u64..1000) {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let n = 10_000_000usize;
            let (mut s, mut s2) = (0.0f64, 0.0f64);
            for _ in 0..n {
                let u: f64 = rng.random();
                let w = -(1.0 - u).ln();
                let v = (a * w + c).ln();
                s += v;
                s2 += v * v;
            }
            let mean = s / n as f64;
            let var = s2 / n as f64 - mean * mean;
            let se = (var / n as f64).sqrt();
            let exact = expected_log_affine(a, c).unwrap();
            prop_assert!((mean - exact).abs() < 4.0 * se, "mean {} exact {} se {}", mean, exact, se);
        }
    }
}
