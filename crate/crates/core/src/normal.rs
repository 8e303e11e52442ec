//! Standard normal kernel: CDF, densities, log-space tail products and the
//! closed-form Gaussian exponential integral.
//!
//! The crossing formulas multiply `exp(large)` by `Φ(very negative)`, so the
//! CDF is evaluated through `erfc` (relative accuracy in both tails) and the
//! products go through [`exp_times_phi`], which works in log space once the
//! exponent is large or the CDF argument is deep in the lower tail.

use std::f64::consts::{PI, SQRT_2};

use crate::error::{Error, Result};

/// Width of the round-off window accepted around `[0, 1]`.
pub const PROBABILITY_CLAMP_WINDOW: f64 = 1e-12;

const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_8;

/// Below this argument `log Φ` switches to the asymptotic expansion.
const LOG_PHI_ASYMPTOTIC_BELOW: f64 = -10.0;

/// A probability in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Probability(f64);

impl Probability {
    pub const ZERO: Probability = Probability(0.0);
    pub const ONE: Probability = Probability(1.0);

    /// Accepts `value` if it lies in `[0, 1]` up to [`PROBABILITY_CLAMP_WINDOW`],
    /// clamping round-off excursions. Anything further out signals a formula
    /// bug and is reported as a consistency error.
    pub fn new(value: f64) -> Result<Self> {
        Self::checked(value, "probability")
    }

    pub(crate) fn checked(value: f64, context: &'static str) -> Result<Self> {
        if !(-PROBABILITY_CLAMP_WINDOW..=1.0 + PROBABILITY_CLAMP_WINDOW).contains(&value) {
            return Err(Error::Consistency { value, context });
        }
        Ok(Probability(value.clamp(0.0, 1.0)))
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }

    /// `1 - p`.
    pub fn complement(self) -> Probability {
        Probability(1.0 - self.0)
    }
}

impl From<Probability> for f64 {
    fn from(p: Probability) -> f64 {
        p.0
    }
}

impl std::fmt::Display for Probability {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        self.0.fmt(f)
    }
}

/// Zero-mean normal law with the given variance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalDensity {
    variance: f64,
}

impl NormalDensity {
    pub fn new(variance: f64) -> Result<Self> {
        if !(variance > 0.0 && variance.is_finite()) {
            return Err(Error::domain(format!(
                "normal variance must be positive and finite, got {variance}"
            )));
        }
        Ok(Self { variance })
    }

    pub fn variance(&self) -> f64 {
        self.variance
    }

    pub fn std_dev(&self) -> f64 {
        self.variance.sqrt()
    }
}

/// Φ(z) without argument checks. NaN propagates.
#[inline]
pub(crate) fn phi(z: f64) -> f64 {
    0.5 * libm::erfc(-z / SQRT_2)
}

/// Standard normal distribution function Φ(z); `±∞` map to the limits.
pub fn std_normal_cdf(z: f64) -> Result<Probability> {
    if z.is_nan() {
        return Err(Error::domain("standard normal CDF of NaN"));
    }
    Probability::checked(phi(z), "standard normal CDF")
}

/// `ln Φ(z)`, accurate in both tails.
///
/// For `z < -10` this uses the asymptotic expansion
/// `ln Φ(z) = -z²/2 - ln(-z) - ln√(2π) + ln(1 - 1/z² + 3/z⁴ - 15/z⁶ + ...)`,
/// which stays finite far beyond the underflow point of Φ itself.
pub fn log_std_normal_cdf(z: f64) -> f64 {
    if z.is_nan() {
        return f64::NAN;
    }
    if z < LOG_PHI_ASYMPTOTIC_BELOW {
        if z == f64::NEG_INFINITY {
            return f64::NEG_INFINITY;
        }
        let q = 1.0 / (z * z);
        let mut series = 1.0;
        let mut term = 1.0;
        for k in 1..=60 {
            let next = -term * (2 * k - 1) as f64 * q;
            if next.abs() >= term.abs() {
                break;
            }
            term = next;
            series += term;
            if term.abs() < 1e-17 * series {
                break;
            }
        }
        -0.5 * z * z - (-z).ln() - LN_SQRT_2PI + series.ln()
    } else if z <= 0.0 {
        phi(z).ln()
    } else {
        (-phi(-z)).ln_1p()
    }
}

/// Density of the standard normal law.
#[inline]
pub fn std_normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x - LN_SQRT_2PI).exp()
}

/// Density `(2πσ²)^{-1/2} exp(-x²/(2σ²))` of a zero-mean normal law.
pub fn normal_pdf(x: f64, density: &NormalDensity) -> f64 {
    let v = density.variance;
    (-(x * x) / (2.0 * v)).exp() / (2.0 * PI * v).sqrt()
}

/// `exp(u) · Φ(w)`.
///
/// Evaluated as `exp(u + ln Φ(w))` whenever a direct product could overflow
/// or lose the tail: `u > 30`, or `u > 0` with `w < -6`.
pub fn exp_times_phi(u: f64, w: f64) -> f64 {
    if w == f64::NEG_INFINITY || u == f64::NEG_INFINITY {
        return 0.0;
    }
    if u > 30.0 || (u > 0.0 && w < -6.0) {
        (u + log_std_normal_cdf(w)).exp()
    } else {
        u.exp() * phi(w)
    }
}

/// Closed form of `∫_{-∞}^k exp(-(a x² + b x)) dx`
/// `= exp(b²/4a) √(π/a) Φ((2ka + b)/√(2a))`, for `a > 0` and `k` possibly `+∞`.
///
/// When `b²/4a > 700` the exponential, the prefactor and `ln Φ` are
/// combined in log space before a single final `exp`.
pub fn gaussian_exp_integral(a: f64, b: f64, k: f64) -> Result<f64> {
    if !(a > 0.0 && a.is_finite()) {
        return Err(Error::domain(format!(
            "Gaussian integral needs a > 0, got a = {a}"
        )));
    }
    if !b.is_finite() || k.is_nan() {
        return Err(Error::domain(format!(
            "Gaussian integral needs finite b and non-NaN k, got b = {b}, k = {k}"
        )));
    }
    if k == f64::NEG_INFINITY {
        return Ok(0.0);
    }
    let exponent = b * b / (4.0 * a);
    let w = if k == f64::INFINITY {
        f64::INFINITY
    } else {
        (2.0 * k * a + b) / (2.0 * a).sqrt()
    };
    let ln_prefactor = 0.5 * (PI / a).ln();
    if exponent > 700.0 {
        Ok((exponent + ln_prefactor + log_std_normal_cdf(w)).exp())
    } else {
        Ok(exp_times_phi(exponent, w) * ln_prefactor.exp())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn cdf_fixed_points() {
        assert_eq!(std_normal_cdf(0.0).unwrap().value(), 0.5);
        assert_eq!(std_normal_cdf(f64::INFINITY).unwrap().value(), 1.0);
        assert_eq!(std_normal_cdf(f64::NEG_INFINITY).unwrap().value(), 0.0);
        assert!(std_normal_cdf(f64::NAN).is_err());
    }

    // Reference values computed with 50-digit mpmath.
    #[test]
    fn cdf_matches_high_precision_values() {
        assert!((phi(1.0) - 0.841_344_746_068_542_948_6).abs() < 1e-15);
        assert!((phi(-1.0) - 0.158_655_253_931_457_051_4).abs() < 1e-15);
        assert!((phi(3.0) - 0.998_650_101_968_369_905_5).abs() < 1e-15);
        assert!((phi(8.0) - 0.999_999_999_999_999_377_9).abs() < 1e-15);
        let tails = [
            (-5.0, 2.866_515_718_791_939_116_7e-7),
            (-8.0, 6.220_960_574_271_784_123_5e-16),
            (-12.0, 1.776_482_112_077_678_997_7e-33),
            (-20.0, 2.753_624_118_606_233_695_1e-89),
            (-30.0, 4.906_713_927_148_187_059_5e-198),
            (-37.0, 5.725_571_222_524_576_822_7e-300),
        ];
        for (z, want) in tails {
            assert!(rel(phi(z), want) < 1e-12, "z = {z}: {} vs {want}", phi(z));
        }
    }

    #[test]
    fn log_cdf_in_both_regimes() {
        let cases = [
            (-37.0, -689.030_585_576_890_593_6),
            (-30.0, -454.321_243_956_343_197_1),
            (-12.0, -75.410_673_001_568_795_94),
            (-10.0, -53.231_285_150_512_470_58),
            (-5.0, -15.064_998_393_988_725_74),
            (1.0, -0.172_753_779_023_449_889_5),
            (8.0, -6.220_960_574_271_786_058_5e-16),
        ];
        for (z, want) in cases {
            let got = log_std_normal_cdf(z);
            assert!(rel(got, want) < 1e-13, "z = {z}: {got} vs {want}");
        }
        // The expansion keeps going where Φ underflows.
        let deep = log_std_normal_cdf(-1e3);
        assert!(deep.is_finite() && deep < -4.9e5);
        assert_eq!(log_std_normal_cdf(f64::NEG_INFINITY), f64::NEG_INFINITY);
    }

    #[test]
    fn log_cdf_continuous_at_switch() {
        let below = log_std_normal_cdf(-10.0 - 1e-12);
        let above = log_std_normal_cdf(-10.0 + 1e-12);
        assert!((below - above).abs() < 1e-9);
    }

    #[test]
    fn pdf_values() {
        let unit = NormalDensity::new(1.0).unwrap();
        assert!((normal_pdf(0.0, &unit) - 0.398_942_280_401_432_7).abs() < 1e-16);
        assert_eq!(normal_pdf(3.0, &unit), normal_pdf(-3.0, &unit));
        assert!((std_normal_pdf(1.3) - normal_pdf(1.3, &unit)).abs() < 1e-16);
        assert!(NormalDensity::new(0.0).is_err());
        assert!(NormalDensity::new(-2.0).is_err());
    }

    #[test]
    fn exp_times_phi_tail_products() {
        let got = exp_times_phi(200.0, -25.0);
        assert!(rel(got, 2.208_761_021_743_676_069_8e-51) < 1e-12, "{got}");
        let got = exp_times_phi(30.5, -7.0);
        assert!(rel(got, 22.549_040_185_094_643_78) < 1e-12, "{got}");
        assert_eq!(exp_times_phi(5.0, f64::NEG_INFINITY), 0.0);
        assert!((exp_times_phi(0.0, 0.0) - 0.5).abs() < 1e-16);
    }

    #[test]
    fn gaussian_integral_closed_forms() {
        let full = gaussian_exp_integral(0.5, 0.0, f64::INFINITY).unwrap();
        assert!(rel(full, (2.0 * PI).sqrt()) < 1e-15);
        let half = gaussian_exp_integral(1.0, 0.0, 0.0).unwrap();
        assert!(rel(half, PI.sqrt() / 2.0) < 1e-15);
        let shifted = gaussian_exp_integral(1.0, 2.0, 1.0).unwrap();
        assert!(rel(shifted, 4.806_760_363_080_734_206_1) < 1e-14);
        let other = gaussian_exp_integral(0.7, -3.2, 1.3).unwrap();
        assert!(rel(other, 9.994_254_253_401_391_303_7) < 1e-14);
        assert_eq!(gaussian_exp_integral(1.0, 1.0, f64::NEG_INFINITY).unwrap(), 0.0);
    }

    #[test]
    fn gaussian_integral_log_space_branch() {
        // b²/4a = 900: the bare exponential would overflow.
        let v = gaussian_exp_integral(1.0, 60.0, -45.0).unwrap();
        let w: f64 = (2.0 * -45.0 + 60.0) / 2f64.sqrt();
        let want_ln = 900.0 + 0.5 * PI.ln() + log_std_normal_cdf(w);
        assert!(rel(v.ln(), want_ln) < 1e-14);
        assert!(v.is_finite());
    }

    #[test]
    fn gaussian_integral_rejects_bad_a() {
        assert!(gaussian_exp_integral(0.0, 1.0, 1.0).is_err());
        assert!(gaussian_exp_integral(-1.0, 1.0, 1.0).is_err());
        assert!(gaussian_exp_integral(1.0, 1.0, f64::NAN).is_err());
    }

    #[test]
    fn probability_window() {
        assert_eq!(Probability::new(1.0 + 5e-13).unwrap().value(), 1.0);
        assert_eq!(Probability::new(-5e-13).unwrap().value(), 0.0);
        assert!(Probability::new(1.0 + 1e-9).is_err());
        assert!(Probability::new(-1e-9).is_err());
        assert!(Probability::new(f64::NAN).is_err());
    }
}
