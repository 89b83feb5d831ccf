//! Log-space primitives and special functions used throughout the crate.
//!
//! Everything that can overflow in linear space (factorials, binomial
//! coefficients, composition weights) is kept as a natural logarithm and only
//! exponentiated at the very end.

use crate::error::{Error, Result};

/// Natural logarithm of a nonnegative quantity; negative infinity encodes an
/// exact zero. Never NaN.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct LogWeight(f64);

impl LogWeight {
    /// Log-space zero (`ln 0 = -inf`).
    pub const ZERO: LogWeight = LogWeight(f64::NEG_INFINITY);

    /// Wraps an already-logarithmic value.
    ///
    /// Panics on NaN; a NaN log-weight has no meaning and would poison every
    /// downstream sum.
    pub fn from_ln(ln: f64) -> Self {
        assert!(!ln.is_nan(), "LogWeight cannot hold NaN");
        LogWeight(ln)
    }

    /// Takes the logarithm of a nonnegative linear-space value.
    pub fn from_value(value: f64) -> Self {
        assert!(
            value >= 0.0 && !value.is_nan(),
            "LogWeight requires a nonnegative value, got {value}"
        );
        LogWeight(value.ln())
    }

    pub fn ln_value(self) -> f64 {
        self.0
    }

    /// Exponentiates back to linear space.
    pub fn value(self) -> f64 {
        self.0.exp()
    }

    pub fn is_zero(self) -> bool {
        self.0 == f64::NEG_INFINITY
    }
}

// Lanczos series for ln Gamma, g = 607/128, 14 correction terms. The
// published coefficients keep more digits than f64 resolves.
#[allow(clippy::excessive_precision)]
const LANCZOS_BASE: f64 = 0.999999999999997092;
#[allow(clippy::excessive_precision)]
const LANCZOS_COEFFS: [f64; 14] = [
    57.156_235_665_862_923_5,
    -59.597_960_355_475_491_2,
    14.136_097_974_741_747_1,
    -0.491_913_816_097_620_199,
    0.339_946_499_848_118_887e-4,
    0.465_236_289_270_485_756e-4,
    -0.983_744_753_048_795_646e-4,
    0.158_088_703_224_912_494e-3,
    -0.210_264_441_724_104_883e-3,
    0.217_439_618_115_212_643e-3,
    -0.164_318_106_536_763_890e-3,
    0.844_182_239_838_527_433e-4,
    -0.261_908_384_015_814_087e-4,
    0.368_991_826_595_316_234e-5,
];
const SQRT_2PI: f64 = 2.506_628_274_631_000_5;

/// Natural logarithm of the gamma function for `z > 0`.
pub fn log_gamma(z: f64) -> Result<f64> {
    if !z.is_finite() || z <= 0.0 {
        return Err(Error::Domain(format!("log_gamma requires z > 0, got {z}")));
    }
    if z < 0.5 {
        // Reflection keeps the series argument away from the pole at 0.
        let recip = log_gamma(1.0 - z)?;
        return Ok((std::f64::consts::PI / (std::f64::consts::PI * z).sin()).ln() - recip);
    }
    let mut series = LANCZOS_BASE;
    for (j, c) in LANCZOS_COEFFS.iter().enumerate() {
        series += c / (z + j as f64 + 1.0);
    }
    let tmp = z + 5.242_187_5;
    Ok((z + 0.5) * tmp.ln() - tmp + (SQRT_2PI * series / z).ln())
}

/// `ln n!` for a nonnegative integer.
pub(crate) fn log_factorial(n: u64) -> f64 {
    log_gamma(n as f64 + 1.0).expect("n + 1 > 0")
}

/// Log of the binomial coefficient `C(upper, lower)`.
///
/// Conventions: `C(a, 0) = 1` for every `a >= -1` (including `a = -1`, the
/// empty-composition case of the single-observation estimator) and
/// `C(a, b) = 0` when `0 <= a < b`.
pub fn log_binomial(upper: i64, lower: u64) -> Result<LogWeight> {
    if upper < -1 {
        return Err(Error::Domain(format!(
            "log_binomial upper index must be >= -1, got {upper}"
        )));
    }
    if lower == 0 {
        return Ok(LogWeight(0.0));
    }
    if upper == -1 {
        return Err(Error::Domain(
            "log_binomial upper index -1 is only defined for lower = 0".into(),
        ));
    }
    let upper = upper as u64;
    if upper < lower {
        return Ok(LogWeight::ZERO);
    }
    Ok(LogWeight(
        log_factorial(upper) - log_factorial(lower) - log_factorial(upper - lower),
    ))
}

/// Max-shifted `ln sum exp` over raw log values. Empty input gives `-inf`.
pub(crate) fn log_sum_exp_raw(terms: &[f64]) -> f64 {
    let mut max = f64::NEG_INFINITY;
    for &t in terms {
        if t > max {
            max = t;
        }
    }
    if max == f64::NEG_INFINITY {
        return f64::NEG_INFINITY;
    }
    let mut sum = 0.0;
    for &t in terms {
        sum += (t - max).exp();
    }
    max + sum.ln()
}

/// `ln sum exp(term_i)` over a sequence of log weights, stabilized by the
/// maximum term. The empty sum is zero (`-inf`).
pub fn log_sum_exp<I>(terms: I) -> LogWeight
where
    I: IntoIterator<Item = LogWeight>,
{
    let values: Vec<f64> = terms.into_iter().map(|w| w.0).collect();
    LogWeight(log_sum_exp_raw(&values))
}

/// Regularized incomplete beta function `I_x(a, b)`.
///
/// Continued fraction (modified Lentz), with the symmetry
/// `I_x(a,b) = 1 - I_{1-x}(b,a)` applied for `x > a/(a+b)` so the fraction is
/// always evaluated in its fast-converging region.
pub fn reg_inc_beta(a: f64, b: f64, x: f64) -> Result<f64> {
    if !a.is_finite() || a <= 0.0 || !b.is_finite() || b <= 0.0 {
        return Err(Error::Domain(format!(
            "reg_inc_beta requires a > 0 and b > 0, got a = {a}, b = {b}"
        )));
    }
    if !(0.0..=1.0).contains(&x) {
        return Err(Error::Domain(format!(
            "reg_inc_beta requires 0 <= x <= 1, got {x}"
        )));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    if x == 1.0 {
        return Ok(1.0);
    }
    if x <= a / (a + b) {
        beta_cf_regularized(a, b, x)
    } else {
        Ok(1.0 - beta_cf_regularized(b, a, 1.0 - x)?)
    }
}

/// `I_x(a, b)` via the front factor times the Lentz continued fraction.
fn beta_cf_regularized(a: f64, b: f64, x: f64) -> Result<f64> {
    let ln_front = log_gamma(a + b)? - log_gamma(a)? - log_gamma(b)?
        + a * x.ln()
        + b * (-x).ln_1p();

    const FPMIN: f64 = 1e-300;
    const EPS: f64 = 1e-15;
    const MAX_ITER: usize = 1000;

    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < FPMIN {
        d = FPMIN;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=MAX_ITER {
        let m_f = m as f64;
        let m2 = 2.0 * m_f;
        // even step
        let aa = m_f * (b - m_f) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < FPMIN {
            d = FPMIN;
        }
        c = 1.0 + aa / c;
        if c.abs() < FPMIN {
            c = FPMIN;
        }
        d = 1.0 / d;
        h *= d * c;
        // odd step
        let aa = -(a + m_f) * (qab + m_f) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < FPMIN {
            d = FPMIN;
        }
        c = 1.0 + aa / c;
        if c.abs() < FPMIN {
            c = FPMIN;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < EPS {
            return Ok((ln_front.exp() * h / a).clamp(0.0, 1.0));
        }
    }
    Err(Error::Numeric(format!(
        "incomplete beta continued fraction did not converge for a = {a}, b = {b}, x = {x}"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigUint;
    use num_traits::ToPrimitive;
    use proptest::prelude::*;

    fn exact_binomial(n: u64, k: u64) -> BigUint {
        let k = k.min(n - k);
        let mut num = BigUint::from(1u32);
        let mut den = BigUint::from(1u32);
        for i in 0..k {
            num *= BigUint::from(n - i);
            den *= BigUint::from(i + 1);
        }
        num / den
    }

    /// Stirling series with three correction terms; independent of the
    /// Lanczos path and accurate to well below 1e-13 for z >= 20.
    fn stirling_log_gamma(z: f64) -> f64 {
        let base = (z - 0.5) * z.ln() - z + 0.5 * (2.0 * std::f64::consts::PI).ln();
        base + 1.0 / (12.0 * z) - 1.0 / (360.0 * z.powi(3)) + 1.0 / (1260.0 * z.powi(5))
    }

    #[test]
    fn log_gamma_anchors() {
        assert!(log_gamma(1.0).unwrap().abs() < 1e-14);
        assert!((log_gamma(5.0).unwrap() - 24f64.ln()).abs() < 1e-13);
        assert!((log_gamma(0.5).unwrap() - std::f64::consts::PI.sqrt().ln()).abs() < 1e-13);
        assert!((log_gamma(2.0).unwrap()).abs() < 1e-14);
    }

    #[test]
    fn log_gamma_matches_exact_factorials() {
        // n! fits in f64 up to 170!, and BigUint -> f64 is correctly rounded.
        let mut fact = BigUint::from(1u32);
        for n in 1u64..=170 {
            fact *= BigUint::from(n);
            let expected = fact.to_f64().unwrap().ln();
            let got = log_gamma(n as f64 + 1.0).unwrap();
            let tol = 1e-13 * expected.abs().max(1.0);
            assert!(
                (got - expected).abs() <= tol,
                "ln {n}! : got {got}, expected {expected}"
            );
        }
    }

    #[test]
    fn log_gamma_matches_stirling_at_large_arguments() {
        for &z in &[20.0, 123.456, 1e3, 1e4, 123456.789, 1e6] {
            let got = log_gamma(z).unwrap();
            let expected = stirling_log_gamma(z);
            assert!(
                ((got - expected) / expected).abs() < 1e-12,
                "z = {z}: got {got}, expected {expected}"
            );
        }
    }

    #[test]
    fn log_gamma_rejects_nonpositive() {
        assert!(log_gamma(0.0).is_err());
        assert!(log_gamma(-3.0).is_err());
        assert!(log_gamma(f64::NAN).is_err());
    }

    #[test]
    fn log_binomial_values() {
        assert!((log_binomial(5, 2).unwrap().ln_value() - 10f64.ln()).abs() < 1e-13);
        assert_eq!(log_binomial(-1, 0).unwrap().ln_value(), 0.0);
        assert!(log_binomial(3, 5).unwrap().is_zero());
        assert_eq!(log_binomial(7, 0).unwrap().ln_value(), 0.0);
        assert!(log_binomial(-2, 0).is_err());
        assert!(log_binomial(-1, 1).is_err());
    }

    #[test]
    fn log_binomial_matches_big_integer_arithmetic() {
        for n in (0u64..=500).step_by(25) {
            for k in 0..=n {
                let exact = exact_binomial(n, k).to_f64().unwrap();
                let got = log_binomial(n as i64, k).unwrap().ln_value().exp();
                assert!(
                    ((got - exact) / exact).abs() < 1e-12,
                    "C({n},{k}): got {got}, exact {exact}"
                );
            }
        }
    }

    #[test]
    fn log_sum_exp_values() {
        let one_plus_three = log_sum_exp([LogWeight::from_value(1.0), LogWeight::from_value(3.0)]);
        assert!((one_plus_three.ln_value() - 4f64.ln()).abs() < 1e-14);
        let with_zero = log_sum_exp([LogWeight::ZERO, LogWeight::from_value(2.0)]);
        assert!((with_zero.ln_value() - 2f64.ln()).abs() < 1e-14);
        assert!(log_sum_exp([]).is_zero());
        assert!(log_sum_exp([LogWeight::ZERO, LogWeight::ZERO]).is_zero());
    }

    #[test]
    fn reg_inc_beta_closed_forms() {
        // I_x(1, b) = 1 - (1-x)^b
        let v = reg_inc_beta(1.0, 4.0, 0.2).unwrap();
        assert!((v - 0.5904).abs() < 1e-13);
        // symmetry at the midpoint
        assert!((reg_inc_beta(2.0, 2.0, 0.5).unwrap() - 0.5).abs() < 1e-13);
        // frozen from the negative binomial partial-sum oracle below
        assert!((reg_inc_beta(3.0, 6.0, 0.4).unwrap() - 0.68460544).abs() < 1e-12);
        assert_eq!(reg_inc_beta(2.5, 1.5, 0.0).unwrap(), 0.0);
        assert_eq!(reg_inc_beta(2.5, 1.5, 1.0).unwrap(), 1.0);
        assert!(reg_inc_beta(0.0, 1.0, 0.5).is_err());
        assert!(reg_inc_beta(1.0, -1.0, 0.5).is_err());
        assert!(reg_inc_beta(1.0, 1.0, 1.5).is_err());
    }

    /// Truncated negative binomial mass: sum_{w=0}^{x} C(w+k-1, w) p^k (1-p)^w.
    fn nb_partial_sum(k: u64, x: u64, p: f64) -> f64 {
        let mut total = 0.0;
        for w in 0..=x {
            let c = log_binomial((w + k - 1) as i64, w).unwrap().ln_value();
            total += (c + k as f64 * p.ln() + w as f64 * (1.0 - p).ln()).exp();
        }
        total
    }

    #[test]
    fn reg_inc_beta_equals_negative_binomial_partial_sums() {
        for k in 1..=10u64 {
            for &p in &[0.1, 0.5, 0.9] {
                for x in (0..=50u64).step_by(10) {
                    let beta = reg_inc_beta(k as f64, x as f64 + 1.0, p).unwrap();
                    let partial = nb_partial_sum(k, x, p);
                    assert!(
                        (beta - partial).abs() < 1e-10,
                        "k={k}, x={x}, p={p}: beta {beta}, partial {partial}"
                    );
                }
            }
        }
    }

    #[test]
    fn reg_inc_beta_matches_reference_implementation() {
        for &a in &[0.5, 1.0, 2.0, 3.5, 10.0, 40.0] {
            for &b in &[0.5, 1.0, 2.0, 7.5, 25.0, 101.0] {
                for &x in &[0.01, 0.2, 0.5, 0.8, 0.99] {
                    let got = reg_inc_beta(a, b, x).unwrap();
                    let expected = statrs::function::beta::beta_reg(a, b, x);
                    assert!(
                        (got - expected).abs() < 1e-11,
                        "a={a}, b={b}, x={x}: got {got}, expected {expected}"
                    );
                }
            }
        }
    }

    proptest! {
        #[test]
        fn log_sum_exp_is_permutation_invariant(values in prop::collection::vec(-50.0f64..50.0, 0..12), seed in 0u64..1000) {
            let weights: Vec<LogWeight> = values.iter().map(|&v| LogWeight::from_ln(v)).collect();
            let direct = log_sum_exp(weights.clone()).ln_value();
            let mut shuffled = weights;
            // cheap deterministic shuffle
            let len = shuffled.len();
            if len > 1 {
                for i in 0..len {
                    let j = ((seed as usize).wrapping_mul(31).wrapping_add(i * 17)) % len;
                    shuffled.swap(i, j);
                }
            }
            let permuted = log_sum_exp(shuffled).ln_value();
            if direct.is_finite() {
                prop_assert!((direct - permuted).abs() <= 1e-12 * direct.abs().max(1.0));
            } else {
                prop_assert_eq!(direct, permuted);
            }
        }

        #[test]
        fn log_sum_exp_absorbs_zero_terms(values in prop::collection::vec(-50.0f64..50.0, 0..10)) {
            let weights: Vec<LogWeight> = values.iter().map(|&v| LogWeight::from_ln(v)).collect();
            let base = log_sum_exp(weights.clone()).ln_value();
            let mut with_zero = weights;
            with_zero.push(LogWeight::ZERO);
            let extended = log_sum_exp(with_zero).ln_value();
            if base.is_finite() {
                prop_assert!((base - extended).abs() <= 1e-12 * base.abs().max(1.0));
            } else {
                prop_assert_eq!(base, extended);
            }
        }

        #[test]
        fn reg_inc_beta_symmetry(a in 0.2f64..30.0, b in 0.2f64..30.0, x in 0.0f64..=1.0) {
            let lhs = reg_inc_beta(a, b, x).unwrap();
            let rhs = reg_inc_beta(b, a, 1.0 - x).unwrap();
            prop_assert!((lhs + rhs - 1.0).abs() < 1e-12);
        }

        #[test]
        fn log_weight_round_trips(ln in -700.0f64..700.0) {
            // exp then re-log must come back to within an ulp or so
            let w = LogWeight::from_ln(ln);
            let back = w.value().ln();
            prop_assert!((back - ln).abs() <= 4e-16 * ln.abs().max(1.0));
        }
    }
}
