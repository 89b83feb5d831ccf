//! The NDOPPE family: a finite mixture of negative binomial distributions
//! `NB(k, theta)`, `k = 1..=r`, with component weights proportional to
//! `a_{k-1} * (k-1)! / theta^k`.

use crate::error::{Error, Result};
use crate::specfun::{log_binomial, log_gamma, log_sum_exp_raw, reg_inc_beta, LogWeight};

/// Family order `r` and the nonnegative coefficients `(a_0, ..., a_{r-1})`.
///
/// `r = 1, a = (1)` is the geometric distribution; `r = 2, a = (1, 1)` is the
/// natural discrete Lindley (NDL) distribution.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelSpec {
    coefficients: Vec<f64>,
    // ln(a_{k-1} * Gamma(k)) for k = 1..=r; -inf where a_{k-1} = 0.
    log_terms: Vec<f64>,
}

impl ModelSpec {
    pub fn new(coefficients: Vec<f64>) -> Result<Self> {
        if coefficients.is_empty() {
            return Err(Error::Domain("model order must be at least 1".into()));
        }
        for (i, &a) in coefficients.iter().enumerate() {
            if !a.is_finite() || a < 0.0 {
                return Err(Error::Domain(format!(
                    "coefficient a_{i} must be finite and nonnegative, got {a}"
                )));
            }
        }
        if *coefficients.last().unwrap() == 0.0 {
            return Err(Error::Domain(
                "trailing coefficient must be positive (a trailing zero changes the order)".into(),
            ));
        }
        let log_terms = coefficients
            .iter()
            .enumerate()
            .map(|(i, &a)| a.ln() + log_gamma(i as f64 + 1.0).expect("k >= 1"))
            .collect();
        Ok(ModelSpec {
            coefficients,
            log_terms,
        })
    }

    /// Geometric distribution, `r = 1`.
    pub fn geometric() -> Self {
        ModelSpec::new(vec![1.0]).expect("valid")
    }

    /// Natural discrete Lindley distribution, `r = 2`, `a = (1, 1)`.
    pub fn ndl() -> Self {
        ModelSpec::new(vec![1.0, 1.0]).expect("valid")
    }

    pub fn order(&self) -> usize {
        self.coefficients.len()
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    /// `ln(a_{k-1} Gamma(k))` for `k = 1..=r`; the log coefficients of the
    /// mixing polynomial `g(z) = sum_k a_{k-1} Gamma(k) z^k`.
    pub(crate) fn log_terms(&self) -> &[f64] {
        &self.log_terms
    }

    /// `ln h(theta)` where `h(theta) = 1 / sum_k a_{k-1} Gamma(k) / theta^k`.
    pub(crate) fn log_normalizer(&self, theta: Theta) -> f64 {
        let ln_theta = theta.value().ln();
        let terms: Vec<f64> = self
            .log_terms
            .iter()
            .enumerate()
            .map(|(i, &lt)| lt - (i as f64 + 1.0) * ln_theta)
            .collect();
        -log_sum_exp_raw(&terms)
    }

    /// The normalizing constant `h(theta)`.
    pub fn normalizer(&self, theta: Theta) -> f64 {
        self.log_normalizer(theta).exp()
    }

    /// `ln p(x)` where `p(x) = sum_k a_{k-1} Gamma(k) C(x+k-1, x)`.
    pub fn weight_poly(&self, x: u64) -> LogWeight {
        let terms: Vec<f64> = self
            .log_terms
            .iter()
            .enumerate()
            .map(|(i, &lt)| {
                let k = i as u64 + 1;
                lt + log_binomial((x + k - 1) as i64, x)
                    .expect("binomial args valid")
                    .ln_value()
            })
            .collect();
        LogWeight::from_ln(log_sum_exp_raw(&terms))
    }

    /// Mixture weights over the components `NB(k, theta)`, `k = 1..=r`.
    /// Nonnegative and summing to one.
    pub fn mixture_weights(&self, theta: Theta) -> Vec<f64> {
        let ln_h = self.log_normalizer(theta);
        let ln_theta = theta.value().ln();
        self.log_terms
            .iter()
            .enumerate()
            .map(|(i, &lt)| (ln_h + lt - (i as f64 + 1.0) * ln_theta).exp())
            .collect()
    }

    /// `ln f(x; theta)`, computed fully in log space.
    pub fn log_pmf(&self, x: u64, theta: Theta) -> f64 {
        self.log_normalizer(theta)
            + self.weight_poly(x).ln_value()
            + x as f64 * (-theta.value()).ln_1p()
    }

    /// `f(x; theta) = h(theta) p(x) (1 - theta)^x`.
    pub fn pmf(&self, x: u64, theta: Theta) -> f64 {
        self.log_pmf(x, theta).exp()
    }

    /// `P(X <= x)`, a right-continuous step function; zero for `x < 0`.
    ///
    /// Each component contributes its negative binomial CDF
    /// `I_theta(k, x+1)` weighted by the mixture weight.
    pub fn cdf(&self, x: i64, theta: Theta) -> f64 {
        if x < 0 {
            return 0.0;
        }
        let weights = self.mixture_weights(theta);
        let mut total = 0.0;
        for (i, w) in weights.iter().enumerate() {
            if *w == 0.0 {
                continue;
            }
            let k = i as f64 + 1.0;
            total += w
                * reg_inc_beta(k, x as f64 + 1.0, theta.value())
                    .expect("incomplete beta args valid");
        }
        total.clamp(0.0, 1.0)
    }

    /// `ln E[X]` as a function of theta; the monotone decreasing map the MLE
    /// root-solve inverts.
    pub(crate) fn log_mean(&self, theta: Theta) -> f64 {
        let ln_theta = theta.value().ln();
        // sum_k a_{k-1} Gamma(k+1) / theta^(k+1), in log space
        let terms: Vec<f64> = self
            .log_terms
            .iter()
            .enumerate()
            .map(|(i, &lt)| {
                let k = i as f64 + 1.0;
                lt + k.ln() - (k + 1.0) * ln_theta
            })
            .collect();
        (-theta.value()).ln_1p() + self.log_normalizer(theta) + log_sum_exp_raw(&terms)
    }

    /// `E[X] = (1 - theta) h(theta) sum_k a_{k-1} Gamma(k+1) / theta^(k+1)`.
    pub fn mean(&self, theta: Theta) -> f64 {
        self.log_mean(theta).exp()
    }
}

/// The single model parameter, confined to the open interval (0, 1).
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Theta(f64);

impl Theta {
    pub fn new(value: f64) -> Result<Self> {
        if !value.is_finite() || value <= 0.0 || value >= 1.0 {
            return Err(Error::Domain(format!(
                "theta must lie strictly between 0 and 1, got {value}"
            )));
        }
        Ok(Theta(value))
    }

    pub fn value(self) -> f64 {
        self.0
    }
}
