//! Point estimation: maximum likelihood for `theta` and the uniformly
//! minimum variance unbiased estimators (UMVUE) of the PMF and the CDF.
//!
//! The UMVUE conditions the single-observation indicator on the sample sum
//! `T`, which is complete and sufficient. The composition sums that appear in
//! the distribution of `T` depend on a composition `(y_1, ..., y_r)` of `n`
//! only through its weight and the total degree `m = sum k * y_k`, so they
//! collapse to the coefficients of the polynomial power `g(z)^n` with
//! `g(z) = sum_k a_{k-1} Gamma(k) z^k`. Those coefficients are computed once,
//! in log space, and reused for every evaluation point.

use crate::error::{Error, Result};
use crate::model::{ModelSpec, Theta};
use crate::specfun::{log_binomial, log_sum_exp_raw, LogWeight};

/// Observed nonnegative integer counts with their sufficient statistics.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sample {
    values: Vec<u64>,
    sum: u64,
}

impl Sample {
    pub fn new(values: Vec<u64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::Domain("sample must contain at least one value".into()));
        }
        let mut sum: u64 = 0;
        for &v in &values {
            sum = sum
                .checked_add(v)
                .ok_or_else(|| Error::Domain("sample sum overflows a 64-bit integer".into()))?;
        }
        Ok(Sample { values, sum })
    }

    pub fn n(&self) -> usize {
        self.values.len()
    }

    /// The sample sum `t`, the complete sufficient statistic.
    pub fn sum(&self) -> u64 {
        self.sum
    }

    pub fn mean(&self) -> f64 {
        self.sum as f64 / self.values.len() as f64
    }

    pub fn values(&self) -> &[u64] {
        &self.values
    }
}

/// Log-space coefficients of `g(z)^n`, `g(z) = sum_{k=1}^r a_{k-1} Gamma(k) z^k`.
///
/// Coefficient `m` aggregates every composition `(y_1, ..., y_r)` of `n` with
/// `sum k * y_k = m`, weighted by `n!/(y_1! ... y_r!) prod (a_{k-1} Gamma(k))^{y_k}`.
/// Degrees run over `[n, r*n]`; `n = 0` is the unit polynomial.
#[derive(Debug, Clone)]
pub struct LogPolyPower {
    n: usize,
    min_degree: usize,
    coeffs: Vec<f64>,
}

impl LogPolyPower {
    pub fn new(n: usize, model: &ModelSpec) -> Self {
        let base = model.log_terms();
        let coeffs = match base {
            // g^n = (c1 z)^n
            [c1] => vec![n as f64 * c1],
            // g^n = z^n (c1 + c2 z)^n expands by the binomial theorem;
            // O(n) instead of the O(n^2) convolution below
            [c1, c2] => (0..=n)
                .map(|j| {
                    let ln_binom = log_binomial(n as i64, j as u64)
                        .expect("args valid")
                        .ln_value();
                    let from_c1 = if n == j { 0.0 } else { (n - j) as f64 * c1 };
                    let from_c2 = if j == 0 { 0.0 } else { j as f64 * c2 };
                    ln_binom + from_c1 + from_c2
                })
                .collect(),
            _ => Self::convolved(n, base),
        };
        LogPolyPower {
            n,
            min_degree: n,
            coeffs,
        }
    }

    /// n successive log-space convolutions with g, starting from the unit
    /// polynomial. Coefficients are stored relative to the running minimum
    /// degree, which equals the power taken so far. Cost grows as O(r^2 n^2).
    fn convolved(n: usize, base: &[f64]) -> Vec<f64> {
        let r = base.len();
        let mut coeffs = vec![0.0f64];
        let mut scratch = vec![0.0f64; r];
        for _ in 0..n {
            let next_len = coeffs.len() + r - 1;
            let mut next = vec![f64::NEG_INFINITY; next_len];
            for (m, slot) in next.iter_mut().enumerate() {
                let mut count = 0;
                for (i, &b) in base.iter().enumerate() {
                    // degree k = i + 1 shifts the relative index down by k - 1
                    if b == f64::NEG_INFINITY {
                        continue;
                    }
                    if let Some(&prev) = m.checked_sub(i).and_then(|d| coeffs.get(d)) {
                        if prev != f64::NEG_INFINITY {
                            scratch[count] = prev + b;
                            count += 1;
                        }
                    }
                }
                *slot = log_sum_exp_raw(&scratch[..count]);
            }
            coeffs = next;
        }
        coeffs
    }

    pub fn power(&self) -> usize {
        self.n
    }

    pub fn min_degree(&self) -> usize {
        self.min_degree
    }

    pub fn max_degree(&self) -> usize {
        self.min_degree + self.coeffs.len() - 1
    }

    /// Coefficient at degree `m`; log-zero outside `[n, r*n]`.
    pub fn coeff(&self, m: usize) -> LogWeight {
        if m < self.min_degree || m > self.max_degree() {
            LogWeight::ZERO
        } else {
            LogWeight::from_ln(self.coeffs[m - self.min_degree])
        }
    }

    pub(crate) fn raw(&self) -> &[f64] {
        &self.coeffs
    }
}

/// `ln sum_m coeff_m * C(d + m - 1, d)` for a poly power, the composition sum
/// that appears in the distribution of `T` (at `d = t`) and in the UMVUE
/// numerator (at `d = t - x`).
pub(crate) fn log_composition_sum(poly: &LogPolyPower, d: u64) -> f64 {
    let mut terms = Vec::with_capacity(poly.raw().len());
    for (i, &c) in poly.raw().iter().enumerate() {
        if c == f64::NEG_INFINITY {
            continue;
        }
        let m = (poly.min_degree() + i) as i64;
        let upper = d as i64 + m - 1;
        let lb = log_binomial(upper, d).expect("upper >= -1").ln_value();
        if lb != f64::NEG_INFINITY {
            terms.push(c + lb);
        }
    }
    log_sum_exp_raw(&terms)
}

/// The distribution of the sample sum `T = X_1 + ... + X_n`:
/// `P(T = t) = h(theta)^n (1-theta)^t sum_m coeff_m C(t+m-1, t)`.
#[derive(Debug, Clone)]
pub struct SumDistribution {
    n: usize,
    log_h_n: f64,
    ln_one_minus_theta: f64,
    poly: LogPolyPower,
}

impl SumDistribution {
    pub fn new(n: usize, theta: Theta, model: &ModelSpec) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain("sum distribution requires n >= 1".into()));
        }
        Ok(SumDistribution {
            n,
            log_h_n: n as f64 * model.log_normalizer(theta),
            ln_one_minus_theta: (-theta.value()).ln_1p(),
            poly: LogPolyPower::new(n, model),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn log_pmf(&self, t: u64) -> f64 {
        self.log_h_n + t as f64 * self.ln_one_minus_theta + log_composition_sum(&self.poly, t)
    }

    /// `P(T = t)`.
    pub fn pmf(&self, t: u64) -> f64 {
        self.log_pmf(t).exp()
    }
}

/// `P(T = t)` for the sum of `n` observations.
pub fn sum_statistic_pmf(t: u64, n: usize, theta: Theta, model: &ModelSpec) -> Result<f64> {
    Ok(SumDistribution::new(n, theta, model)?.pmf(t))
}

/// UMVUE of the PMF and the CDF given the sufficient statistic `(n, t)`.
///
/// Construction precomputes the polynomial powers `g^n` and `g^(n-1)`, so
/// repeated evaluation at different `(x, t)` is cheap. The estimators are
/// free of `theta` by sufficiency.
#[derive(Debug, Clone)]
pub struct Umvue {
    n: usize,
    model: ModelSpec,
    poly_n: LogPolyPower,
    poly_n_minus_1: LogPolyPower,
}

impl Umvue {
    /// `n = 1` is permitted but degenerate: the estimator collapses to the
    /// indicator `1{x = t}`.
    pub fn new(n: usize, model: &ModelSpec) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain("UMVUE requires a sample size of at least 1".into()));
        }
        Ok(Umvue {
            n,
            model: model.clone(),
            poly_n: LogPolyPower::new(n, model),
            poly_n_minus_1: LogPolyPower::new(n - 1, model),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// `ln A_n(t)`, the normalizing composition sum of the conditional law.
    pub fn log_a_n_t(&self, t: u64) -> LogWeight {
        LogWeight::from_ln(log_composition_sum(&self.poly_n, t))
    }

    fn log_pmf_given_log_a(&self, x: u64, t: u64, log_a: f64) -> f64 {
        if x > t {
            return f64::NEG_INFINITY;
        }
        self.model.weight_poly(x).ln_value() + log_composition_sum(&self.poly_n_minus_1, t - x)
            - log_a
    }

    /// `P(X_1 = x | T = t)`, the unbiased estimator of the PMF at `x`.
    /// Zero for `x > t`.
    pub fn pmf(&self, x: u64, t: u64) -> f64 {
        self.log_pmf_given_log_a(x, t, self.log_a_n_t(t).ln_value())
            .exp()
    }

    /// Cumulative form: `sum_{w=0}^{min(x,t)} pmf(w)`. Equal to one for
    /// `x >= t` and zero for `x < 0`.
    pub fn cdf(&self, x: i64, t: u64) -> f64 {
        if x < 0 {
            return 0.0;
        }
        if x as u64 >= t {
            return 1.0;
        }
        let log_a = self.log_a_n_t(t).ln_value();
        let mut total = 0.0;
        for w in 0..=x as u64 {
            total += self.log_pmf_given_log_a(w, t, log_a).exp();
        }
        total.min(1.0)
    }

    /// Variant of the CDF estimator that keeps the binomial upper index
    /// anchored at `t` instead of shifting it with the running summand.
    ///
    /// Not the cumulative sum of [`Umvue::pmf`] and not unbiased; retained so
    /// reports can show both forms where they disagree (they coincide at
    /// `x = 0`).
    pub fn cdf_anchored_variant(&self, x: i64, t: u64) -> f64 {
        if x < 0 {
            return 0.0;
        }
        let log_a = self.log_a_n_t(t).ln_value();
        let mut total = 0.0;
        for w in 0..=(x as u64).min(t) {
            total += (self.model.weight_poly(w).ln_value() + self.log_anchored_term(w, t)
                - log_a)
                .exp();
        }
        total
    }

    fn log_anchored_term(&self, w: u64, t: u64) -> f64 {
        let mut terms = Vec::with_capacity(self.poly_n_minus_1.raw().len());
        for (i, &c) in self.poly_n_minus_1.raw().iter().enumerate() {
            if c == f64::NEG_INFINITY {
                continue;
            }
            let m = (self.poly_n_minus_1.min_degree() + i) as i64;
            let lb = log_binomial(t as i64 + m - 1, t - w)
                .expect("upper >= -1")
                .ln_value();
            if lb != f64::NEG_INFINITY {
                terms.push(c + lb);
            }
        }
        log_sum_exp_raw(&terms)
    }

    /// Evaluates the estimators at every `x` in `[0, x_max]` in one pass,
    /// computing the normalizing sum once. For large `n` this is far cheaper
    /// than `x_max + 1` independent point evaluations.
    pub fn table(&self, t: u64, x_max: u64) -> UmvueTable {
        let log_a = self.log_a_n_t(t).ln_value();
        let len = x_max as usize + 1;
        let mut pmf = Vec::with_capacity(len);
        let mut cdf = Vec::with_capacity(len);
        let mut cdf_anchored = Vec::with_capacity(len);
        let mut cum = 0.0;
        let mut cum_anchored = 0.0;
        for x in 0..=x_max {
            if x <= t {
                let ln_p = self.model.weight_poly(x).ln_value();
                let mass =
                    (ln_p + log_composition_sum(&self.poly_n_minus_1, t - x) - log_a).exp();
                cum += mass;
                cum_anchored += (ln_p + self.log_anchored_term(x, t) - log_a).exp();
                pmf.push(mass);
            } else {
                pmf.push(0.0);
            }
            cdf.push(if x >= t { 1.0 } else { cum.min(1.0) });
            cdf_anchored.push(cum_anchored);
        }
        UmvueTable {
            pmf,
            cdf,
            cdf_anchored,
        }
    }
}

/// Estimator values over `x = 0..=x_max` for one observed `(n, t)`; see
/// [`Umvue::table`].
#[derive(Debug, Clone)]
pub struct UmvueTable {
    /// Unbiased PMF estimate per `x`.
    pub pmf: Vec<f64>,
    /// Cumulative (unbiased) CDF estimate per `x`.
    pub cdf: Vec<f64>,
    /// Anchored-index CDF variant per `x`.
    pub cdf_anchored: Vec<f64>,
}

/// `ln A_n(t)`, the normalizing composition sum of the conditional law of
/// one observation given the sample sum.
pub fn a_n_t(n: usize, t: u64, model: &ModelSpec) -> Result<LogWeight> {
    Ok(Umvue::new(n, model)?.log_a_n_t(t))
}

/// `P(X_1 = x | T = t)` for a sample of size `n`; free of `theta`.
pub fn conditional_pmf(x: u64, t: u64, n: usize, model: &ModelSpec) -> Result<f64> {
    Ok(Umvue::new(n, model)?.pmf(x, t))
}

/// UMVUE of `f(x)` from the sufficient statistic `(n, t)`.
pub fn umvue_pmf(x: u64, n: usize, t: u64, model: &ModelSpec) -> Result<f64> {
    Ok(Umvue::new(n, model)?.pmf(x, t))
}

/// UMVUE of `F(x)` from the sufficient statistic `(n, t)`.
pub fn umvue_cdf(x: i64, n: usize, t: u64, model: &ModelSpec) -> Result<f64> {
    Ok(Umvue::new(n, model)?.cdf(x, t))
}

const THETA_LO: f64 = 1e-9;
const THETA_HI: f64 = 1.0 - 1e-9;

/// Maximum-likelihood estimate of `theta`: the unique root of
/// `mean(theta) = sample mean`, solved by bracketing bisection with a secant
/// polish. The mean is strictly decreasing in `theta`, which the initial
/// bracket check enforces.
pub fn mle_theta(sample: &Sample, model: &ModelSpec) -> Result<Theta> {
    let xbar = sample.mean();
    if xbar == 0.0 {
        return Err(Error::DegenerateSample(
            "all observations are zero; the likelihood has no interior maximum".into(),
        ));
    }
    let target = xbar.ln();
    // residual in log space keeps the solve scale-free across many orders of
    // magnitude of the mean
    let g = |th: f64| model.log_mean(Theta::new(th).expect("interior")) - target;

    let mut lo = THETA_LO;
    let mut hi = THETA_HI;
    let g_lo = g(lo);
    let g_hi = g(hi);
    if !(g_lo > 0.0 && g_hi < 0.0) {
        return Err(Error::Numeric(format!(
            "mean residual not bracketed on [{THETA_LO}, {THETA_HI}]: \
             g(lo) = {g_lo:.6e}, g(hi) = {g_hi:.6e}, sample mean = {xbar}"
        )));
    }
    let mut f_lo = g_lo;
    let mut f_hi = g_hi;

    while hi - lo > 1e-12 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let f_mid = g(mid);
        if f_mid > 0.0 {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
            f_hi = f_mid;
        }
    }

    // secant refinement inside the final bracket
    let mut best = if f_lo.abs() <= f_hi.abs() { lo } else { hi };
    let mut best_res = f_lo.abs().min(f_hi.abs());
    for _ in 0..8 {
        if f_lo == f_hi {
            break;
        }
        let sec = lo - f_lo * (hi - lo) / (f_hi - f_lo);
        if !(sec > lo && sec < hi) {
            break;
        }
        let f_sec = g(sec);
        if f_sec.abs() < best_res {
            best = sec;
            best_res = f_sec.abs();
        }
        if f_sec > 0.0 {
            lo = sec;
            f_lo = f_sec;
        } else {
            hi = sec;
            f_hi = f_sec;
        }
        if best_res < 1e-14 {
            break;
        }
    }

    let theta = Theta::new(best).expect("bracket is interior to (0, 1)");
    let achieved = model.mean(theta);
    if (achieved - xbar).abs() > 1e-10 * xbar.max(1.0) {
        return Err(Error::Numeric(format!(
            "MLE solve stalled: mean({best}) = {achieved} vs sample mean {xbar}"
        )));
    }
    Ok(theta)
}

/// Sum of log point masses over the sample. Fails loudly on an observation
/// with nonpositive mass, naming the offending value.
pub fn log_likelihood<F>(sample: &Sample, pmf_values: F) -> Result<f64>
where
    F: Fn(u64) -> f64,
{
    let mut total = 0.0;
    for &x in sample.values() {
        let p = pmf_values(x);
        // rejects NaN as well as zero and negative masses
        if p.partial_cmp(&0.0) != Some(std::cmp::Ordering::Greater) || !p.is_finite() {
            return Err(Error::ZeroProbability { x });
        }
        total += p.ln();
    }
    Ok(total)
}
