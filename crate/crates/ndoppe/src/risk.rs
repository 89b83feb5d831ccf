//! Mean squared error of the PMF/CDF estimators.
//!
//! The unbiased estimator admits an exact MSE (its variance) as a series over
//! the sample-sum distribution; the MLE plug-in does not, so the two are
//! compared by paired Monte Carlo studies.

use crate::error::{Error, Result};
use crate::estimate::{log_composition_sum, mle_theta, LogPolyPower, Umvue};
use crate::model::{ModelSpec, Theta};
use crate::sampler::{sample, SeededStream};

const TAIL_EPS: f64 = 1e-12;
const TERM_CAP: u64 = 10_000_000;

/// Exact MSE of the unbiased PMF estimator at `x` for samples of size `n`:
/// the second moment over the sample-sum distribution minus `f(x)^2`.
pub fn umvue_pmf_mse(x: u64, n: usize, theta: Theta, model: &ModelSpec) -> Result<f64> {
    Ok(exact_mse_pair(x, n, theta, model)?.0)
}

/// Exact MSE of the unbiased CDF estimator at `x` for samples of size `n`.
pub fn umvue_cdf_mse(x: u64, n: usize, theta: Theta, model: &ModelSpec) -> Result<f64> {
    Ok(exact_mse_pair(x, n, theta, model)?.1)
}

/// Both exact MSEs in one pass over the sample-sum distribution.
///
/// The series runs over every `t` with nonnegligible mass: for `t <= x` the
/// CDF estimator equals one (its whole conditional support lies at or below
/// `x`), so those terms contribute even though the PMF terms vanish below
/// `t = x`. Truncation stops once the remaining tail mass drops under 1e-12.
pub fn exact_mse_pair(x: u64, n: usize, theta: Theta, model: &ModelSpec) -> Result<(f64, f64)> {
    if n < 2 {
        return Err(Error::Domain(
            "exact estimator MSE requires a sample size of at least 2".into(),
        ));
    }
    let log_h_n = n as f64 * model.log_normalizer(theta);
    let ln_q = (-theta.value()).ln_1p();
    let poly_n = LogPolyPower::new(n, model);
    let poly_rest = LogPolyPower::new(n - 1, model);
    let log_p: Vec<f64> = (0..=x).map(|w| model.weight_poly(w).ln_value()).collect();

    let truth_pmf = model.pmf(x, theta);
    let truth_cdf = model.cdf(x as i64, theta);

    // sliding window of ln S_{n-1}(d) for d in [t-x, t]
    let width = x as usize + 1;
    let mut window = vec![f64::NEG_INFINITY; width];

    let mut cum = 0.0;
    let mut second_moment_pmf = 0.0;
    let mut second_moment_cdf = 0.0;
    let mut t: u64 = 0;
    loop {
        let log_a = log_composition_sum(&poly_n, t);
        let mass = (log_h_n + t as f64 * ln_q + log_a).exp();
        window[t as usize % width] = log_composition_sum(&poly_rest, t);

        let pmf_hat = if t >= x {
            (log_p[x as usize] + window[(t - x) as usize % width] - log_a).exp()
        } else {
            0.0
        };
        let cdf_hat = if t <= x {
            1.0
        } else {
            let mut s = 0.0;
            for w in 0..=x {
                s += (log_p[w as usize] + window[(t - w) as usize % width] - log_a).exp();
            }
            s.min(1.0)
        };

        second_moment_pmf += pmf_hat * pmf_hat * mass;
        second_moment_cdf += cdf_hat * cdf_hat * mass;
        cum += mass;
        if 1.0 - cum < TAIL_EPS {
            break;
        }
        t += 1;
        if t >= TERM_CAP {
            return Err(Error::Numeric(format!(
                "sample-sum series hit the {TERM_CAP}-term cap with tail mass {:.3e} remaining",
                1.0 - cum
            )));
        }
    }
    Ok((
        (second_moment_pmf - truth_pmf * truth_pmf).max(0.0),
        (second_moment_cdf - truth_cdf * truth_cdf).max(0.0),
    ))
}

/// Configuration of a Monte Carlo MSE study.
#[derive(Debug, Clone)]
pub struct MseStudyConfig {
    pub model: ModelSpec,
    pub theta: Theta,
    /// Evaluation point for both the PMF and the CDF estimators.
    pub x: u64,
    /// Strictly increasing sample sizes.
    pub sample_sizes: Vec<usize>,
    /// Replications per sample size.
    pub replications: usize,
    pub master_seed: u64,
}

impl MseStudyConfig {
    fn validate(&self) -> Result<()> {
        if self.replications == 0 {
            return Err(Error::Domain("replication count must be at least 1".into()));
        }
        if self.sample_sizes.is_empty() {
            return Err(Error::Domain("at least one sample size is required".into()));
        }
        if self.sample_sizes.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::Domain(
                "sample sizes must be strictly increasing".into(),
            ));
        }
        if self.sample_sizes[0] == 0 {
            return Err(Error::Domain("sample sizes must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EstimatorKind {
    Mle,
    Umvue,
}

impl EstimatorKind {
    pub fn label(self) -> &'static str {
        match self {
            EstimatorKind::Mle => "mle",
            EstimatorKind::Umvue => "umvue",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TargetKind {
    Pmf,
    Cdf,
}

impl TargetKind {
    pub fn label(self) -> &'static str {
        match self {
            TargetKind::Pmf => "pmf",
            TargetKind::Cdf => "cdf",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MsePoint {
    pub n: usize,
    pub mse: f64,
    /// Standard deviation of the squared deviations divided by sqrt(N);
    /// zero when N = 1.
    pub std_error: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MseCurve {
    pub estimator: EstimatorKind,
    pub target: TargetKind,
    pub points: Vec<MsePoint>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MseStudy {
    /// Four curves in fixed order: (mle, pmf), (mle, cdf), (umvue, pmf),
    /// (umvue, cdf).
    pub curves: Vec<MseCurve>,
    /// Degenerate all-zero samples that had to be redrawn, per sample size.
    pub redraws: Vec<(usize, u64)>,
}

/// Paired Monte Carlo MSE study: at each sample size, every replication
/// feeds the same sample to both estimators, and deviations are measured
/// against the PMF/CDF at the generating `theta`.
///
/// Replication `i` uses substream `i` of the master seed. The unbiased
/// estimator is defined for every sample, including all zeros, so it always
/// sees the original draw; conditioning it on `T > 0` would bias its MSE
/// away from the exact series. The MLE has no interior solution on an
/// all-zero sample, so for the MLE alone such a replication is redrawn from
/// substream `i + a*N` (attempt `a`) and counted in [`MseStudy::redraws`].
/// The result depends only on the configuration, not on scheduling or shared
/// state.
pub fn mc_mse_study(config: &MseStudyConfig) -> Result<MseStudy> {
    config.validate()?;
    let reps = config.replications;
    let truth_pmf = config.model.pmf(config.x, config.theta);
    let truth_cdf = config.model.cdf(config.x as i64, config.theta);

    let mut curve_points: [Vec<MsePoint>; 4] = Default::default();
    let mut redraws = Vec::with_capacity(config.sample_sizes.len());

    for &n in &config.sample_sizes {
        let umvue = Umvue::new(n, &config.model)?;
        let mut squared = [
            Vec::with_capacity(reps),
            Vec::with_capacity(reps),
            Vec::with_capacity(reps),
            Vec::with_capacity(reps),
        ];
        let mut redraw_count = 0u64;
        for rep in 0..reps {
            let mut stream = SeededStream::new(config.master_seed, rep as u64);
            let drawn = sample(n, config.theta, &config.model, &mut stream);
            let t = drawn.sum();
            squared[2].push((umvue.pmf(config.x, t) - truth_pmf).powi(2));
            squared[3].push((umvue.cdf(config.x as i64, t) - truth_cdf).powi(2));

            let mut mle_sample = drawn;
            let mut attempt = 0u64;
            while mle_sample.sum() == 0 {
                attempt += 1;
                redraw_count += 1;
                if attempt > 10_000 {
                    return Err(Error::Numeric(format!(
                        "replication {rep} at n = {n} produced 10000 degenerate samples in a row"
                    )));
                }
                let index = rep as u64 + attempt * reps as u64;
                let mut stream = SeededStream::new(config.master_seed, index);
                mle_sample = sample(n, config.theta, &config.model, &mut stream);
            }
            let theta_hat = mle_theta(&mle_sample, &config.model)?;
            squared[0].push((config.model.pmf(config.x, theta_hat) - truth_pmf).powi(2));
            squared[1].push((config.model.cdf(config.x as i64, theta_hat) - truth_cdf).powi(2));
        }
        for (points, bucket) in curve_points.iter_mut().zip(&squared) {
            points.push(summarize(n, bucket));
        }
        redraws.push((n, redraw_count));
    }

    let [mle_pmf, mle_cdf, umvue_pmf, umvue_cdf] = curve_points;
    Ok(MseStudy {
        curves: vec![
            MseCurve {
                estimator: EstimatorKind::Mle,
                target: TargetKind::Pmf,
                points: mle_pmf,
            },
            MseCurve {
                estimator: EstimatorKind::Mle,
                target: TargetKind::Cdf,
                points: mle_cdf,
            },
            MseCurve {
                estimator: EstimatorKind::Umvue,
                target: TargetKind::Pmf,
                points: umvue_pmf,
            },
            MseCurve {
                estimator: EstimatorKind::Umvue,
                target: TargetKind::Cdf,
                points: umvue_cdf,
            },
        ],
        redraws,
    })
}

fn summarize(n: usize, squared_deviations: &[f64]) -> MsePoint {
    let count = squared_deviations.len() as f64;
    let mse = squared_deviations.iter().sum::<f64>() / count;
    let std_error = if squared_deviations.len() > 1 {
        let var = squared_deviations
            .iter()
            .map(|&s| (s - mse) * (s - mse))
            .sum::<f64>()
            / (count - 1.0);
        (var / count).sqrt()
    } else {
        0.0
    };
    MsePoint { n, mse, std_error }
}
