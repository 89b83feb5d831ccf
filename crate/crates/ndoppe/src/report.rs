//! Dataset ingestion and model-fit reporting.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::estimate::{log_likelihood, mle_theta, Sample, Umvue};
use crate::model::{ModelSpec, Theta};

/// Parses whitespace-separated nonnegative decimal integers. Tokens must
/// match `[0-9]+`; anything else reports its 1-based token position.
pub fn parse_dataset(input: &str) -> Result<Sample> {
    let mut values = Vec::new();
    for (i, token) in input.split_ascii_whitespace().enumerate() {
        let position = i + 1;
        if !token.bytes().all(|b| b.is_ascii_digit()) {
            return Err(Error::Parse {
                position,
                message: format!("'{token}' is not a nonnegative decimal integer"),
            });
        }
        let value = token.parse::<u64>().map_err(|e| Error::Parse {
            position,
            message: format!("'{token}': {e}"),
        })?;
        values.push(value);
    }
    if values.is_empty() {
        return Err(Error::Parse {
            position: 1,
            message: "dataset contains no values".into(),
        });
    }
    Sample::new(values)
}

/// Counts of forest fires in districts of Greece over July-August 1998
/// (123 observations), bundled as `data/greece_fires.txt`.
pub fn greece_fires() -> Sample {
    parse_dataset(include_str!("../data/greece_fires.txt")).expect("bundled dataset is valid")
}

#[derive(Debug, Clone, Serialize)]
pub struct ModelEcho {
    pub order: usize,
    pub coefficients: Vec<f64>,
}

/// One row of the per-point estimate table.
#[derive(Debug, Clone, Serialize)]
pub struct FitRow {
    pub x: u64,
    pub observed_freq: f64,
    pub mle_pmf: f64,
    pub umvue_pmf: f64,
    pub mle_cdf: f64,
    pub umvue_cdf: f64,
    /// The anchored-index form of the CDF estimator, present only where it
    /// disagrees with the cumulative form by more than 1e-6.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub umvue_cdf_variant: Option<f64>,
}

/// Full fit of one dataset: the MLE of `theta`, both per-point estimators,
/// and both negative log-likelihoods.
#[derive(Debug, Clone, Serialize)]
pub struct FitReport {
    pub model: ModelEcho,
    pub n: usize,
    pub t: u64,
    pub theta_mle: f64,
    pub nll_mle: f64,
    pub nll_umvue: f64,
    pub table: Vec<FitRow>,
}

/// Fits `model` to `sample`: solves for the MLE of `theta`, evaluates the
/// plug-in and unbiased estimators at each `x` up to `x_max` (defaulting to
/// the sample maximum), and reports the negative log-likelihood under both
/// per-point PMF estimates.
pub fn fit(sample: &Sample, model: &ModelSpec, x_max: Option<u64>) -> Result<FitReport> {
    let theta_hat = mle_theta(sample, model)?;
    let umvue = Umvue::new(sample.n(), model)?;
    let t = sample.sum();

    let sample_max = sample.values().iter().copied().max().unwrap_or(0);
    let x_max = x_max.unwrap_or(sample_max);
    // one batch evaluation covers both the table and the likelihood terms
    let estimates = umvue.table(t, x_max.max(sample_max));

    let nll_mle = -log_likelihood(sample, |x| model.pmf(x, theta_hat))?;
    let nll_umvue = -log_likelihood(sample, |x| estimates.pmf[x as usize])?;

    let mut counts = vec![0u64; x_max as usize + 1];
    for &v in sample.values() {
        if v <= x_max {
            counts[v as usize] += 1;
        }
    }

    let mut table = Vec::with_capacity(x_max as usize + 1);
    for x in 0..=x_max {
        let i = x as usize;
        let umvue_cdf = estimates.cdf[i];
        let variant = estimates.cdf_anchored[i];
        table.push(FitRow {
            x,
            observed_freq: counts[i] as f64 / sample.n() as f64,
            mle_pmf: model.pmf(x, theta_hat),
            umvue_pmf: estimates.pmf[i],
            mle_cdf: model.cdf(x as i64, theta_hat),
            umvue_cdf,
            umvue_cdf_variant: ((variant - umvue_cdf).abs() > 1e-6).then_some(variant),
        });
    }

    Ok(FitReport {
        model: ModelEcho {
            order: model.order(),
            coefficients: model.coefficients().to_vec(),
        },
        n: sample.n(),
        t,
        theta_mle: theta_hat.value(),
        nll_mle,
        nll_umvue,
        table,
    })
}

/// One row of an exact distribution table.
#[derive(Debug, Clone, Serialize)]
pub struct DistributionRow {
    pub x: u64,
    pub pmf: f64,
    pub cdf: f64,
}

/// Exact model PMF/CDF values for `x` in `[0, x_max]`.
pub fn pmf_table(theta: Theta, model: &ModelSpec, x_max: u64) -> Vec<DistributionRow> {
    (0..=x_max)
        .map(|x| DistributionRow {
            x,
            pmf: model.pmf(x, theta),
            cdf: model.cdf(x as i64, theta),
        })
        .collect()
}
